// Command-line front end: model simulation, run-length Baum-Welch fitting,
// block-diagonal equivalent construction, and fit validation via error-free
// run distributions and error probabilities.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bdmm/equivalence.hpp"
#include "bdmm/inference.hpp"
#include "bdmm/io.hpp"
#include "bdmm/model.hpp"
#include "bdmm/rle.hpp"
#include "bdmm/rng.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoConverge = 4;
constexpr int kExitNonMonotone = 5;
constexpr int kExitCondition = 6;

struct ValidationResult {
  double pe_measured = 0.0;
  double pe_model = 0.0;
  double efrd_max_dev = 0.0;
};

// Regenerates a same-length sequence from the model and compares error
// probabilities and EFRD tables. Writes both tables plus a JSON report.
ValidationResult run_validation(const bdmm::PartitionedModel& model,
                                const std::string& measured,
                                std::uint64_t seed, const fs::path& out_dir,
                                const std::string& prefix) {
  const auto measured_runs = bdmm::encode(measured, model.alphabet);
  const std::string regenerated = bdmm::simulate(
      model, static_cast<long long>(measured.size()), seed);
  const auto regen_runs = bdmm::encode(regenerated, model.alphabet);

  const auto efrd_measured = bdmm::efrd(measured_runs);
  const auto efrd_model = bdmm::efrd(regen_runs);

  ValidationResult r;
  r.pe_measured = bdmm::error_probability(measured_runs);
  r.pe_model = bdmm::error_probability(regen_runs);
  r.efrd_max_dev = bdmm::efrd_max_deviation(
      efrd_measured, efrd_model,
      std::max(efrd_measured.m_max(), efrd_model.m_max()));

  fs::create_directories(out_dir);
  bdmm::save_efrd(efrd_measured, (out_dir / (prefix + "measured.efrd.csv")).string());
  bdmm::save_efrd(efrd_model, (out_dir / (prefix + "model.efrd.csv")).string());

  std::ostringstream js;
  js << "{\n"
     << "  \"efrd_max_dev\": " << r.efrd_max_dev << ",\n"
     << "  \"pe_diff\": " << r.pe_measured - r.pe_model << ",\n"
     << "  \"pe_measured\": " << r.pe_measured << ",\n"
     << "  \"pe_model\": " << r.pe_model << ",\n"
     << "  \"rng\": \"" << bdmm::kRngId << "\",\n"
     << "  \"seed\": " << seed << ",\n"
     << "  \"version\": " << bdmm::kFormatVersion << "\n"
     << "}\n";
  bdmm::write_text_file((out_dir / (prefix + "validation.json")).string(),
                        js.str());
  return r;
}

int cmd_simulate(const std::string& model_path, long long len,
                 std::uint64_t seed, const std::string& out) {
  const auto model = bdmm::load_model(model_path);
  if (auto v = bdmm::validate_model(model); !v.empty()) {
    std::cerr << "invalid model: " << v.front().detail << "\n";
    return kExitInvalid;
  }
  const std::string seq = bdmm::simulate(model, len, seed);
  bdmm::save_sequence(seq, out);
  const auto runs = bdmm::encode(seq, model.alphabet);
  std::cout << "wrote " << out << " (" << len << " symbols, rng "
            << bdmm::kRngId << ", seed " << seed << ")\n";
  std::cout << "error probability: " << bdmm::error_probability(runs) << "\n";
  std::cout << "runs: " << runs.runs.size() << "\n";
  return 0;
}

int cmd_fit(const std::string& init_path, const std::string& seq_path,
            double tol, int max_iter, bool stationary_pi, bool oracle,
            const std::string& out) {
  const auto initial = bdmm::load_model(init_path);
  if (auto v = bdmm::validate_model(initial); !v.empty()) {
    std::cerr << "invalid initial model: " << v.front().detail << "\n";
    return kExitInvalid;
  }
  const std::string seq = bdmm::load_sequence(seq_path, initial.alphabet);
  const auto runs = bdmm::encode(seq, initial.alphabet);

  bdmm::FitConfig config;
  config.tol = tol;
  config.max_iter = max_iter;
  config.stationary_pi = stationary_pi;
  const auto report = bdmm::fit(initial, runs, config);

  bdmm::save_model(report.final_model, out);
  bdmm::save_fit_report(report, out + ".report.json");
  std::cout << "iterations: " << report.iterations << "\n";
  std::cout << "log-likelihood: " << report.loglik_trace.back() << "\n";
  std::cout << "stop reason: " << report.stop_reason << "\n";

  if (oracle) {
    const auto conv = bdmm::conventional_fit(initial, seq, config);
    const size_t n_iters =
        std::min(report.loglik_trace.size(), conv.loglik_trace.size());
    double max_ll_diff = 0.0;
    for (size_t i = 0; i < n_iters; ++i)
      max_ll_diff = std::max(max_ll_diff,
                             std::abs(report.loglik_trace[i] -
                                      conv.loglik_trace[i]));
    const double matrix_diff =
        (report.final_model.transition - conv.final_model.transition)
            .lpNorm<Eigen::Infinity>();
    std::cout << "oracle max loglik discrepancy: " << max_ll_diff << "\n";
    std::cout << "oracle final matrix discrepancy: " << matrix_diff << "\n";
  }
  return report.converged ? 0 : kExitNoConverge;
}

int cmd_equiv(const std::string& model_path, const std::string& out) {
  const auto model = bdmm::load_model(model_path);
  const auto report = bdmm::check_conditions(model);
  bdmm::write_text_file(out + ".conditions.json",
                        bdmm::condition_report_to_json(report));
  if (!report.all_pass()) {
    for (const auto& e : report.entries)
      if (!e.pass)
        std::cerr << "condition " << e.id << " fails: " << e.detail << "\n";
    return kExitCondition;
  }
  const auto eq = bdmm::construct_equivalent(model);
  bdmm::save_model(eq.model, out);
  std::cout << "wrote " << out << " and " << out << ".conditions.json\n";
  return 0;
}

int cmd_verify(const std::string& a_path, const std::string& b_path,
               int max_len) {
  const auto a = bdmm::load_model(a_path);
  const auto b = bdmm::load_model(b_path);
  const double disc = bdmm::verify_equivalence(a, b, max_len);
  std::cout << "max relative likelihood discrepancy (len <= " << max_len
            << "): " << disc << "\n";
  return 0;
}

int cmd_validate(const std::string& model_path, const std::string& seq_path,
                 std::uint64_t seed, const std::string& out_dir) {
  const auto model = bdmm::load_model(model_path);
  const std::string measured = bdmm::load_sequence(seq_path, model.alphabet);
  const auto r = run_validation(model, measured, seed, out_dir, "");
  std::cout << "P_e (measured): " << r.pe_measured << "\n";
  std::cout << "P_e (model):    " << r.pe_model << "\n";
  std::cout << "difference:     " << r.pe_measured - r.pe_model << "\n";
  std::cout << "EFRD max deviation: " << r.efrd_max_dev << "\n";
  return 0;
}

// Runs simulate -> fit -> validate across the six measurement cells and
// emits a summary CSV.
int cmd_demo(const std::string& data_dir, const std::string& out_dir,
             long long len, std::uint64_t seed, double tol, int max_iter) {
  const std::vector<std::string> cells = {
      "day1_morning", "day1_noon", "day1_evening",
      "day2_morning", "day2_noon", "day2_evening",
  };
  fs::create_directories(out_dir);
  std::ostringstream csv;
  csv << "cell,pe_measured,pe_model,efrd_max_dev,iterations,loglik\n";

  for (size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    const auto generating =
        bdmm::load_model(data_dir + "/" + cell + ".converged.json");
    const auto initial =
        bdmm::load_model(data_dir + "/" + cell + ".init.json");
    const std::uint64_t cell_seed = seed + i;

    const std::string measured = bdmm::simulate(generating, len, cell_seed);
    bdmm::save_sequence(measured, out_dir + "/" + cell + ".seq");

    bdmm::FitConfig config;
    config.tol = tol;
    config.max_iter = max_iter;
    const auto report =
        bdmm::fit(initial, bdmm::encode(measured, initial.alphabet), config);
    bdmm::save_model(report.final_model, out_dir + "/" + cell + ".fitted.json");
    bdmm::save_fit_report(report, out_dir + "/" + cell + ".report.json");

    const auto r = run_validation(report.final_model, measured,
                                  cell_seed + 1000, out_dir, cell + ".");
    csv << cell << ',' << r.pe_measured << ',' << r.pe_model << ','
        << r.efrd_max_dev << ',' << report.iterations << ','
        << report.loglik_trace.back() << '\n';
    std::cout << cell << ": P_e=" << r.pe_measured
              << " P_e(model)=" << r.pe_model
              << " efrd_dev=" << r.efrd_max_dev
              << " iters=" << report.iterations << "\n";
  }
  bdmm::write_text_file(out_dir + "/summary.csv", csv.str());
  std::cout << "wrote " << out_dir << "/summary.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-diagonal Markov model toolkit for bursty error channels"};
  app.require_subcommand(1);

  std::string model_path, init_path, seq_path, out, out_dir = "out";
  std::string model_a, model_b, data_dir = "data";
  long long len = 20000;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int max_iter = 500;
  int max_len = 8;
  bool stationary_pi = false;
  bool oracle = false;

  auto* sim = app.add_subcommand("simulate", "Sample an error sequence from a model");
  sim->add_option("--model", model_path, "model file")->required();
  sim->add_option("--len", len, "sequence length")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--out", out, "output sequence file")->required();

  auto* fit_cmd = app.add_subcommand("fit", "Fit a block-diagonal model with the run-length Baum-Welch algorithm");
  fit_cmd->add_option("--init", init_path, "initial model file")->required();
  fit_cmd->add_option("--seq", seq_path, "error sequence file")->required();
  fit_cmd->add_option("--tol", tol, "relative log-likelihood tolerance");
  fit_cmd->add_option("--max-iter", max_iter, "iteration cap");
  fit_cmd->add_flag("--stationary-pi", stationary_pi,
                    "re-estimate pi as the stationary vector");
  fit_cmd->add_flag("--oracle", oracle,
                    "cross-check against the conventional unrolled Baum-Welch");
  fit_cmd->add_option("--out", out, "output model file")->required();

  auto* equiv = app.add_subcommand("equiv", "Construct the equivalent block-diagonal model");
  equiv->add_option("--model", model_path, "general model file")->required();
  equiv->add_option("--out", out, "output model file")->required();

  auto* verify = app.add_subcommand("verify", "Compare sequence likelihoods of two models by enumeration");
  verify->add_option("--model-a", model_a, "first model file")->required();
  verify->add_option("--model-b", model_b, "second model file")->required();
  verify->add_option("--max-len", max_len, "max sequence length")
      ->check(CLI::Range(1, 12));

  auto* validate = app.add_subcommand("validate", "Compare a sequence against a model via EFRD and error probability");
  validate->add_option("--model", model_path, "model file")->required();
  validate->add_option("--seq", seq_path, "measured sequence file")->required();
  validate->add_option("--seed", seed, "RNG seed for regeneration");
  validate->add_option("--out", out_dir, "output directory");

  auto* demo = app.add_subcommand("demo", "Run the six-cell simulate/fit/validate workflow");
  demo->add_option("--data", data_dir, "fixture model directory");
  demo->add_option("--out", out_dir, "output directory");
  demo->add_option("--len", len, "sequence length")->check(CLI::PositiveNumber);
  demo->add_option("--seed", seed, "base RNG seed");
  demo->add_option("--tol", tol, "fit tolerance");
  demo->add_option("--max-iter", max_iter, "fit iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (sim->parsed()) return cmd_simulate(model_path, len, seed, out);
    if (fit_cmd->parsed())
      return cmd_fit(init_path, seq_path, tol, max_iter, stationary_pi, oracle, out);
    if (equiv->parsed()) return cmd_equiv(model_path, out);
    if (verify->parsed()) return cmd_verify(model_a, model_b, max_len);
    if (validate->parsed())
      return cmd_validate(model_path, seq_path, seed, out_dir);
    if (demo->parsed())
      return cmd_demo(data_dir, out_dir, len, seed, tol, max_iter);
  } catch (const bdmm::ConditionViolation& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitCondition;
  } catch (const bdmm::NonMonotoneLikelihood& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitNonMonotone;
  } catch (const bdmm::IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const bdmm::Error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
