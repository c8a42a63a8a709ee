#include "bdmm/inference.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bdmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct CompiledRuns {
  std::vector<int> block;       // symbol block per run
  std::vector<long long> len;   // run length per run
  int count() const { return static_cast<int>(block.size()); }
};

CompiledRuns compile_runs(const PartitionedModel& model,
                          const RunLengthSequence& runs) {
  CompiledRuns out;
  out.block.reserve(runs.runs.size());
  out.len.reserve(runs.runs.size());
  for (const auto& r : runs.runs) {
    const int k = model.alphabet.index_of(r.symbol);
    if (k < 0)
      throw UnknownSymbol(std::string("symbol '") + r.symbol +
                              "' not in model alphabet",
                          -1);
    if (r.count < 1) throw DimensionMismatch("run count must be >= 1");
    out.block.push_back(k);
    out.len.push_back(r.count);
  }
  if (out.block.empty()) throw DimensionMismatch("empty run sequence");
  return out;
}

void require_block_diagonal(const PartitionedModel& model) {
  if (model.kind != ModelKind::BlockDiagonal)
    throw DimensionMismatch(
        "run-length recursion requires a block-diagonal model");
}

// log lambda^(m-1) exponents for one run, one entry per state of the block.
Eigen::VectorXd diag_power_exponents(const PartitionedModel& model, int block,
                                     long long m) {
  const int off = model.partition.offset(block);
  const int nk = model.partition.counts[block];
  Eigen::VectorXd e(nk);
  for (int j = 0; j < nk; ++j) {
    const double lambda = model.transition(off + j, off + j);
    if (m == 1)
      e(j) = 0.0;
    else
      e(j) = lambda > 0.0 ? static_cast<double>(m - 1) * std::log(lambda)
                          : kNegInf;
  }
  return e;
}

double slack_for(double loglik) {
  return 1e-8 * std::max(1.0, std::abs(loglik));
}

}  // namespace

ForwardBackwardState forward(const PartitionedModel& model,
                             const RunLengthSequence& runs) {
  require_block_diagonal(model);
  const CompiledRuns cr = compile_runs(model, runs);
  const int n = model.num_states();
  const int c_count = cr.count();

  ForwardBackwardState state;
  state.alphas.assign(static_cast<size_t>(c_count), Eigen::VectorXd::Zero(n));
  state.lin_scale.resize(static_cast<size_t>(c_count));
  state.shift.resize(static_cast<size_t>(c_count));

  for (int c = 0; c < c_count; ++c) {
    const int k = cr.block[static_cast<size_t>(c)];
    const int off = model.partition.offset(k);
    const int nk = model.partition.counts[k];

    Eigen::VectorXd u(nk);
    if (c == 0) {
      for (int j = 0; j < nk; ++j) u(j) = model.stationary(off + j);
    } else {
      const int kp = cr.block[static_cast<size_t>(c - 1)];
      const int offp = model.partition.offset(kp);
      const int nkp = model.partition.counts[kp];
      u = (state.alphas[static_cast<size_t>(c - 1)]
               .segment(offp, nkp)
               .transpose() *
           model.block(kp, k))
              .transpose();
      ++state.counters.inter_block_products;
    }

    // Diagonal power as n(mu) scalar exponentiations, applied in log space so
    // long runs cannot underflow.
    const Eigen::VectorXd e =
        diag_power_exponents(model, k, cr.len[static_cast<size_t>(c)]);
    ++state.counters.diagonal_power_evals;
    double shift = kNegInf;
    for (int j = 0; j < nk; ++j)
      if (u(j) > 0.0 && e(j) > shift) shift = e(j);
    if (shift == kNegInf)
      throw ZeroProbabilitySequence("run " + std::to_string(c + 1) +
                                    " is impossible under the model");
    for (int j = 0; j < nk; ++j)
      u(j) = e(j) == kNegInf ? 0.0 : u(j) * std::exp(e(j) - shift);

    const double s = u.sum();
    if (!(s > 0.0))
      throw ZeroProbabilitySequence("scale factor vanished at run " +
                                    std::to_string(c + 1));
    state.alphas[static_cast<size_t>(c)].segment(off, nk) = u / s;
    state.lin_scale[static_cast<size_t>(c)] = s;
    state.shift[static_cast<size_t>(c)] = shift;
    state.log_likelihood += std::log(s) + shift;
  }
  return state;
}

void backward(const PartitionedModel& model, const RunLengthSequence& runs,
              ForwardBackwardState& state) {
  require_block_diagonal(model);
  const CompiledRuns cr = compile_runs(model, runs);
  const int n = model.num_states();
  const int c_count = cr.count();
  if (static_cast<int>(state.alphas.size()) != c_count)
    throw DimensionMismatch("forward state does not match the run sequence");

  state.betas.assign(static_cast<size_t>(c_count), Eigen::VectorXd::Ones(n));
  for (int c = c_count - 2; c >= 0; --c) {
    const int kn = cr.block[static_cast<size_t>(c + 1)];
    const int off = model.partition.offset(kn);
    const int nk = model.partition.counts[kn];
    const Eigen::VectorXd e =
        diag_power_exponents(model, kn, cr.len[static_cast<size_t>(c + 1)]);
    const double shift = state.shift[static_cast<size_t>(c + 1)];
    Eigen::VectorXd w(nk);
    for (int j = 0; j < nk; ++j)
      w(j) = e(j) == kNegInf
                 ? 0.0
                 : std::exp(e(j) - shift) *
                       state.betas[static_cast<size_t>(c + 1)](off + j);
    state.betas[static_cast<size_t>(c)] =
        model.transition.middleCols(off, nk) * w /
        state.lin_scale[static_cast<size_t>(c + 1)];
  }
}

EStepResult estep(const PartitionedModel& model,
                  const RunLengthSequence& runs) {
  const CompiledRuns cr = compile_runs(model, runs);
  ForwardBackwardState state = forward(model, runs);
  backward(model, runs, state);

  const int n = model.num_states();
  const int c_count = cr.count();

  EStepResult out;
  out.run_block = cr.block;
  out.log_likelihood = state.log_likelihood;
  out.counters = state.counters;
  out.self_counts = Eigen::VectorXd::Zero(n);
  out.gamma.reserve(static_cast<size_t>(c_count));

  for (int c = 0; c < c_count; ++c) {
    Eigen::VectorXd g = state.alphas[static_cast<size_t>(c)].cwiseProduct(
        state.betas[static_cast<size_t>(c)]);
    out.gamma.push_back(g);
    // Within a run the state cannot change (diagonal block), so each state
    // contributes (m-1) expected self transitions weighted by its posterior.
    const double m1 =
        static_cast<double>(cr.len[static_cast<size_t>(c)] - 1);
    if (m1 > 0.0) out.self_counts += g * m1;
  }

  out.boundary.reserve(static_cast<size_t>(c_count - 1));
  for (int c = 0; c + 1 < c_count; ++c) {
    const int k = cr.block[static_cast<size_t>(c)];
    const int kn = cr.block[static_cast<size_t>(c + 1)];
    const int off = model.partition.offset(k);
    const int nk = model.partition.counts[k];
    const int offn = model.partition.offset(kn);
    const int nkn = model.partition.counts[kn];
    const Eigen::VectorXd e =
        diag_power_exponents(model, kn, cr.len[static_cast<size_t>(c + 1)]);
    const double shift = state.shift[static_cast<size_t>(c + 1)];
    const double lin = state.lin_scale[static_cast<size_t>(c + 1)];

    Eigen::MatrixXd g(nk, nkn);
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nkn; ++j) {
        const double pw = e(j) == kNegInf ? 0.0 : std::exp(e(j) - shift);
        g(i, j) = state.alphas[static_cast<size_t>(c)](off + i) *
                  model.transition(off + i, offn + j) * pw *
                  state.betas[static_cast<size_t>(c + 1)](offn + j) / lin;
      }
    out.boundary.push_back(std::move(g));
  }
  return out;
}

PartitionedModel mstep(const EStepResult& es, const PartitionedModel& model,
                       bool stationary_pi) {
  const int n = model.num_states();
  const int c_count = static_cast<int>(es.gamma.size());

  Eigen::MatrixXd boundary_sum = Eigen::MatrixXd::Zero(n, n);
  for (int c = 0; c + 1 < c_count; ++c) {
    const auto& g = es.boundary[static_cast<size_t>(c)];
    const int k = es.run_block[static_cast<size_t>(c)];
    const int kn = es.run_block[static_cast<size_t>(c + 1)];
    if (g.rows() != model.partition.counts[k] ||
        g.cols() != model.partition.counts[kn])
      throw DimensionMismatch("estep output inconsistent with partition");
    boundary_sum.block(model.partition.offset(k), model.partition.offset(kn),
                       g.rows(), g.cols()) += g;
  }

  Eigen::VectorXd out_mass = es.self_counts + boundary_sum.rowwise().sum();

  Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (out_mass(i) < 1e-300)
      throw StarvedState("state " + std::to_string(i) +
                             " has no expected outgoing transitions",
                         i);
    const int ki = model.partition.symbol_of_state(i);
    for (int j = 0; j < n; ++j) {
      const int kj = model.partition.symbol_of_state(j);
      if (ki == kj) {
        if (i == j) next(i, j) = es.self_counts(i) / out_mass(i);
        // within-symbol off-diagonals stay exactly zero
      } else {
        next(i, j) = boundary_sum(i, j) / out_mass(i);
      }
    }
    next.row(i) /= next.row(i).sum();
  }

  PartitionedModel out = model;
  out.transition = next;
  out.kind = ModelKind::BlockDiagonal;
  if (stationary_pi) {
    out.stationary = solve_stationary(next);
  } else {
    Eigen::VectorXd g1 = es.gamma.front();
    for (int i = 0; i < n; ++i)
      if (g1(i) < 0.0) g1(i) = 0.0;
    out.stationary = g1.transpose() / g1.sum();
  }
  return out;
}

FitReport fit(const PartitionedModel& initial, const RunLengthSequence& runs,
              const FitConfig& config) {
  require_block_diagonal(initial);
  {
    auto violations = validate_model(initial);
    if (!violations.empty())
      throw NonStochastic("invalid initial model: " +
                          violations.front().detail);
  }
  if (config.tol <= 0.0) throw DimensionMismatch("tolerance must be > 0");

  FitReport report;
  report.initial_model = initial;

  PartitionedModel model = initial;
  double prev = 0.0;
  bool have_prev = false;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    EStepResult es = estep(model, runs);
    const double ll = es.log_likelihood;
    if (have_prev && ll < prev - slack_for(prev)) {
      std::ostringstream os;
      os << "log-likelihood decreased from " << prev << " to " << ll
         << " at iteration " << iter + 1;
      auto trace = report.loglik_trace;
      trace.push_back(ll);
      throw NonMonotoneLikelihood(os.str(), trace);
    }
    report.loglik_trace.push_back(ll);
    report.counters_per_pass = es.counters;
    ++report.forward_passes;

    if (have_prev) {
      const double rel = std::abs(ll - prev) / std::max(std::abs(ll), 1e-9);
      if (rel < config.tol || std::abs(ll - prev) < 1e-9) {
        report.converged = true;
        report.stop_reason = "tolerance";
        break;
      }
    }
    model = mstep(es, model, config.stationary_pi);
    prev = ll;
    have_prev = true;
  }
  if (!report.converged) report.stop_reason = "max_iter";

  report.iterations = static_cast<int>(report.loglik_trace.size());
  report.final_pi = model.stationary;
  report.final_model = model;
  try {
    report.final_model.stationary = stationary_distribution(model.transition);
  } catch (const Error&) {
    // Degenerate fits (periodic or reducible chains) keep the working pi
    // so the report still carries a usable vector.
    try {
      report.final_model.stationary = solve_stationary(model.transition);
    } catch (const Error&) {
    }
  }
  return report;
}

ConventionalFB conventional_forward_backward(const PartitionedModel& model,
                                             const std::string& sequence) {
  const int n = model.num_states();
  const long long t_len = static_cast<long long>(sequence.size());
  if (t_len == 0) throw DimensionMismatch("empty sequence");

  std::vector<int> sym(static_cast<size_t>(t_len));
  for (long long t = 0; t < t_len; ++t) {
    const int k = model.alphabet.index_of(sequence[static_cast<size_t>(t)]);
    if (k < 0)
      throw UnknownSymbol(std::string("unknown symbol '") +
                              sequence[static_cast<size_t>(t)] + "'",
                          t);
    sym[static_cast<size_t>(t)] = k;
  }

  std::vector<int> state_sym(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    state_sym[static_cast<size_t>(i)] = model.partition.symbol_of_state(i);

  Eigen::MatrixXd alpha(t_len, n);
  std::vector<double> scale(static_cast<size_t>(t_len));
  double loglik = 0.0;

  for (long long t = 0; t < t_len; ++t) {
    Eigen::RowVectorXd u(n);
    if (t == 0)
      u = model.stationary;
    else
      u = alpha.row(t - 1) * model.transition;
    for (int i = 0; i < n; ++i)
      if (state_sym[static_cast<size_t>(i)] != sym[static_cast<size_t>(t)])
        u(i) = 0.0;
    const double s = u.sum();
    if (!(s > 0.0))
      throw ZeroProbabilitySequence("sequence impossible at position " +
                                    std::to_string(t));
    alpha.row(t) = u / s;
    scale[static_cast<size_t>(t)] = s;
    loglik += std::log(s);
  }

  ConventionalFB out;
  out.log_likelihood = loglik;
  out.expected_transitions = Eigen::MatrixXd::Zero(n, n);
  out.expected_out = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd beta = Eigen::VectorXd::Ones(n);
  for (long long t = t_len - 1; t >= 0; --t) {
    const Eigen::VectorXd gamma =
        alpha.row(t).transpose().cwiseProduct(beta);
    if (t == 0) out.gamma_first = gamma;
    if (t < t_len - 1) out.expected_out += gamma;
    if (t > 0) {
      // xi_{t-1}(i,j) = alpha_{t-1}(i) T(i,j) mask_t(j) beta_t(j) / scale_t
      Eigen::VectorXd masked(n);
      for (int j = 0; j < n; ++j)
        masked(j) =
            state_sym[static_cast<size_t>(j)] == sym[static_cast<size_t>(t)]
                ? beta(j) / scale[static_cast<size_t>(t)]
                : 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out.expected_transitions(i, j) +=
              alpha(t - 1, i) * model.transition(i, j) * masked(j);
      beta = model.transition * masked;
    }
  }
  return out;
}

std::pair<PartitionedModel, double> conventional_bwa_step(
    const PartitionedModel& model, const std::string& sequence) {
  const ConventionalFB fb = conventional_forward_backward(model, sequence);
  const int n = model.num_states();

  Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (fb.expected_out(i) < 1e-300)
      throw StarvedState("state " + std::to_string(i) +
                             " has no expected outgoing transitions",
                         i);
    const int ki = model.partition.symbol_of_state(i);
    for (int j = 0; j < n; ++j) {
      const int kj = model.partition.symbol_of_state(j);
      if (ki == kj && i != j) continue;  // constrained to zero
      next(i, j) = fb.expected_transitions(i, j) / fb.expected_out(i);
    }
    next.row(i) /= next.row(i).sum();
  }

  PartitionedModel out = model;
  out.transition = next;
  out.kind = ModelKind::BlockDiagonal;
  Eigen::VectorXd g1 = fb.gamma_first;
  for (int i = 0; i < n; ++i)
    if (g1(i) < 0.0) g1(i) = 0.0;
  out.stationary = g1.transpose() / g1.sum();
  return {out, fb.log_likelihood};
}

FitReport conventional_fit(const PartitionedModel& initial,
                           const std::string& sequence,
                           const FitConfig& config) {
  FitReport report;
  report.initial_model = initial;

  PartitionedModel model = initial;
  double prev = 0.0;
  bool have_prev = false;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    auto [next, ll] = conventional_bwa_step(model, sequence);
    if (have_prev && ll < prev - slack_for(prev)) {
      auto trace = report.loglik_trace;
      trace.push_back(ll);
      throw NonMonotoneLikelihood("log-likelihood decreased", trace);
    }
    report.loglik_trace.push_back(ll);
    if (have_prev) {
      const double rel = std::abs(ll - prev) / std::max(std::abs(ll), 1e-9);
      if (rel < config.tol || std::abs(ll - prev) < 1e-9) {
        report.converged = true;
        report.stop_reason = "tolerance";
        break;
      }
    }
    model = next;
    prev = ll;
    have_prev = true;
  }
  if (!report.converged) report.stop_reason = "max_iter";
  report.iterations = static_cast<int>(report.loglik_trace.size());
  report.final_pi = model.stationary;
  report.final_model = model;
  try {
    report.final_model.stationary = solve_stationary(model.transition);
  } catch (const Error&) {
  }
  return report;
}

}  // namespace bdmm
