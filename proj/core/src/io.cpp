#include "bdmm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bdmm {

using nlohmann::json;

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp + "' for writing");
    os << content;
    if (!os) throw IoError("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

namespace {

json model_json(const PartitionedModel& model) {
  json j;
  j["version"] = kFormatVersion;
  json alphabet = json::array();
  for (char s : model.alphabet.symbols) alphabet.push_back(std::string(1, s));
  j["alphabet"] = alphabet;
  j["partition"] = model.partition.counts;
  j["kind"] =
      model.kind == ModelKind::BlockDiagonal ? "block-diagonal" : "general";
  json rows = json::array();
  for (int i = 0; i < model.transition.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < model.transition.cols(); ++k)
      row.push_back(model.transition(i, k));
    rows.push_back(row);
  }
  j["transition"] = rows;
  json pi = json::array();
  for (int i = 0; i < model.stationary.size(); ++i)
    pi.push_back(model.stationary(i));
  j["stationary"] = pi;
  return j;
}

PartitionedModel model_from(const json& j) {
  PartitionedModel model;
  for (const auto& s : j.at("alphabet")) {
    const std::string sym = s.get<std::string>();
    if (sym.size() != 1)
      throw IoError("alphabet symbols must be single characters");
    model.alphabet.symbols.push_back(sym[0]);
  }
  model.partition.counts = j.at("partition").get<std::vector<int>>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "block-diagonal")
    model.kind = ModelKind::BlockDiagonal;
  else if (kind == "general")
    model.kind = ModelKind::General;
  else
    throw IoError("unknown model kind '" + kind + "'");

  const auto& rows = j.at("transition");
  const int n = static_cast<int>(rows.size());
  model.transition.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw IoError("transition matrix is not square");
    for (int k = 0; k < n; ++k)
      model.transition(i, k) = rows[i][k].get<double>();
  }

  if (j.contains("stationary") && !j.at("stationary").is_null()) {
    const auto pi = j.at("stationary").get<std::vector<double>>();
    if (static_cast<int>(pi.size()) != n)
      throw IoError("stationary vector length mismatch");
    model.stationary.resize(n);
    for (int i = 0; i < n; ++i) model.stationary(i) = pi[i];
  } else {
    model.stationary = stationary_distribution(model.transition);
  }
  return model;
}

}  // namespace

std::string model_to_json(const PartitionedModel& model) {
  return model_json(model).dump(2) + "\n";
}

PartitionedModel model_from_json(const std::string& json_text) {
  try {
    return model_from(json::parse(json_text));
  } catch (const json::exception& ex) {
    throw IoError(std::string("malformed model file: ") + ex.what());
  }
}

void save_model(const PartitionedModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model));
}

PartitionedModel load_model(const std::string& path) {
  return model_from_json(read_text_file(path));
}

void save_sequence(const std::string& sequence, const std::string& path) {
  // 80-column lines keep the files diffable and editor friendly.
  std::string out;
  out.reserve(sequence.size() + sequence.size() / 80 + 1);
  for (size_t i = 0; i < sequence.size(); i += 80) {
    out.append(sequence, i, 80);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

std::string load_sequence(const std::string& path,
                          const SymbolAlphabet& alphabet) {
  const std::string raw = read_text_file(path);
  if (raw.find('^') != std::string::npos)
    return decode(parse_rle_text(raw, alphabet));
  std::string out;
  out.reserve(raw.size());
  long long pos = 0;
  for (char c : raw) {
    if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
    if (alphabet.index_of(c) < 0)
      throw UnknownSymbol(std::string("unknown symbol '") + c + "' in '" +
                              path + "'",
                          pos);
    out.push_back(c);
    ++pos;
  }
  if (out.empty()) throw IoError("sequence file '" + path + "' is empty");
  return out;
}

std::string efrd_to_csv(const EfrdTable& table) {
  std::ostringstream os;
  os << "m,pr_efr,samples\n";
  json v;  // shortest round-trip double formatting
  for (int m = 0; m <= table.m_max(); ++m) {
    v = table.values[static_cast<size_t>(m)];
    os << m << ',' << v.dump() << ',' << table.sample_count << '\n';
  }
  return os.str();
}

void save_efrd(const EfrdTable& table, const std::string& path) {
  write_text_file(path, efrd_to_csv(table));
}

std::string condition_report_to_json(const ConditionReport& report) {
  json j;
  j["version"] = kFormatVersion;
  j["pass"] = report.all_pass();
  json entries = json::array();
  for (const auto& e : report.entries) {
    json je;
    je["id"] = e.id;
    je["pass"] = e.pass;
    je["margin"] = e.margin;
    je["block"] = e.block;
    je["row"] = e.row;
    je["col"] = e.col;
    je["detail"] = e.detail;
    entries.push_back(je);
  }
  j["conditions"] = entries;
  return j.dump(2) + "\n";
}

std::string fit_report_to_json(const FitReport& report) {
  json j;
  j["version"] = kFormatVersion;
  j["initial_model"] = model_json(report.initial_model);
  j["final_model"] = model_json(report.final_model);
  json pi = json::array();
  for (int i = 0; i < report.final_pi.size(); ++i)
    pi.push_back(report.final_pi(i));
  j["final_pi"] = pi;
  j["trace"] = report.loglik_trace;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["stop_reason"] = report.stop_reason;
  j["counters"] = {
      {"inter_block_products_per_pass", report.counters_per_pass.inter_block_products},
      {"diagonal_power_evals_per_pass", report.counters_per_pass.diagonal_power_evals},
      {"forward_passes", report.forward_passes},
  };
  return j.dump(2) + "\n";
}

void save_fit_report(const FitReport& report, const std::string& path) {
  write_text_file(path, fit_report_to_json(report));
}

}  // namespace bdmm
