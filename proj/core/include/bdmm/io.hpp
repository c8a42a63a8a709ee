#ifndef BDMM_IO_HPP
#define BDMM_IO_HPP

#include <string>

#include "bdmm/equivalence.hpp"
#include "bdmm/inference.hpp"
#include "bdmm/model.hpp"
#include "bdmm/rle.hpp"

namespace bdmm {

// File schemas are documented in docs/formats.md. Model and report files are
// key-sorted JSON with a version field; doubles round-trip exactly.

inline constexpr int kFormatVersion = 1;

// Atomic write: temp file in the same directory, then rename.
// Throws IoError.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

std::string model_to_json(const PartitionedModel& model);
PartitionedModel model_from_json(const std::string& json_text);

void save_model(const PartitionedModel& model, const std::string& path);
PartitionedModel load_model(const std::string& path);

// Sequence files: one ASCII character per symbol, line breaks ignored.
// A file containing '^' is parsed as run-length text (`sym^count` tokens).
void save_sequence(const std::string& sequence, const std::string& path);
std::string load_sequence(const std::string& path,
                          const SymbolAlphabet& alphabet);

// EFRD CSV: header `m,pr_efr,samples`.
std::string efrd_to_csv(const EfrdTable& table);
void save_efrd(const EfrdTable& table, const std::string& path);

std::string condition_report_to_json(const ConditionReport& report);
std::string fit_report_to_json(const FitReport& report);
void save_fit_report(const FitReport& report, const std::string& path);

}  // namespace bdmm

#endif  // BDMM_IO_HPP
