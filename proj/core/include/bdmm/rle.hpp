#ifndef BDMM_RLE_HPP
#define BDMM_RLE_HPP

#include <string>
#include <utility>
#include <vector>

#include "bdmm/errors.hpp"

namespace bdmm {

struct SymbolAlphabet;

// Maximal-run encoding of a symbol sequence: ordered (symbol, count) pairs
// with adjacent runs carrying distinct symbols.
struct RunLengthSequence {
  struct Run {
    char symbol;
    long long count;
  };
  std::vector<Run> runs;

  long long total_length() const {
    long long t = 0;
    for (const auto& r : runs) t += r.count;
    return t;
  }
};

// Error-free run distribution Pr(0^m | 1) for m = 0..m_max.
// values[0] = 1 and the table is non-increasing.
struct EfrdTable {
  std::vector<double> values;
  long long sample_count = 0;

  int m_max() const { return static_cast<int>(values.size()) - 1; }

  // Table value, 0 beyond m_max.
  double at(int m) const {
    return m <= m_max() ? values[m] : 0.0;
  }
};

// Maximal-run encoding; throws UnknownSymbol (with position) for characters
// outside the alphabet.
RunLengthSequence encode(const std::string& sequence,
                         const SymbolAlphabet& alphabet);

std::string decode(const RunLengthSequence& runs);

// Fraction of "1" symbols. Binary alphabet only.
double error_probability(const RunLengthSequence& runs);

// Pr(0^m | 1): for every "1" not at the final position, the gap is the count
// of consecutive "0"s immediately following it; values[m] is the fraction of
// gaps >= m. Computed directly on the run-length pairs.
// Throws NoConditioningEvents if no interior "1" exists.
EfrdTable efrd(const RunLengthSequence& runs);

// Max |a - b| over m = 0..m_limit, values beyond each table's m_max taken as 0.
double efrd_max_deviation(const EfrdTable& a, const EfrdTable& b, int m_limit);

// Text form `sym^count` tokens, whitespace separated (e.g. "0^3 1^2").
std::string format_rle_text(const RunLengthSequence& runs);
RunLengthSequence parse_rle_text(const std::string& text,
                                 const SymbolAlphabet& alphabet);

}  // namespace bdmm

#endif  // BDMM_RLE_HPP
