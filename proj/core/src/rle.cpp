#include "bdmm/rle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bdmm/model.hpp"

namespace bdmm {

RunLengthSequence encode(const std::string& sequence,
                         const SymbolAlphabet& alphabet) {
  if (sequence.empty()) throw DimensionMismatch("cannot encode empty sequence");
  RunLengthSequence out;
  for (long long t = 0; t < static_cast<long long>(sequence.size()); ++t) {
    const char s = sequence[static_cast<size_t>(t)];
    if (alphabet.index_of(s) < 0)
      throw UnknownSymbol(std::string("unknown symbol '") + s +
                              "' at position " + std::to_string(t),
                          t);
    if (!out.runs.empty() && out.runs.back().symbol == s)
      ++out.runs.back().count;
    else
      out.runs.push_back({s, 1});
  }
  return out;
}

std::string decode(const RunLengthSequence& runs) {
  std::string out;
  out.reserve(static_cast<size_t>(runs.total_length()));
  for (const auto& r : runs.runs)
    out.append(static_cast<size_t>(r.count), r.symbol);
  return out;
}

double error_probability(const RunLengthSequence& runs) {
  long long ones = 0, total = 0;
  for (const auto& r : runs.runs) {
    if (r.symbol != '0' && r.symbol != '1')
      throw NonBinaryAlphabet("error_probability requires a binary alphabet");
    if (r.symbol == '1') ones += r.count;
    total += r.count;
  }
  if (total == 0) throw DimensionMismatch("empty sequence");
  return static_cast<double>(ones) / static_cast<double>(total);
}

EfrdTable efrd(const RunLengthSequence& runs) {
  // Conditioning events: every '1' followed by at least one symbol. Within a
  // run of k ones, the first k-1 have gap 0; the last one's gap is the length
  // of the following zero run (or it is excluded when the run ends the
  // sequence).
  long long samples = 0;
  long long zero_gap_events = 0;  // gaps of exactly 0
  std::vector<std::pair<long long, long long>> gaps;  // (gap, count)
  const auto& rs = runs.runs;
  for (size_t c = 0; c < rs.size(); ++c) {
    if (rs[c].symbol != '0' && rs[c].symbol != '1')
      throw NonBinaryAlphabet("efrd requires a binary alphabet");
    if (rs[c].symbol != '1') continue;
    zero_gap_events += rs[c].count - 1;
    samples += rs[c].count - 1;
    if (c + 1 < rs.size()) {
      gaps.emplace_back(rs[c + 1].count, 1);
      samples += 1;
    }
  }
  if (samples == 0)
    throw NoConditioningEvents("no error position is followed by a symbol");

  long long m_max = 0;
  for (const auto& [g, cnt] : gaps) m_max = std::max(m_max, g);

  // values[m] = fraction of gaps >= m; count down from the largest gap.
  std::vector<long long> at_least(static_cast<size_t>(m_max) + 1, 0);
  at_least[0] = samples;
  for (const auto& [g, cnt] : gaps)
    for (long long m = 1; m <= g; ++m) at_least[static_cast<size_t>(m)] += cnt;

  EfrdTable table;
  table.sample_count = samples;
  table.values.resize(static_cast<size_t>(m_max) + 1);
  for (size_t m = 0; m < table.values.size(); ++m)
    table.values[m] =
        static_cast<double>(at_least[m]) / static_cast<double>(samples);
  return table;
}

double efrd_max_deviation(const EfrdTable& a, const EfrdTable& b, int m_limit) {
  double dev = 0.0;
  for (int m = 0; m <= m_limit; ++m)
    dev = std::max(dev, std::abs(a.at(m) - b.at(m)));
  return dev;
}

std::string format_rle_text(const RunLengthSequence& runs) {
  std::ostringstream os;
  for (size_t i = 0; i < runs.runs.size(); ++i) {
    if (i) os << ' ';
    os << runs.runs[i].symbol << '^' << runs.runs[i].count;
  }
  return os.str();
}

RunLengthSequence parse_rle_text(const std::string& text,
                                 const SymbolAlphabet& alphabet) {
  RunLengthSequence out;
  std::istringstream is(text);
  std::string token;
  while (is >> token) {
    const auto caret = token.find('^');
    if (caret != 1 || token.size() < 3)
      throw IoError("malformed run token '" + token + "'");
    const char sym = token[0];
    if (alphabet.index_of(sym) < 0)
      throw UnknownSymbol("unknown symbol in run token '" + token + "'", -1);
    long long count = 0;
    try {
      count = std::stoll(token.substr(2));
    } catch (const std::exception&) {
      throw IoError("malformed run count in token '" + token + "'");
    }
    if (count < 1) throw IoError("run count must be >= 1 in '" + token + "'");
    if (!out.runs.empty() && out.runs.back().symbol == sym)
      out.runs.back().count += count;  // merge non-maximal input runs
    else
      out.runs.push_back({sym, count});
  }
  if (out.runs.empty()) throw IoError("empty run-length text");
  return out;
}

}  // namespace bdmm
