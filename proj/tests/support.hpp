// Shared fixtures, random model generators, and independent oracles for the
// test suites. The oracles here are deliberately naive (per-position products,
// per-position counting) so they stay independent of the library recursions.

#ifndef BDMM_TESTS_SUPPORT_HPP
#define BDMM_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdmm/equivalence.hpp"
#include "bdmm/model.hpp"
#include "bdmm/rle.hpp"

namespace bdmm_tests {

inline bdmm::PartitionedModel make_model(
    const std::string& alphabet, const std::vector<int>& partition,
    const std::vector<std::vector<double>>& rows,
    bdmm::ModelKind kind = bdmm::ModelKind::General) {
  bdmm::PartitionedModel m;
  m.alphabet.symbols = alphabet;
  m.partition.counts = partition;
  const int n = static_cast<int>(rows.size());
  m.transition.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m.transition(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  try {
    m.stationary = bdmm::solve_stationary(m.transition);
  } catch (const bdmm::Error&) {
    // reducible fixtures (e.g. absorbing chains) set stationary themselves
    m.stationary = Eigen::RowVectorXd::Constant(n, 1.0 / n);
  }
  m.kind = kind;
  return m;
}

// Day-one morning converged fixture (states 1,2 emit '0', state 3 emits '1');
// mirrors data/day1_morning.converged.json.
inline bdmm::PartitionedModel day1_morning_converged() {
  return make_model("01", {2, 1},
                    {{0.9683, 0.0, 0.0317},
                     {0.0, 0.9205, 0.0795},
                     {0.1273, 0.8188, 0.0539}},
                    bdmm::ModelKind::BlockDiagonal);
}

// Day-one morning initial estimates; mirrors data/day1_morning.init.json.
inline bdmm::PartitionedModel day1_morning_init() {
  return make_model("01", {2, 1},
                    {{0.90, 0.0, 0.10},
                     {0.0, 0.92, 0.08},
                     {0.12, 0.70, 0.18}},
                    bdmm::ModelKind::BlockDiagonal);
}

// The worked run-length example sequence from the modeling write-up.
inline std::string sample_error_sequence() {
  return "00011000000111110110010000011001000";
}

// Random binary block-diagonal model with n0 + n1 states. Diagonals are
// spread out and every structurally-allowed entry is positive, so the chain
// is regular and EM never starves.
inline bdmm::PartitionedModel random_block_diagonal_model(std::mt19937_64& rng,
                                                          int n0, int n1) {
  const int n = n0 + n1;
  std::uniform_real_distribution<double> jitter(0.0, 0.01);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  auto fill_block = [&](int off, int nk, int other_off, int other_n,
                        double base) {
    for (int i = 0; i < nk; ++i) {
      const double diag = base - 0.04 * i + jitter(rng);
      t(off + i, off + i) = diag;
      // distribute the escape mass over the other symbol's states
      std::vector<double> w(static_cast<size_t>(other_n));
      double ws = 0.0;
      for (auto& x : w) {
        x = 0.1 + jitter(rng);
        ws += x;
      }
      for (int j = 0; j < other_n; ++j)
        t(off + i, other_off + j) = (1.0 - diag) * w[static_cast<size_t>(j)] / ws;
    }
  };
  fill_block(0, n0, n0, n1, 0.93);
  fill_block(n0, n1, 0, n0, 0.55);

  bdmm::PartitionedModel m;
  m.alphabet.symbols = "01";
  m.partition.counts = {n0, n1};
  m.transition = t;
  m.stationary = bdmm::solve_stationary(t);
  m.kind = bdmm::ModelKind::BlockDiagonal;
  return m;
}

// Random binary general model passing admissibility conditions i-v:
// strongly diagonally dominant within-symbol blocks with well-separated
// diagonals and escape masses ordered so the pairwise row inequality holds.
inline bdmm::PartitionedModel random_admissible_model(std::mt19937_64& rng,
                                                      int n0, int n1) {
  const int n = n0 + n1;
  std::uniform_real_distribution<double> jitter(0.0, 0.002);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);

  auto fill_block = [&](int off, int nk, int other_off, int other_n) {
    // escape masses spaced by >= 0.02; the state with the smallest escape
    // mass has the largest diagonal, which is what condition ii needs.
    std::vector<double> escape(static_cast<size_t>(nk));
    for (int i = 0; i < nk; ++i)
      escape[static_cast<size_t>(i)] = 0.05 + 0.025 * i + jitter(rng);
    for (int i = 0; i < nk; ++i) {
      double within_off = 0.0;
      for (int j = 0; j < nk; ++j) {
        if (i == j) continue;
        t(off + i, off + j) = 0.0004 + jitter(rng) / 4.0;
        within_off += t(off + i, off + j);
      }
      const double g = escape[static_cast<size_t>(i)];
      t(off + i, off + i) = 1.0 - g - within_off;
      for (int j = 0; j < other_n; ++j)
        t(off + i, other_off + j) = g / other_n * (1.0 + (j % 2 ? 0.1 : -0.1));
      // re-balance the row exactly
      double rs = t.row(off + i).sum();
      t(off + i, other_off) += 1.0 - rs;
    }
  };
  fill_block(0, n0, n0, n1);
  fill_block(n0, n1, 0, n0);

  bdmm::PartitionedModel m;
  m.alphabet.symbols = "01";
  m.partition.counts = {n0, n1};
  m.transition = t;
  m.stationary = bdmm::solve_stationary(t);
  m.kind = bdmm::ModelKind::General;
  return m;
}

inline std::string random_sequence(std::mt19937_64& rng, long long length,
                                   double p_one = 0.3) {
  std::bernoulli_distribution one(p_one);
  std::string s;
  s.reserve(static_cast<size_t>(length));
  for (long long i = 0; i < length; ++i) s.push_back(one(rng) ? '1' : '0');
  return s;
}

// Likelihood by the per-position masked product, long double, no scaling.
// Independent of the library's forward recursions; only for short sequences.
inline long double chain_probability(const bdmm::PartitionedModel& model,
                                     const std::string& seq) {
  const int n = model.num_states();
  std::vector<long double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<size_t>(i)] =
        model.symbol_of_state(i) == seq[0]
            ? static_cast<long double>(model.stationary(i))
            : 0.0L;
  for (size_t t = 1; t < seq.size(); ++t) {
    std::vector<long double> next(static_cast<size_t>(n), 0.0L);
    for (int j = 0; j < n; ++j) {
      if (model.symbol_of_state(j) != seq[t]) continue;
      for (int i = 0; i < n; ++i)
        next[static_cast<size_t>(j)] +=
            v[static_cast<size_t>(i)] *
            static_cast<long double>(model.transition(i, j));
    }
    v = next;
  }
  long double p = 0.0L;
  for (long double x : v) p += x;
  return p;
}

// EFRD by naive per-position counting on the decoded string.
inline bdmm::EfrdTable efrd_by_counting(const std::string& seq) {
  std::vector<long long> gaps;
  const long long t_len = static_cast<long long>(seq.size());
  for (long long t = 0; t < t_len - 1; ++t) {
    if (seq[static_cast<size_t>(t)] != '1') continue;
    long long g = 0;
    while (t + 1 + g < t_len && seq[static_cast<size_t>(t + 1 + g)] == '0')
      ++g;
    gaps.push_back(g);
  }
  long long m_max = 0;
  for (long long g : gaps) m_max = std::max(m_max, g);
  bdmm::EfrdTable table;
  table.sample_count = static_cast<long long>(gaps.size());
  table.values.resize(static_cast<size_t>(m_max) + 1);
  for (long long m = 0; m <= m_max; ++m) {
    long long count = 0;
    for (long long g : gaps)
      if (g >= m) ++count;
    table.values[static_cast<size_t>(m)] =
        static_cast<double>(count) / static_cast<double>(gaps.size());
  }
  return table;
}

}  // namespace bdmm_tests

#endif  // BDMM_TESTS_SUPPORT_HPP
