#ifndef BDMM_MODEL_HPP
#define BDMM_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdmm/errors.hpp"

namespace bdmm {

// Ordered set of observed symbols. Each symbol is a single ASCII character;
// the order fixes the block order of every partitioned matrix.
struct SymbolAlphabet {
  std::string symbols;  // distinct characters, size d >= 2

  int size() const { return static_cast<int>(symbols.size()); }

  // Index of a symbol, or -1 if it is not in the alphabet.
  int index_of(char s) const {
    auto pos = symbols.find(s);
    return pos == std::string::npos ? -1 : static_cast<int>(pos);
  }

  bool operator==(const SymbolAlphabet&) const = default;
};

// Number of states per symbol. State indices 0..n(0)-1 emit symbol 0,
// the next n(1) states emit symbol 1, and so on.
struct StatePartition {
  std::vector<int> counts;

  int blocks() const { return static_cast<int>(counts.size()); }

  int total() const {
    int n = 0;
    for (int c : counts) n += c;
    return n;
  }

  // First state index of block k.
  int offset(int k) const {
    int n = 0;
    for (int i = 0; i < k; ++i) n += counts[i];
    return n;
  }

  // Symbol block that state s belongs to.
  int symbol_of_state(int s) const {
    int n = 0;
    for (int k = 0; k < blocks(); ++k) {
      n += counts[k];
      if (s < n) return k;
    }
    return -1;
  }

  bool operator==(const StatePartition&) const = default;
};

enum class ModelKind { General, BlockDiagonal };

// A state transition matrix with states grouped by emitted symbol, together
// with its stationary distribution. Emission is deterministic: the state's
// block decides the symbol.
struct PartitionedModel {
  SymbolAlphabet alphabet;
  StatePartition partition;
  Eigen::MatrixXd transition;      // N x N, row stochastic
  Eigen::RowVectorXd stationary;   // length N, stationary . transition = stationary
  ModelKind kind = ModelKind::General;

  int num_states() const { return partition.total(); }

  // Block (k, l) of the transition matrix, n(k) x n(l).
  Eigen::Block<const Eigen::MatrixXd> block(int k, int l) const {
    return transition.block(partition.offset(k), partition.offset(l),
                            partition.counts[k], partition.counts[l]);
  }

  char symbol_of_state(int s) const {
    return alphabet.symbols[partition.symbol_of_state(s)];
  }
};

// 0/1 emission matrix, d x N; row k marks the states emitting symbol k.
Eigen::MatrixXd emission_matrix(const SymbolAlphabet& alphabet,
                                const StatePartition& partition);

struct Violation {
  std::string kind;  // "row-sum", "negative-entry", "stationary", "off-diagonal"
  int row = -1;
  int col = -1;
  std::string detail;
};

// Checks every PartitionedModel invariant; empty result means valid.
// Throws DimensionMismatch if shapes are inconsistent with the partition.
std::vector<Violation> validate_model(const PartitionedModel& model);

// Stationary distribution of a row-stochastic matrix whose chain is regular.
// Solved via the linear system (I - T^t) with a normalization row.
// Throws NonStochastic / NotRegular.
Eigen::RowVectorXd stationary_distribution(const Eigen::MatrixXd& transition);

// Same linear solve without the regularity check; for periodic or reducible
// chains this still returns a fixed point when one exists.
Eigen::RowVectorXd solve_stationary(const Eigen::MatrixXd& transition);

// Samples a symbol sequence of the given length. The initial state is drawn
// from the stationary vector; identical (model, length, seed) reproduce an
// identical sequence. RNG: SplitMix64 (see rng.hpp).
std::string simulate(const PartitionedModel& model, long long length,
                     std::uint64_t seed);

}  // namespace bdmm

#endif  // BDMM_MODEL_HPP
