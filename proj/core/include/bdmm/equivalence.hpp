#ifndef BDMM_EQUIVALENCE_HPP
#define BDMM_EQUIVALENCE_HPP

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdmm/model.hpp"

namespace bdmm {

// One admissibility condition result. Conditions, per within-symbol diagonal
// block:
//   i   diagonal dominance A(j,j) >= sum of the row's off-diagonal entries
//   ii  pairwise row-distinctness inequality (plus eigenvalue-gap check)
//   iii the diagonal normalizer C is non-singular
//   iv  every off-diagonal block of the constructed equivalent model is
//       entrywise non-negative (evaluated by performing the construction)
//   v   the within-symbol block itself is non-singular
struct ConditionEntry {
  std::string id;       // "i".."v"
  bool pass = false;
  double margin = 0.0;  // minimal slack of the inequality
  int block = -1;       // offending symbol block, -1 if none
  int row = -1;
  int col = -1;
  std::string detail;
};

struct ConditionReport {
  std::array<ConditionEntry, 5> entries;

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }

  const ConditionEntry& entry(const std::string& id) const;
};

class ConditionViolation : public Error {
public:
  ConditionViolation(const std::string& msg, ConditionReport report)
      : Error(msg), report(std::move(report)) {}
  ConditionReport report;
};

// Block-diagonal eigenvector transform W with per-symbol eigenvalues.
// Every row of W sums to 1; each block is invertible.
struct TransformW {
  Eigen::MatrixXd matrix;                     // N x N, block diagonal
  std::vector<Eigen::VectorXd> eigenvalues;   // per symbol, sorted descending
};

struct EquivalentModel {
  PartitionedModel model;  // block-diagonal
  TransformW transform;
};

struct ConstructOptions {
  // When false, conditions i-iii and v are evaluated but not enforced;
  // the numeric postconditions on the result still are.
  bool enforce_conditions = true;
};

ConditionReport check_conditions(const PartitionedModel& model);

// Eigendecomposes each within-symbol block, assembles the row-normalized
// transform W, and returns the equivalent block-diagonal model
// L = W A W^-1 with stationary pi = p W^-1. Postconditions (row-stochastic,
// diagonal within-symbol blocks, pi L = pi, W 1 = 1) are verified before
// returning.
EquivalentModel construct_equivalent(const PartitionedModel& model,
                                     const ConstructOptions& opts = {});

// Max relative likelihood discrepancy |P(E|a) - P(E|b)| / max(P(E|a), 1e-300)
// over every symbol sequence of length 1..max_len.
double verify_equivalence(const PartitionedModel& a, const PartitionedModel& b,
                          int max_len);

// Likelihood of a short sequence by the direct forward product (no scaling).
// Symbols are alphabet indices.
double sequence_probability(const PartitionedModel& model,
                            const std::vector<int>& symbols);

}  // namespace bdmm

#endif  // BDMM_EQUIVALENCE_HPP
