#include "bdmm/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace bdmm {

namespace {

constexpr double kDiagZeroTol = 1e-10;    // within-symbol off-diagonal tolerance
constexpr double kClampTol = 1e-10;       // negative round-off clamp
constexpr double kEigenGapTol = 1e-8;     // repeated-eigenvalue rejection
constexpr double kCondLimit = 1e12;

bool is_exactly_diagonal(const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

// Eigendecomposition products for one within-symbol block: eigenvalues sorted
// descending and the row-normalized inverse-eigenvector matrix W = C^-1 V.
// Diagonal blocks short-circuit to W = I so that block-diagonal inputs are
// fixed points of the construction.
struct BlockTransform {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd w;
  Eigen::VectorXd c_diag;  // row sums of V before normalization
};

BlockTransform block_transform(const Eigen::MatrixXd& block) {
  const int n = static_cast<int>(block.rows());
  BlockTransform out;
  if (is_exactly_diagonal(block)) {
    out.eigenvalues = block.diagonal();
    out.w = Eigen::MatrixXd::Identity(n, n);
    out.c_diag = Eigen::VectorXd::Ones(n);
    return out;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(block);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("eigendecomposition did not converge");
  Eigen::VectorXcd vals = solver.eigenvalues();
  for (int i = 0; i < n; ++i)
    if (std::abs(vals(i).imag()) > 1e-10)
      throw ComplexEigenvalues("within-symbol block has complex eigenvalues");

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return vals(a).real() > vals(b).real();
  });

  Eigen::MatrixXd e(n, n);
  out.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) {
    out.eigenvalues(i) = vals(order[static_cast<size_t>(i)]).real();
    e.col(i) = solver.eigenvectors().col(order[static_cast<size_t>(i)]).real();
  }

  Eigen::MatrixXd v = e.inverse();
  // Scale eigenvectors so every row of V has a positive sum, then normalize
  // rows; C holds the row sums.
  out.c_diag.resize(n);
  for (int i = 0; i < n; ++i) {
    double rs = v.row(i).sum();
    if (rs < 0.0) {
      v.row(i) *= -1.0;
      rs = -rs;
    }
    out.c_diag(i) = rs;
  }
  out.w.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (out.c_diag(i) == 0.0)
      throw NumericalFailure("normalizer C is exactly singular");
    out.w.row(i) = v.row(i) / out.c_diag(i);
  }
  return out;
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

ConditionEntry condition_i(const PartitionedModel& model) {
  ConditionEntry e{"i", true, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < model.partition.blocks(); ++k) {
    const Eigen::MatrixXd block = model.block(k, k);
    for (int j = 0; j < block.rows(); ++j) {
      const double slack =
          block(j, j) - (block.row(j).sum() - block(j, j));
      if (slack < e.margin) {
        e.margin = slack;
        e.block = k;
        e.row = j;
      }
    }
  }
  if (e.margin < 0.0) {
    e.pass = false;
    std::ostringstream os;
    os << "diagonal dominance fails in block " << e.block << " row " << e.row;
    e.detail = os.str();
  }
  return e;
}

ConditionEntry condition_ii(const PartitionedModel& model) {
  ConditionEntry e{"ii", true, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < model.partition.blocks(); ++k) {
    const Eigen::MatrixXd block = model.block(k, k);
    const int n = static_cast<int>(block.rows());
    for (int s = 0; s < n; ++s) {
      for (int r = 0; r < n; ++r) {
        if (block(s, s) <= block(r, r)) continue;  // ties satisfy the condition
        const double rhs =
            block(s, s) - (block.row(s).sum() - block(s, s));
        const double slack = rhs - block.row(r).sum();
        if (slack < e.margin) {
          e.margin = slack;
          e.block = k;
          e.row = r;
          e.col = s;
        }
      }
    }
  }
  if (e.margin < 0.0) {
    e.pass = false;
    std::ostringstream os;
    os << "rows " << e.row << " and " << e.col << " of block " << e.block
       << " are not distinct enough";
    e.detail = os.str();
  }
  // Repeated eigenvalues defeat the uniqueness of the eigenvector basis.
  for (int k = 0; k < model.partition.blocks(); ++k) {
    try {
      const BlockTransform bt = block_transform(model.block(k, k));
      Eigen::VectorXd vals = bt.eigenvalues;
      std::sort(vals.data(), vals.data() + vals.size());
      for (int i = 0; i + 1 < vals.size(); ++i) {
        const double gap = vals(i + 1) - vals(i);
        if (gap < kEigenGapTol) {
          e.pass = false;
          e.block = k;
          e.margin = std::min(e.margin, gap);
          e.detail = "eigenvalue gap below 1e-8 in block " +
                     std::to_string(k);
        }
      }
    } catch (const ComplexEigenvalues&) {
      e.pass = false;
      e.block = k;
      e.detail = "complex eigenvalues in block " + std::to_string(k);
    } catch (const NumericalFailure&) {
      // reported by condition iii/v
    }
  }
  return e;
}

ConditionEntry condition_iii(const PartitionedModel& model) {
  ConditionEntry e{"iii", true, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < model.partition.blocks(); ++k) {
    try {
      const BlockTransform bt = block_transform(model.block(k, k));
      const double cmin = bt.c_diag.cwiseAbs().minCoeff();
      const double cmax = bt.c_diag.cwiseAbs().maxCoeff();
      const double cond = cmin == 0.0
                              ? std::numeric_limits<double>::infinity()
                              : cmax / cmin;
      if (cmin < e.margin) {
        e.margin = cmin;
        e.block = k;
      }
      if (cmin == 0.0 || cond > kCondLimit) {
        e.pass = false;
        e.block = k;
        e.detail = "normalizer C is singular or ill-conditioned in block " +
                   std::to_string(k);
      }
    } catch (const Error&) {
      e.pass = false;
      e.block = k;
      e.margin = 0.0;
      e.detail = "transform construction failed in block " + std::to_string(k);
    }
  }
  return e;
}

ConditionEntry condition_v(const PartitionedModel& model) {
  ConditionEntry e{"v", true, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < model.partition.blocks(); ++k) {
    const Eigen::MatrixXd block = model.block(k, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
    const double smin = svd.singularValues().minCoeff();
    if (smin < e.margin) {
      e.margin = smin;
      e.block = k;
    }
    if (smin < 1e-12 || condition_number(block) > kCondLimit) {
      e.pass = false;
      e.block = k;
      e.detail = "within-symbol block " + std::to_string(k) + " is singular";
    }
  }
  return e;
}

struct RawConstruction {
  Eigen::MatrixXd w;
  Eigen::MatrixXd w_inv;
  Eigen::MatrixXd lambda;
  Eigen::RowVectorXd pi;
  std::vector<Eigen::VectorXd> eigenvalues;
};

RawConstruction build_raw(const PartitionedModel& model) {
  const int n = model.num_states();
  RawConstruction out;
  out.w = Eigen::MatrixXd::Zero(n, n);
  out.w_inv = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < model.partition.blocks(); ++k) {
    const BlockTransform bt = block_transform(model.block(k, k));
    const int off = model.partition.offset(k);
    const int nk = model.partition.counts[k];
    if (condition_number(bt.w) > kCondLimit)
      throw NumericalFailure("transform block is ill-conditioned");
    out.w.block(off, off, nk, nk) = bt.w;
    out.w_inv.block(off, off, nk, nk) = bt.w.inverse();
    out.eigenvalues.push_back(bt.eigenvalues);
  }
  out.lambda = out.w * model.transition * out.w_inv;
  out.pi = model.stationary * out.w_inv;
  return out;
}

// Minimum entry over the off-diagonal blocks of the constructed lambda.
ConditionEntry condition_iv_from(const RawConstruction& raw,
                                 const PartitionedModel& model) {
  ConditionEntry e{"iv", true, std::numeric_limits<double>::infinity()};
  for (int k = 0; k < model.partition.blocks(); ++k) {
    for (int l = 0; l < model.partition.blocks(); ++l) {
      if (k == l) continue;
      const auto blk = raw.lambda.block(
          model.partition.offset(k), model.partition.offset(l),
          model.partition.counts[k], model.partition.counts[l]);
      for (int i = 0; i < blk.rows(); ++i)
        for (int j = 0; j < blk.cols(); ++j)
          if (blk(i, j) < e.margin) {
            e.margin = blk(i, j);
            e.block = k;
            e.row = i;
            e.col = j;
          }
    }
  }
  if (e.margin < -kClampTol) {
    e.pass = false;
    std::ostringstream os;
    os << "constructed off-diagonal block (" << e.block << ") entry ("
       << e.row << "," << e.col << ") = " << e.margin << " is negative";
    e.detail = os.str();
  }
  return e;
}

}  // namespace

const ConditionEntry& ConditionReport::entry(const std::string& id) const {
  for (const auto& e : entries)
    if (e.id == id) return e;
  throw DimensionMismatch("unknown condition id " + id);
}

ConditionReport check_conditions(const PartitionedModel& model) {
  // Dimension errors throw inside validate_model; structural violations do
  // not block condition evaluation.
  (void)validate_model(model);

  ConditionReport report;
  report.entries[0] = condition_i(model);
  report.entries[1] = condition_ii(model);
  report.entries[2] = condition_iii(model);
  report.entries[4] = condition_v(model);

  // Condition iv is evaluated on the constructed result.
  try {
    const RawConstruction raw = build_raw(model);
    report.entries[3] = condition_iv_from(raw, model);
  } catch (const ComplexEigenvalues& ex) {
    report.entries[3] = {"iv", false, 0.0, -1, -1, -1, ex.what()};
  } catch (const NumericalFailure& ex) {
    report.entries[3] = {"iv", false, 0.0, -1, -1, -1, ex.what()};
  }
  return report;
}

EquivalentModel construct_equivalent(const PartitionedModel& model,
                                     const ConstructOptions& opts) {
  if (opts.enforce_conditions) {
    ConditionReport report = check_conditions(model);
    for (const auto& id : {"i", "ii", "iii", "v"}) {
      if (!report.entry(id).pass)
        throw ConditionViolation(
            std::string("admissibility condition ") + id + " fails", report);
    }
    if (!report.entry("iv").pass)
      throw ConditionViolation("admissibility condition iv fails", report);
  }

  RawConstruction raw = build_raw(model);
  const int n = model.num_states();

  // Postconditions: zero the within-symbol off-diagonals, clamp round-off
  // negatives, renormalize, and verify the result numerically.
  for (int k = 0; k < model.partition.blocks(); ++k) {
    const int off = model.partition.offset(k);
    const int nk = model.partition.counts[k];
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nk; ++j) {
        if (i == j) continue;
        if (std::abs(raw.lambda(off + i, off + j)) > kDiagZeroTol)
          throw NonStochasticResult(
              "within-symbol block is not diagonal after transform");
        raw.lambda(off + i, off + j) = 0.0;
      }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (raw.lambda(i, j) < -kClampTol) {
        std::ostringstream os;
        os << "constructed entry (" << i << "," << j << ") = "
           << raw.lambda(i, j) << " below clamp tolerance";
        if (opts.enforce_conditions) {
          ConditionReport report = check_conditions(model);
          throw ConditionViolation(os.str(), report);
        }
        throw NonStochasticResult(os.str());
      }
      if (raw.lambda(i, j) < 0.0) raw.lambda(i, j) = 0.0;
    }
    const double row_sum = raw.lambda.row(i).sum();
    if (std::abs(row_sum - 1.0) > kClampTol)
      throw NonStochasticResult("constructed row does not sum to 1");
    raw.lambda.row(i) /= row_sum;
  }

  for (int i = 0; i < n; ++i) {
    if (raw.pi(i) < -kClampTol)
      throw NonStochasticResult("transported stationary vector is negative");
    if (raw.pi(i) < 0.0) raw.pi(i) = 0.0;
  }
  raw.pi /= raw.pi.sum();
  if ((raw.pi * raw.lambda - raw.pi).lpNorm<Eigen::Infinity>() > kClampTol)
    throw NonStochasticResult("pi is not stationary for the constructed model");
  if ((raw.w * Eigen::VectorXd::Ones(n) - Eigen::VectorXd::Ones(n))
          .lpNorm<Eigen::Infinity>() > kClampTol)
    throw NonStochasticResult("transform rows do not sum to 1");

  EquivalentModel out;
  out.model = model;
  out.model.transition = raw.lambda;
  out.model.stationary = raw.pi;
  out.model.kind = ModelKind::BlockDiagonal;
  out.transform.matrix = raw.w;
  out.transform.eigenvalues = raw.eigenvalues;
  return out;
}

double sequence_probability(const PartitionedModel& model,
                            const std::vector<int>& symbols) {
  const int n = model.num_states();
  Eigen::RowVectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = model.partition.symbol_of_state(i) == symbols.front()
               ? model.stationary(i)
               : 0.0;
  for (size_t t = 1; t < symbols.size(); ++t) {
    Eigen::RowVectorXd next = v * model.transition;
    for (int i = 0; i < n; ++i)
      if (model.partition.symbol_of_state(i) != symbols[t]) next(i) = 0.0;
    v = next;
  }
  return v.sum();
}

double verify_equivalence(const PartitionedModel& a, const PartitionedModel& b,
                          int max_len) {
  if (a.alphabet != b.alphabet)
    throw AlphabetMismatch("models have different alphabets");
  const int d = a.alphabet.size();
  if (max_len > 12 || std::pow(d, max_len) > (1 << 24))
    throw DimensionMismatch("max_len too large for enumeration");

  double worst = 0.0;
  std::vector<int> symbols;
  for (int len = 1; len <= max_len; ++len) {
    symbols.assign(static_cast<size_t>(len), 0);
    while (true) {
      const double pa = sequence_probability(a, symbols);
      const double pb = sequence_probability(b, symbols);
      const double rel = std::abs(pa - pb) / std::max(pa, 1e-300);
      worst = std::max(worst, rel);
      // next sequence in lexicographic order
      int pos = len - 1;
      while (pos >= 0 && symbols[static_cast<size_t>(pos)] == d - 1) {
        symbols[static_cast<size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++symbols[static_cast<size_t>(pos)];
    }
  }
  return worst;
}

}  // namespace bdmm
