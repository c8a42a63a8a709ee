#include "bdmm/model.hpp"

#include <cmath>
#include <sstream>

#include "bdmm/rng.hpp"

namespace bdmm {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryTol = 1e-10;

void check_dimensions(const PartitionedModel& model) {
  const int n = model.partition.total();
  if (model.alphabet.size() < 2)
    throw DimensionMismatch("alphabet must have at least 2 symbols");
  if (model.partition.blocks() != model.alphabet.size())
    throw DimensionMismatch("partition block count != alphabet size");
  for (int c : model.partition.counts)
    if (c < 1) throw DimensionMismatch("every partition count must be >= 1");
  if (model.transition.rows() != n || model.transition.cols() != n) {
    std::ostringstream os;
    os << "transition is " << model.transition.rows() << "x"
       << model.transition.cols() << ", partition total is " << n;
    throw DimensionMismatch(os.str());
  }
  if (model.stationary.size() != n)
    throw DimensionMismatch("stationary vector length != state count");
}

}  // namespace

Eigen::MatrixXd emission_matrix(const SymbolAlphabet& alphabet,
                                const StatePartition& partition) {
  const int d = alphabet.size();
  const int n = partition.total();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, n);
  for (int s = 0; s < n; ++s) b(partition.symbol_of_state(s), s) = 1.0;
  return b;
}

std::vector<Violation> validate_model(const PartitionedModel& model) {
  check_dimensions(model);
  std::vector<Violation> out;
  const int n = model.num_states();

  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = model.transition(i, j);
      if (a < 0.0) {
        std::ostringstream os;
        os << "transition(" << i << "," << j << ") = " << a << " < 0";
        out.push_back({"negative-entry", i, j, os.str()});
      }
      row_sum += a;
    }
    if (std::abs(row_sum - 1.0) > kRowSumTol) {
      std::ostringstream os;
      os << "row " << i << " sums to " << row_sum;
      out.push_back({"row-sum", i, -1, os.str()});
    }
  }

  double pi_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (model.stationary(i) < 0.0)
      out.push_back({"stationary", -1, i, "negative stationary entry"});
    pi_sum += model.stationary(i);
  }
  if (std::abs(pi_sum - 1.0) > kStationaryTol)
    out.push_back({"stationary", -1, -1, "stationary entries do not sum to 1"});
  const double fixed_point_err =
      (model.stationary * model.transition - model.stationary)
          .lpNorm<Eigen::Infinity>();
  if (fixed_point_err > kStationaryTol) {
    std::ostringstream os;
    os << "stationary . transition deviates by " << fixed_point_err;
    out.push_back({"stationary", -1, -1, os.str()});
  }

  if (model.kind == ModelKind::BlockDiagonal) {
    for (int k = 0; k < model.partition.blocks(); ++k) {
      const int off = model.partition.offset(k);
      const int nk = model.partition.counts[k];
      for (int i = 0; i < nk; ++i)
        for (int j = 0; j < nk; ++j)
          if (i != j && model.transition(off + i, off + j) != 0.0) {
            std::ostringstream os;
            os << "block " << k << " off-diagonal (" << i << "," << j
               << ") is nonzero";
            out.push_back({"off-diagonal", off + i, off + j, os.str()});
          }
    }
  }
  return out;
}

Eigen::RowVectorXd stationary_distribution(const Eigen::MatrixXd& transition) {
  const int n = static_cast<int>(transition.rows());
  if (transition.cols() != n)
    throw DimensionMismatch("transition matrix must be square");
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (transition(i, j) < 0.0)
        throw NonStochastic("negative transition entry");
      row_sum += transition(i, j);
    }
    if (std::abs(row_sum - 1.0) > 1e-9)
      throw NonStochastic("row " + std::to_string(i) + " does not sum to 1");
  }

  // Regularity: some power <= N^2 of the support pattern is entrywise positive.
  Eigen::MatrixXd support =
      (transition.array() > 0.0).cast<double>().matrix();
  Eigen::MatrixXd reach = support;
  bool regular = false;
  for (int p = 1; p <= n * n; ++p) {
    if ((reach.array() > 0.0).all()) {
      regular = true;
      break;
    }
    reach = ((reach * support).array() > 0.0).cast<double>().matrix();
  }
  if (!regular)
    throw NotRegular("no matrix power up to N^2 is entrywise positive");

  return solve_stationary(transition);
}

Eigen::RowVectorXd solve_stationary(const Eigen::MatrixXd& transition) {
  const int n = static_cast<int>(transition.rows());
  // Solve v (I - T) = 0 with sum(v) = 1: transpose, replace the last
  // equation by the normalization row.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - transition.transpose();
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd v = a.colPivHouseholderQr().solve(b);

  for (int i = 0; i < n; ++i) {
    if (v(i) < -1e-12)
      throw NotRegular("stationary solve produced a negative entry");
    if (v(i) < 0.0) v(i) = 0.0;
  }
  v /= v.sum();
  Eigen::RowVectorXd pi = v.transpose();
  if ((pi * transition - pi).lpNorm<Eigen::Infinity>() > 1e-12)
    throw NumericalFailure("stationary fixed-point residual exceeds 1e-12");
  return pi;
}

std::string simulate(const PartitionedModel& model, long long length,
                     std::uint64_t seed) {
  if (length < 1) throw DimensionMismatch("sequence length must be >= 1");
  auto violations = validate_model(model);
  if (!violations.empty())
    throw NonStochastic("invalid model: " + violations.front().detail);

  const int n = model.num_states();
  SplitMix64 rng(seed);

  auto draw = [&](auto&& weight) {
    double u = rng.uniform();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += weight(i);
      if (u < acc) return i;
    }
    return n - 1;  // guard against round-off at the upper end
  };

  int state = draw([&](int i) { return model.stationary(i); });
  std::string out;
  out.reserve(static_cast<size_t>(length));
  for (long long t = 0; t < length; ++t) {
    out.push_back(model.symbol_of_state(state));
    if (t + 1 < length)
      state = draw([&](int i) { return model.transition(state, i); });
  }
  return out;
}

}  // namespace bdmm
