#ifndef BDMM_INFERENCE_HPP
#define BDMM_INFERENCE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdmm/model.hpp"
#include "bdmm/rle.hpp"

namespace bdmm {

// Per-forward-pass instrumentation. Both counts are functions of the run
// count C only: C-1 inter-block matrix-vector products and C diagonal-power
// evaluations.
struct FitCounters {
  long long inter_block_products = 0;
  long long diagonal_power_evals = 0;
};

// Scaled forward (and backward) state over the run-length sequence.
// Alpha and beta vectors live on the full state space but are exactly zero
// outside the active symbol's subspace. Each stored alpha sums to 1 on its
// subspace; the per-run scale is kept as lin_scale * exp(shift) so that very
// long runs cannot underflow.
struct ForwardBackwardState {
  std::vector<Eigen::VectorXd> alphas;
  std::vector<Eigen::VectorXd> betas;     // filled by backward()
  std::vector<double> lin_scale;          // per run, positive
  std::vector<double> shift;              // per run, log-space offset
  double log_likelihood = 0.0;
  FitCounters counters;
};

// Expected-count statistics for one EM iteration.
struct EStepResult {
  std::vector<int> run_block;               // symbol block per run
  std::vector<Eigen::VectorXd> gamma;       // per run, full N, posterior at run end
  std::vector<Eigen::MatrixXd> boundary;    // per c < C: n(mu_c) x n(mu_{c+1})
  Eigen::VectorXd self_counts;              // expected within-run self transitions
  double log_likelihood = 0.0;
  FitCounters counters;
};

struct FitConfig {
  double tol = 1e-6;
  int max_iter = 500;
  bool stationary_pi = false;  // re-estimate pi as the stationary vector of the
                               // new transition matrix instead of gamma_1
};

struct FitReport {
  PartitionedModel initial_model;
  PartitionedModel final_model;       // stationary field holds the true
                                      // stationary vector of the final matrix
  Eigen::RowVectorXd final_pi;        // EM-estimated initial distribution
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;            // "tolerance" | "max_iter"
  FitCounters counters_per_pass;
  long long forward_passes = 0;
};

// Run-length forward recursion on a block-diagonal model. Diagonal powers are
// n(mu) scalar exponentiations, never a dense matrix power.
// Throws ZeroProbabilitySequence if the sequence is impossible under the model.
ForwardBackwardState forward(const PartitionedModel& model,
                             const RunLengthSequence& runs);

// Backward recursion sharing the forward scale factors; after this call
// sum_i alpha_c(i) beta_c(i) = 1 for every run.
void backward(const PartitionedModel& model, const RunLengthSequence& runs,
              ForwardBackwardState& state);

EStepResult estep(const PartitionedModel& model, const RunLengthSequence& runs);

// Count-ratio re-estimation. Within-symbol off-diagonals are exactly zero in
// the result; rows are renormalized to sum 1. The returned model's stationary
// field holds the re-estimated initial distribution (gamma_1 by default).
// Throws StarvedState if a state's expected outgoing mass vanishes.
PartitionedModel mstep(const EStepResult& es, const PartitionedModel& model,
                       bool stationary_pi = false);

// Modified Baum-Welch: iterates estep/mstep until the relative log-likelihood
// improvement drops below tol or max_iter is reached.
// Throws NonMonotoneLikelihood if the EM monotonicity slack is violated.
FitReport fit(const PartitionedModel& initial, const RunLengthSequence& runs,
              const FitConfig& config = {});

// Conventional per-symbol scaled forward-backward on the unrolled sequence.
// Works for any model kind; O(T N^2). Serves as the cross-validation oracle
// for the run-length recursions.
struct ConventionalFB {
  double log_likelihood = 0.0;
  Eigen::VectorXd gamma_first;              // posterior at t = 1
  Eigen::MatrixXd expected_transitions;     // N x N, sum_t xi_t
  Eigen::VectorXd expected_out;             // sum_{t<T} gamma_t
};

ConventionalFB conventional_forward_backward(const PartitionedModel& model,
                                             const std::string& sequence);

// One conventional Baum-Welch iteration with within-symbol off-diagonals
// constrained to zero. Returns the updated model and the log-likelihood of
// the input model.
std::pair<PartitionedModel, double> conventional_bwa_step(
    const PartitionedModel& model, const std::string& sequence);

// Full conventional fit, for oracle comparisons.
FitReport conventional_fit(const PartitionedModel& initial,
                           const std::string& sequence,
                           const FitConfig& config = {});

}  // namespace bdmm

#endif  // BDMM_INFERENCE_HPP
