#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "bdmm/equivalence.hpp"
#include "support.hpp"

using namespace bdmm;
using namespace bdmm_tests;

namespace {

// 3-state general model with the two-good-one-bad-state structure.
PartitionedModel fig_structured_model() {
  return make_model("01", {2, 1},
                    {{0.95, 0.0, 0.05},
                     {0.0, 0.92, 0.08},
                     {0.30, 0.60, 0.10}});
}

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
  std::vector<double> out;
  for (int i = 0; i < m.rows(); ++i)
    out.push_back(solver.eigenvalues()(i).real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("condition i margin on a dominant block") {
  auto m = make_model("01", {2, 1},
                      {{0.90, 0.05, 0.05},
                       {0.03, 0.92, 0.05},
                       {0.05, 0.05, 0.90}});
  const auto report = check_conditions(m);
  const auto& ci = report.entry("i");
  CHECK(ci.pass);
  CHECK(ci.margin == doctest::Approx(std::min(0.85, 0.89)).epsilon(1e-12));
  CHECK(ci.block == 0);
  CHECK(ci.row == 0);
}

TEST_CASE("condition i fails on a non-dominant block") {
  auto m = make_model("01", {2, 1},
                      {{0.40, 0.55, 0.05},
                       {0.55, 0.40, 0.05},
                       {0.45, 0.45, 0.10}});
  const auto report = check_conditions(m);
  const auto& ci = report.entry("i");
  CHECK_FALSE(ci.pass);
  CHECK(ci.block == 0);
  CHECK(ci.row == 0);
}

TEST_CASE("all five conditions pass for a diagonal-block model; W = I") {
  const auto m = fig_structured_model();
  const auto report = check_conditions(m);
  for (const auto& e : report.entries) {
    INFO("condition ", e.id, ": ", e.detail);
    CHECK(e.pass);
  }
  const auto eq = construct_equivalent(m);
  CHECK((eq.transform.matrix - Eigen::MatrixXd::Identity(3, 3))
            .lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((eq.model.transition - m.transition).lpNorm<Eigen::Infinity>() <=
        1e-15);
}

TEST_CASE("constructed diagonal block holds the eigenvalues of A00") {
  // closed-form 2x2 eigenvalues: 0.94 +- sqrt(0.0001 + 0.0002)
  const double mean = (0.93 + 0.95) / 2.0;
  const double disc = std::sqrt(0.0001 + 0.02 * 0.01);
  const double lo = mean - disc, hi = mean + disc;

  auto m = make_model("01", {2, 1},
                      {{0.93, 0.02, 0.05},
                       {0.01, 0.95, 0.04},
                       {0.45, 0.45, 0.10}});
  // this block violates the literal pairwise-row inequality (condition ii)
  // yet the construction is still well defined; run it unenforced
  const auto eq = construct_equivalent(m, {.enforce_conditions = false});
  CHECK(eq.transform.eigenvalues[0](0) == doctest::Approx(hi).epsilon(1e-12));
  CHECK(eq.transform.eigenvalues[0](1) == doctest::Approx(lo).epsilon(1e-12));
  CHECK(eq.model.transition(0, 0) == doctest::Approx(hi).epsilon(1e-12));
  CHECK(eq.model.transition(1, 1) == doctest::Approx(lo).epsilon(1e-12));
  CHECK(eq.model.transition(0, 1) == 0.0);
  CHECK(eq.model.transition(1, 0) == 0.0);
}

TEST_CASE("likelihood equivalence P(E|A) = P(E|Lambda) by enumeration") {
  std::mt19937_64 rng(314);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_admissible_model(rng, 2, trial % 2 ? 1 : 2);
    REQUIRE(check_conditions(a).all_pass());
    const auto eq = construct_equivalent(a);
    CHECK(verify_equivalence(a, eq.model, 8) <= 1e-9);
  }
}

TEST_CASE("verify_equivalence is zero for identical models") {
  const auto m = fig_structured_model();
  CHECK(verify_equivalence(m, m, 6) == 0.0);
}

TEST_CASE("verify_equivalence separates independently drawn models") {
  std::mt19937_64 rng(271);
  const auto a = random_admissible_model(rng, 2, 1);
  const auto b = random_admissible_model(rng, 2, 1);
  CHECK(verify_equivalence(a, b, 6) > 1e-3);
}

TEST_CASE("verify_equivalence rejects mismatched alphabets") {
  auto a = fig_structured_model();
  auto b = fig_structured_model();
  b.alphabet.symbols = "ab";
  CHECK_THROWS_AS(verify_equivalence(a, b, 4), AlphabetMismatch);
}

TEST_CASE("idempotence: a block-diagonal model is its own equivalent") {
  const auto m = day1_morning_converged();
  const auto eq = construct_equivalent(m);
  CHECK((eq.model.transition - m.transition).lpNorm<Eigen::Infinity>() <=
        1e-10);
  CHECK((eq.transform.matrix - Eigen::MatrixXd::Identity(3, 3))
            .lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("construction postconditions on random admissible models") {
  std::mt19937_64 rng(999);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_admissible_model(rng, 1 + trial % 3, 1 + trial % 2);
    const auto eq = construct_equivalent(a);
    const int n = a.num_states();

    // row sums and non-negativity
    for (int i = 0; i < n; ++i) {
      CHECK(eq.model.transition.row(i).sum() ==
            doctest::Approx(1.0).epsilon(1e-10));
      CHECK(eq.model.transition.row(i).minCoeff() >= 0.0);
    }
    // W rows sum to 1
    CHECK((eq.transform.matrix * Eigen::VectorXd::Ones(n) -
           Eigen::VectorXd::Ones(n))
              .lpNorm<Eigen::Infinity>() <= 1e-10);
    // stationarity transport
    CHECK((eq.model.stationary * eq.model.transition - eq.model.stationary)
              .lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK(eq.model.stationary.sum() == doctest::Approx(1.0).epsilon(1e-10));
    // spectrum preservation under the similarity transform
    const auto ev_a = sorted_eigenvalues(a.transition);
    const auto ev_l = sorted_eigenvalues(eq.model.transition);
    for (size_t i = 0; i < ev_a.size(); ++i)
      CHECK(ev_a[i] == doctest::Approx(ev_l[i]).epsilon(1e-9));
    // within-symbol blocks exactly diagonal
    CHECK(validate_model(eq.model).empty());
  }
}

TEST_CASE("construct_equivalent rejects inadmissible input with a report") {
  auto m = make_model("01", {2, 1},
                      {{0.40, 0.55, 0.05},
                       {0.55, 0.40, 0.05},
                       {0.45, 0.45, 0.10}});
  try {
    construct_equivalent(m);
    FAIL("expected ConditionViolation");
  } catch (const ConditionViolation& ex) {
    CHECK_FALSE(ex.report.entry("i").pass);
  }
}

TEST_CASE("repeated eigenvalues are rejected as condition ii failures") {
  auto m = make_model("01", {2, 1},
                      {{0.90, 0.0, 0.10},
                       {0.0, 0.90, 0.10},
                       {0.45, 0.45, 0.10}});
  // identical diagonal entries: eigenvalue gap 0 < 1e-8
  const auto report = check_conditions(m);
  CHECK_FALSE(report.entry("ii").pass);
}
