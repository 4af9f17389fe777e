#include <doctest.h>

#include <cmath>

#include "equistab/methods.hpp"
#include "equistab/registry.hpp"
#include "oracles.hpp"

using namespace equistab;
using namespace equistab::methods;
using namespace equistab::testing;
using numkit::SubspaceBasis;

namespace {

AnalysisProblem problem_for(const app::SystemDefinition& def, const std::string& eq, std::size_t pivot) {
  return AnalysisProblem(def.vector_field, def.constant_fields(), pivot,
                         EquilibriumPoint(def.vector_field, def.equilibrium(eq).coords));
}

PolyVectorField zero_field(std::size_t n) { return PolyVectorField(std::vector<Polynomial>(n, Polynomial(n))); }

Vector unit(std::size_t n, std::size_t k) {
  Vector e(n, 0.0);
  e[k] = 1.0;
  return e;
}

bool spans_same(const SubspaceBasis& basis, const std::vector<Vector>& expected) {
  if (basis.size() != expected.size()) return false;
  for (const auto& e : expected) {
    if (basis.distance_to(e) > 1e-12) return false;
  }
  return true;
}

bool same_eigenvalues(const Vector& got, const Vector& expected, double tol) {
  if (got.size() != expected.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (std::abs(got[i] - expected[i]) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("AnalysisProblem validation") {
  const auto rb = app::rigid_body();
  const EquilibriumPoint xe(rb.vector_field, {1, 0, 0});
  CHECK_THROWS_AS(AnalysisProblem(rb.vector_field, {}, 1, xe), ProblemError);
  CHECK_THROWS_AS(AnalysisProblem(rb.vector_field, rb.constant_fields(), 0, xe), ProblemError);
  CHECK_THROWS_AS(AnalysisProblem(rb.vector_field, rb.constant_fields(), 3, xe), ProblemError);
  CHECK_THROWS_AS(AnalysisProblem(rb.vector_field, {Polynomial::variable(3, 0)}, 1, xe), ProblemError);
  CHECK_THROWS_AS(AnalysisProblem(rb.vector_field, {Polynomial::variable(2, 0)}, 1, xe), ProblemError);

  const AnalysisProblem p(rb.vector_field, rb.constant_fields(), 1, xe);
  CHECK(p.others() == std::vector<std::size_t>{1});
  CHECK(p.with_pivot(2).others() == std::vector<std::size_t>{0});
  CHECK(p.value(1) == 0.5);
}

TEST_CASE("solve_multipliers examples") {
  SUBCASE("rigid body pivot 1") {
    const auto m = solve_multipliers(problem_for(app::rigid_body(), "spin-major", 1));
    REQUIRE(m.lambdas.size() == 1);
    CHECK(std::abs(m.lambdas[0] - 1.0 / 3) < 1e-15);
    CHECK(m.residual_norm < 1e-15);
    CHECK(m.unique);
    CHECK(m.condition_i_holds());
  }
  SUBCASE("lorenz5 pivot 1 has no multiplier") {
    const auto m = solve_multipliers(problem_for(app::lorenz5(), "rest-M", 1));
    CHECK(std::abs(m.residual_norm - 1.0) < 1e-15);
    CHECK_FALSE(m.condition_i_holds());
  }
  SUBCASE("lorenz5 pivot 2") {
    const auto m = solve_multipliers(problem_for(app::lorenz5(), "rest-M", 2));
    CHECK(m.lambdas == Vector{0.0});
    CHECK(m.residual_norm == 0.0);
    CHECK(m.condition_i_holds());
  }
  SUBCASE("override") {
    const auto p = problem_for(app::rigid_body(), "spin-major", 1);
    const auto bad = solve_multipliers(p, Vector{0.5});
    CHECK_FALSE(bad.condition_i_holds());
    CHECK(bad.residual_norm == doctest::Approx(0.5 - 1.0 / 3));
    CHECK(solve_multipliers(p, Vector{1.0 / 3}).condition_i_holds());
    CHECK_THROWS_AS(solve_multipliers(p, Vector{1.0, 2.0}), ProblemError);
  }
}

TEST_CASE("P, Q and the subspaces on the reference systems") {
  const auto rb = problem_for(app::rigid_body(), "spin-major", 1);
  const auto mrb = solve_multipliers(rb);
  CHECK(build_hessian_P(rb, mrb) == numkit::SymmetricMatrix::diagonal({0, 0.5 - 1.0 / 3, 1 - 1.0 / 3}));
  CHECK(build_gram_sum(rb) == numkit::SymmetricMatrix::diagonal({1, 0, 0}));
  CHECK(spans_same(subspace_W(rb), {unit(3, 1), unit(3, 2)}));
  const auto prof = CurvatureProfile::from_multipliers(mrb, 2.0);
  CHECK(prof.slopes == Vector{-mrb.lambdas[0]});
  CHECK(prof.multipliers() == mrb.lambdas);
  CHECK(spans_same(subspace_W_tilde(rb, prof), {unit(3, 1), unit(3, 2)}));

  const auto lz = problem_for(app::lorenz5(), "rest-M", 2);
  const auto mlz = solve_multipliers(lz);
  CHECK(build_hessian_P(lz, mlz) == numkit::SymmetricMatrix::diagonal({1, 1, 0, 0, 0}));
  CHECK(build_gram_sum(lz) == numkit::SymmetricMatrix::diagonal({0, 0, 1, 0, 0}));
  CHECK(spans_same(subspace_W(lz), {unit(5, 0), unit(5, 1), unit(5, 3), unit(5, 4)}));
  CHECK(subspace_W_tilde(lz, CurvatureProfile::from_multipliers(mlz, 1.0)).size() == 5);

  // k = 1: empty sums.
  const auto c = Polynomial(2, {{0.5, {2, 0}}, {0.5, {0, 2}}});
  const AnalysisProblem single(zero_field(2), {c}, 1, EquilibriumPoint(zero_field(2), {0, 0}));
  const auto ms = solve_multipliers(single);
  CHECK(ms.lambdas.empty());
  CHECK(build_hessian_P(single, ms) == numkit::SymmetricMatrix::identity(2));
  CHECK(build_gram_sum(single) == numkit::SymmetricMatrix(2));
  CHECK(subspace_W(single).size() == 2);
}

TEST_CASE("arnold_check") {
  SUBCASE("rigid body major axis") {
    const auto v = arnold_check(problem_for(app::rigid_body(), "spin-major", 1));
    CHECK(v.outcome == Outcome::Stable);
    CHECK(v.sign == 1);
    CHECK(same_eigenvalues(v.evidence.eigenvalues, {1.0 / 6, 2.0 / 3}, 1e-12));
  }
  SUBCASE("lorenz5 both pivots") {
    const auto v1 = arnold_check(problem_for(app::lorenz5(), "rest-M", 1));
    CHECK(v1.outcome == Outcome::Indecisive);
    CHECK(v1.failure_stage == FailureStage::ConditionI);
    const auto v2 = arnold_check(problem_for(app::lorenz5(), "rest-M", 2));
    CHECK(v2.outcome == Outcome::Indecisive);
    CHECK(v2.failure_stage == FailureStage::ConditionII);
    CHECK(same_eigenvalues(v2.evidence.eigenvalues, {0, 0, 1, 1}, 1e-15));
  }
  SUBCASE("middle axis has mixed signs") {
    const auto v = arnold_check(problem_for(app::rigid_body(), "spin-middle", 1));
    CHECK(v.outcome == Outcome::Indecisive);
    // lambda = 1/I2, restricted to span(e1, e3): diag(1/I1 - 1/I2, 1/I3 - 1/I2).
    const auto [lo, hi] = eig2x2(1.0 / 3 - 0.5, 0.0, 1.0 - 0.5);
    CHECK(same_eigenvalues(v.evidence.eigenvalues, {lo, hi}, 1e-12));
    CHECK(lo < 0);
    CHECK(hi > 0);
  }
}

TEST_CASE("energy_casimir_check") {
  const auto v = energy_casimir_check(problem_for(app::rigid_body(), "spin-major", 1));
  CHECK(v.outcome == Outcome::Stable);
  CHECK(v.sign == 1);
  REQUIRE(v.evidence.alpha.has_value());
  CHECK(*v.evidence.alpha > 0);
  // The curvature 2 choice from the hand analysis works as well.
  const auto p = problem_for(app::rigid_body(), "spin-major", 1);
  const auto m = build_hessian_P(p, solve_multipliers(p)) + 2.0 * build_gram_sum(p);
  CHECK(numkit::classify_definiteness(m) == numkit::Definiteness::PositiveDefinite);

  const auto lz = energy_casimir_check(problem_for(app::lorenz5(), "rest-M", 2));
  CHECK(lz.outcome == Outcome::Indecisive);

  const auto c = Polynomial(2, {{0.5, {2, 0}}, {0.5, {0, 2}}});
  const AnalysisProblem single(zero_field(2), {c}, 1, EquilibriumPoint(zero_field(2), {0, 0}));
  const auto s = energy_casimir_check(single);
  CHECK(s.outcome == Outcome::Stable);
  REQUIRE(s.evidence.alpha.has_value());
  CHECK(*s.evidence.alpha == 0.0);
}

TEST_CASE("ortega_ratiu_check") {
  const auto v = ortega_ratiu_check(problem_for(app::rigid_body(), "spin-major", 1));
  CHECK(v.outcome == Outcome::Stable);
  CHECK(v.sign == 1);
  CHECK(v.evidence.subspace.size() == 2);
  const auto lz = ortega_ratiu_check(problem_for(app::lorenz5(), "rest-M", 2));
  CHECK(lz.outcome == Outcome::Indecisive);
  CHECK(lz.evidence.subspace.size() == 5);
}

TEST_CASE("equivalence_harness on the reference systems") {
  const auto rb = equivalence_harness(problem_for(app::rigid_body(), "spin-major", 1));
  CHECK(rb.status == CertificateStatus::Stable);
  CHECK(rb.agreement);
  REQUIRE(rb.verdicts.size() == 3);
  for (const auto& v : rb.verdicts) CHECK(v.stable());
  CHECK_FALSE(rb.lyapunov_note.empty());

  for (std::size_t pivot : {1u, 2u}) {
    const auto lz = equivalence_harness(problem_for(app::lorenz5(), "rest-M", pivot));
    CHECK(lz.status == CertificateStatus::Indecisive);
    CHECK(lz.agreement);
    CHECK(lz.lyapunov_note.empty());
  }

  const auto all = analyze_all_pivots(problem_for(app::rigid_body(), "spin-major", 1));
  REQUIRE(all.size() == 2);
  CHECK(all[0].pivot == 1);
  CHECK(all[1].pivot == 2);
  CHECK(all[1].status == CertificateStatus::Stable);
  CHECK(all[1].verdicts[0].sign == -1);
}

TEST_CASE("gradient_independence_report") {
  CHECK(gradient_independence_report(problem_for(app::rigid_body(), "spin-major", 1)).rank == 1);
  const auto lz = gradient_independence_report(problem_for(app::lorenz5(), "rest-M", 1));
  CHECK(lz.rank == 1);
  CHECK_FALSE(lz.independent);

  const AnalysisProblem p(zero_field(2), {Polynomial::variable(2, 0), Polynomial::variable(2, 1)}, 1,
                          EquilibriumPoint(zero_field(2), {0, 0}));
  const auto r = gradient_independence_report(p);
  CHECK(r.rank == 2);
  CHECK(r.independent);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("quadratic form of the other gradients vanishes exactly on W") {
  Rng rng(25);
  int counterexamples = 0;
  for (int set = 0; set < 120; ++set) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 6));
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const auto sys = random_gradient_set(rng, n, k);
    const AnalysisProblem p(sys.vf, sys.constants, 1, EquilibriumPoint(sys.vf, sys.x_e));
    const auto q = build_gram_sum(p);
    const auto w = subspace_W(p);
    for (int t = 0; t < 100; ++t) {
      Vector x;
      if (t % 2 == 0 && !w.empty()) {
        x.assign(n, 0.0);
        for (const auto& b : w.basis) x = numkit::axpy(gaussian_vector(rng, 1)[0], b, x);
        if (numkit::norm2(x) == 0.0) continue;
        x = numkit::scaled(1.0 / numkit::norm2(x), x);
      } else {
        x = random_unit_vector(rng, n);
      }
      const bool zero_form = q.quadratic_form(x) <= 1e-12;
      const bool in_w = w.distance_to(x) <= 1e-6 * numkit::norm2(x);
      if (zero_form != in_w) ++counterexamples;
    }
  }
  CHECK(counterexamples == 0);
}

TEST_CASE("W is contained in W-tilde and restriction is monotone") {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 5));
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(std::min<std::size_t>(3, n - 1))));
    const auto sys = random_conserved_system(rng, n, k);
    for (std::size_t pivot = 1; pivot <= k; ++pivot) {
      const AnalysisProblem p(sys.vf, sys.constants, pivot, EquilibriumPoint(sys.vf, sys.x_e));
      const auto m = solve_multipliers(p);
      const auto w = subspace_W(p);
      const auto wt = subspace_W_tilde(p, CurvatureProfile::from_multipliers(m, 1.0));
      CHECK(w.size() <= wt.size());
      for (const auto& b : w.basis) CHECK(wt.distance_to(b) < 1e-9);
      // Gram form vanishes on W, so P + aQ and P agree there.
      const auto pw = numkit::restrict_quadratic_form(build_hessian_P(p, m), w);
      const auto pqw = numkit::restrict_quadratic_form(build_hessian_P(p, m) + 7.0 * build_gram_sum(p), w);
      if (!w.empty()) {
        const auto a = numkit::symmetric_eigen(pw).eigenvalues;
        const auto b = numkit::symmetric_eigen(pqw).eigenvalues;
        CHECK(same_eigenvalues(a, b, 1e-9 * (1.0 + pqw.frobenius_norm())));
      }
    }
  }
}

TEST_CASE("verdicts are invariant under positive rescaling of the constants") {
  const auto rb = app::rigid_body();
  const EquilibriumPoint xe(rb.vector_field, {1, 0, 0});
  for (double c : {0.1, 3.0, 250.0}) {
    auto consts = rb.constant_fields();
    consts[0] *= c;
    const AnalysisProblem scaled_pivot(rb.vector_field, consts, 1, xe);
    const auto cert = equivalence_harness(scaled_pivot);
    CHECK(cert.status == CertificateStatus::Stable);
    CHECK(cert.verdicts[0].evidence.multipliers.lambdas[0] == doctest::Approx(c / 3.0));

    consts = rb.constant_fields();
    consts[1] *= c;
    const AnalysisProblem scaled_other(rb.vector_field, consts, 1, xe);
    const auto cert2 = equivalence_harness(scaled_other);
    CHECK(cert2.status == CertificateStatus::Stable);
    CHECK(cert2.verdicts[0].evidence.multipliers.lambdas[0] == doctest::Approx(1.0 / (3.0 * c)));
  }
}

TEST_CASE("three methods agree on generated conserved systems") {
  Rng rng(20240601);
  int problems = 0, stable = 0, disagreements = 0;
  while (problems < 200) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 5));
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(std::min<std::size_t>(3, n - 1))));
    const auto sys = random_conserved_system(rng, n, k);
    const AnalysisProblem base(sys.vf, sys.constants, 1, EquilibriumPoint(sys.vf, sys.x_e));
    for (const auto& cert : analyze_all_pivots(base)) {
      ++problems;
      if (cert.status == CertificateStatus::Stable) ++stable;
      if (!cert.agreement) {
        ++disagreements;
        MESSAGE("disagreement: n=" << n << " k=" << k << " pivot=" << cert.pivot << " margin=" << cert.margin);
      }
      if (cert.status == CertificateStatus::Stable) CHECK(cert.agreement);
    }
  }
  CHECK(disagreements == 0);
  // The generator must exercise both outcomes.
  CHECK(stable > 10);
  CHECK(problems - stable > 10);
}

TEST_CASE("large alpha does not certify an indefinite form on W") {
  // W = {x1 + x2 + x3 - 4 x4 = 0, 2 x2 - 6 x4 = 0}; x1^2 - 10 x3^2 is
  // negative on (1, 0, -1, 0) and positive on (1, 3, 0, 1), both in W.
  const std::size_t n = 4;
  const Polynomial g1(n, {{1, {1, 0, 0, 0}}, {1, {0, 1, 0, 0}}, {1, {0, 0, 1, 0}}, {-4, {0, 0, 0, 1}}});
  const Polynomial g2(n, {{2, {0, 1, 0, 0}}, {-6, {0, 0, 0, 1}}});
  const Polynomial pivot = 4.0 * g1 - 2.0 * g2 + Polynomial(n, {{1, {2, 0, 0, 0}}, {-10, {0, 0, 2, 0}}});
  const AnalysisProblem p(zero_field(n), {pivot, g1, g2}, 1, EquilibriumPoint(zero_field(n), Vector(n, 0.0)));

  const auto m = solve_multipliers(p);
  CHECK(same_eigenvalues(m.lambdas, {4, -2}, 1e-12));
  const auto wt = subspace_W_tilde(p, CurvatureProfile::from_multipliers(m, 0.0));
  CHECK(wt.size() == 2);
  // The gram form is exactly zero on W; its restriction must not carry noise.
  CHECK(restricted_gram_sum(p, wt) == numkit::SymmetricMatrix(2));

  const auto cert = equivalence_harness(p);
  CHECK(cert.agreement);
  for (const auto& v : cert.verdicts) CHECK(v.outcome == Outcome::Indecisive);
}

TEST_CASE("restricted_gram_sum matches the assembled restriction") {
  Rng rng(41);
  for (int t = 0; t < 100; ++t) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 5));
    const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    const auto sys = random_gradient_set(rng, n, k);
    const AnalysisProblem p(sys.vf, sys.constants, 1, EquilibriumPoint(sys.vf, sys.x_e));
    auto q = random_orthonormal(rng, n);
    q.resize(static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(n))));
    const SubspaceBasis b{n, q};
    const auto direct = numkit::restrict_quadratic_form(build_gram_sum(p), b);
    const auto factored = restricted_gram_sum(p, b);
    CHECK((direct - factored).frobenius_norm() <= 1e-12 * (1.0 + direct.frobenius_norm()));
  }
}
