#include "equistab/methods.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace equistab::methods {

using numkit::analyze_definiteness;
using numkit::Definiteness;
using numkit::DefinitenessEvidence;

namespace {

std::vector<std::size_t> indices_except(std::size_t k, std::size_t skip) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < k; ++j) {
    if (j != skip) out.push_back(j);
  }
  return out;
}

int sign_of(Definiteness d) {
  if (d == Definiteness::PositiveDefinite) return 1;
  if (d == Definiteness::NegativeDefinite) return -1;
  return 0;
}

// Returns the verdict shell shared by all three checks: condition (i)
// settled, evidence multipliers filled in.
MethodVerdict begin_check(Method method, const AnalysisProblem& problem, const CheckOptions& opts,
                          MultiplierSolution& multipliers) {
  MethodVerdict v;
  v.method = method;
  multipliers = solve_multipliers(problem, opts.multiplier_override);
  v.evidence.multipliers = multipliers;
  if (!multipliers.condition_i_holds()) {
    v.outcome = Outcome::Indecisive;
    v.failure_stage = FailureStage::ConditionI;
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// AnalysisProblem

AnalysisProblem::AnalysisProblem(PolyVectorField vf, std::vector<Polynomial> constants, std::size_t pivot,
                                 EquilibriumPoint x_e)
    : vf_(std::move(vf)), constants_(std::move(constants)), pivot_(pivot), x_e_(std::move(x_e)) {
  if (constants_.empty()) throw ProblemError("AnalysisProblem: at least one constant of motion is required");
  if (pivot_ < 1 || pivot_ > constants_.size()) {
    std::ostringstream os;
    os << "AnalysisProblem: pivot " << pivot_ << " outside 1.." << constants_.size();
    throw ProblemError(os.str());
  }
  if (x_e_.dim() != vf_.dim()) throw ProblemError("AnalysisProblem: equilibrium dimension mismatch");
  for (std::size_t j = 0; j < constants_.size(); ++j) {
    if (constants_[j].dim() != vf_.dim()) {
      std::ostringstream os;
      os << "AnalysisProblem: constant " << (j + 1) << " has dimension " << constants_[j].dim()
         << ", vector field has " << vf_.dim();
      throw ProblemError(os.str());
    }
  }
  const auto report = fields::validate_conservation(vf_, constants_);
  if (!report.passed) {
    std::ostringstream os;
    os << "AnalysisProblem: not conserved:";
    for (const auto& e : report.entries) {
      if (e.conserved) continue;
      os << " C" << (e.index + 1) << " (L_f C has";
      for (const auto& t : e.offending) os << " " << t.coeff << "*" << fields::monomial_to_string(t.powers);
      os << ")";
    }
    throw ProblemError(os.str());
  }

  others_ = indices_except(constants_.size(), pivot_ - 1);
  for (const auto& c : constants_) {
    gradients_.push_back(c.gradient(x_e_.coords()));
    hessians_.push_back(c.hessian(x_e_.coords()));
    values_.push_back(c.eval(x_e_.coords()));
  }
}

AnalysisProblem AnalysisProblem::with_pivot(std::size_t pivot) const {
  if (pivot < 1 || pivot > constants_.size()) {
    std::ostringstream os;
    os << "AnalysisProblem: pivot " << pivot << " outside 1.." << constants_.size();
    throw ProblemError(os.str());
  }
  AnalysisProblem copy = *this;
  copy.pivot_ = pivot;
  copy.others_ = indices_except(constants_.size(), pivot - 1);
  return copy;
}

// ---------------------------------------------------------------------------
// Building blocks

MultiplierSolution solve_multipliers(const AnalysisProblem& problem, const std::optional<Vector>& override_lambdas) {
  std::vector<Vector> columns;
  for (std::size_t j : problem.others()) columns.push_back(problem.gradient(j));
  const Vector& target = problem.gradient(problem.pivot_index());

  MultiplierSolution sol;
  sol.threshold = kTolGrad * (1.0 + numkit::norm2(target));
  sol.rank = columns.empty() ? 0 : numkit::numerical_rank(columns, problem.dim());
  sol.unique = sol.rank == columns.size();

  if (override_lambdas) {
    if (override_lambdas->size() != columns.size()) {
      std::ostringstream os;
      os << "solve_multipliers: override has " << override_lambdas->size() << " entries, expected "
         << columns.size();
      throw ProblemError(os.str());
    }
    sol.lambdas = *override_lambdas;
    Vector r = numkit::scaled(-1.0, target);
    for (std::size_t j = 0; j < columns.size(); ++j) r = numkit::axpy(sol.lambdas[j], columns[j], r);
    sol.residual_norm = numkit::norm2(r);
    return sol;
  }

  const auto ls = numkit::least_squares_minnorm(columns, target);
  sol.lambdas = ls.coefficients;
  sol.residual_norm = ls.residual_norm;
  return sol;
}

CurvatureProfile CurvatureProfile::from_multipliers(const MultiplierSolution& m, double alpha) {
  CurvatureProfile p;
  p.slopes = numkit::scaled(-1.0, m.lambdas);
  p.alpha = alpha;
  return p;
}

Vector CurvatureProfile::multipliers() const { return numkit::scaled(-1.0, slopes); }

SymmetricMatrix build_hessian_P(const AnalysisProblem& problem, const MultiplierSolution& multipliers) {
  SymmetricMatrix p = problem.hessian(problem.pivot_index());
  const auto& others = problem.others();
  for (std::size_t idx = 0; idx < others.size(); ++idx) {
    const double lambda = multipliers.lambdas.at(idx);
    if (lambda != 0.0) p -= lambda * problem.hessian(others[idx]);
  }
  return p;
}

SymmetricMatrix build_gram_sum(const AnalysisProblem& problem) {
  SymmetricMatrix q(problem.dim());
  for (std::size_t j : problem.others()) q += SymmetricMatrix::outer(problem.gradient(j));
  return q;
}

SymmetricMatrix restricted_gram_sum(const AnalysisProblem& problem, const SubspaceBasis& basis) {
  if (basis.ambient_dim != problem.dim()) throw ProblemError("restricted_gram_sum: basis dimension mismatch");
  if (basis.empty()) return SymmetricMatrix::zero_dimensional();
  // Built from the restricted factors B^T g_j rather than B^T Q B: assembling
  // Q first leaves O(eps |g|^2) noise on directions where the form is exactly
  // zero, which the Finsler schedule would amplify by up to 2^60.
  SymmetricMatrix q(basis.size());
  for (std::size_t j : problem.others()) {
    const Vector& g = problem.gradient(j);
    Vector c(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a) c[a] = numkit::dot(basis.basis[a], g);
    if (numkit::norm2(c) <= numkit::kTolRank * numkit::norm2(g)) continue;
    q += SymmetricMatrix::outer(c);
  }
  return q;
}

SubspaceBasis subspace_W(const AnalysisProblem& problem) {
  std::vector<Vector> constraints;
  for (std::size_t j : problem.others()) constraints.push_back(problem.gradient(j));
  return numkit::null_space(constraints, problem.dim());
}

SubspaceBasis subspace_W_tilde(const AnalysisProblem& problem, const CurvatureProfile& profile) {
  const auto& others = problem.others();
  if (profile.slopes.size() != others.size()) throw ProblemError("subspace_W_tilde: profile size mismatch");
  // A vanishing slope removes its constraint; "vanishing" uses the same
  // scale as condition (i).
  const double cutoff = kTolGrad * (1.0 + numkit::norm2(problem.gradient(problem.pivot_index())));
  std::vector<Vector> constraints;
  for (std::size_t idx = 0; idx < others.size(); ++idx) {
    Vector d = numkit::scaled(profile.slopes[idx], problem.gradient(others[idx]));
    if (numkit::norm2(d) > cutoff) constraints.push_back(std::move(d));
  }
  return numkit::null_space(constraints, problem.dim());
}

// ---------------------------------------------------------------------------
// Checks

std::string to_string(Method m) {
  switch (m) {
    case Method::Arnold: return "arnold";
    case Method::EnergyCasimir: return "energy_casimir";
    case Method::OrtegaRatiu: return "ortega_ratiu";
  }
  return "unknown";
}

std::string to_string(Outcome o) { return o == Outcome::Stable ? "stable" : "indecisive"; }

std::string to_string(FailureStage s) {
  switch (s) {
    case FailureStage::None: return "none";
    case FailureStage::ConditionI: return "condition_i";
    case FailureStage::ConditionII: return "condition_ii";
  }
  return "unknown";
}

std::string to_string(CertificateStatus s) {
  switch (s) {
    case CertificateStatus::Stable: return "stable";
    case CertificateStatus::Indecisive: return "indecisive";
    case CertificateStatus::Inconsistent: return "inconsistent";
  }
  return "unknown";
}

MethodVerdict arnold_check(const AnalysisProblem& problem, const CheckOptions& opts) {
  MultiplierSolution mult;
  MethodVerdict v = begin_check(Method::Arnold, problem, opts, mult);
  if (v.failure_stage == FailureStage::ConditionI) return v;

  const SymmetricMatrix p = build_hessian_P(problem, mult);
  v.evidence.subspace = subspace_W(problem);
  const DefinitenessEvidence ev = analyze_definiteness(numkit::restrict_quadratic_form(p, v.evidence.subspace));
  v.evidence.eigenvalues = ev.eigenvalues;
  v.evidence.margin = ev.margin;

  // ZeroDimensional and semidefinite both land here.
  v.sign = sign_of(ev.kind);
  if (v.sign != 0) {
    v.outcome = Outcome::Stable;
  } else {
    v.failure_stage = FailureStage::ConditionII;
  }
  return v;
}

MethodVerdict energy_casimir_check(const AnalysisProblem& problem, const CheckOptions& opts) {
  MultiplierSolution mult;
  MethodVerdict v = begin_check(Method::EnergyCasimir, problem, opts, mult);
  if (v.failure_stage == FailureStage::ConditionI) return v;

  const SymmetricMatrix p = build_hessian_P(problem, mult);
  const SymmetricMatrix q = build_gram_sum(problem);
  v.evidence.subspace = SubspaceBasis::full_space(problem.dim());

  // The level set through x_e is locally a point: nothing to certify on a
  // neighborhood, same conservative call as a ZeroDimensional restriction.
  if (subspace_W(problem).empty()) {
    v.failure_stage = FailureStage::ConditionII;
    const auto ev = analyze_definiteness(p);
    v.evidence.eigenvalues = ev.eigenvalues;
    v.evidence.margin = ev.margin;
    return v;
  }

  for (int sign : {1, -1}) {
    const auto cert = numkit::finsler_alpha_search(p, q, sign);
    if (!cert) continue;
    const auto ev = analyze_definiteness(p + cert->alpha * q);
    v.outcome = Outcome::Stable;
    v.sign = sign;
    v.evidence.alpha = cert->alpha;
    v.evidence.eigenvalues = ev.eigenvalues;
    v.evidence.margin = ev.margin;
    return v;
  }

  const auto ev = analyze_definiteness(p);
  v.failure_stage = FailureStage::ConditionII;
  v.evidence.eigenvalues = ev.eigenvalues;
  v.evidence.margin = ev.margin;
  return v;
}

MethodVerdict ortega_ratiu_check(const AnalysisProblem& problem, const CheckOptions& opts) {
  MultiplierSolution mult;
  MethodVerdict v = begin_check(Method::OrtegaRatiu, problem, opts, mult);
  if (v.failure_stage == FailureStage::ConditionI) return v;

  const SymmetricMatrix p = build_hessian_P(problem, mult);
  const CurvatureProfile profile = CurvatureProfile::from_multipliers(mult, 0.0);
  v.evidence.subspace = subspace_W_tilde(problem, profile);

  const SymmetricMatrix pr = numkit::restrict_quadratic_form(p, v.evidence.subspace);
  const DefinitenessEvidence base = analyze_definiteness(pr);
  v.evidence.eigenvalues = base.eigenvalues;
  v.evidence.margin = base.margin;
  if (v.evidence.subspace.empty()) {
    v.failure_stage = FailureStage::ConditionII;
    return v;
  }

  const SymmetricMatrix qr = restricted_gram_sum(problem, v.evidence.subspace);
  for (int sign : {1, -1}) {
    for (double t : numkit::finsler_schedule()) {
      const SymmetricMatrix m = static_cast<double>(sign) * pr + t * qr;
      if (analyze_definiteness(m).kind != Definiteness::PositiveDefinite) continue;
      const double alpha = t == 0.0 ? 0.0 : sign * t;
      const auto ev = analyze_definiteness(pr + alpha * qr);
      v.outcome = Outcome::Stable;
      v.sign = sign;
      v.evidence.alpha = alpha;
      v.evidence.eigenvalues = ev.eigenvalues;
      v.evidence.margin = ev.margin;
      return v;
    }
  }
  v.failure_stage = FailureStage::ConditionII;
  return v;
}

MethodVerdict run_check(Method method, const AnalysisProblem& problem, const CheckOptions& opts) {
  switch (method) {
    case Method::Arnold: return arnold_check(problem, opts);
    case Method::EnergyCasimir: return energy_casimir_check(problem, opts);
    case Method::OrtegaRatiu: return ortega_ratiu_check(problem, opts);
  }
  throw ProblemError("run_check: unknown method");
}

// ---------------------------------------------------------------------------
// Harness

namespace {

std::string lyapunov_note(const AnalysisProblem& problem, const MethodVerdict& arnold, double alpha) {
  const std::size_t i = problem.pivot_index();
  const auto& others = problem.others();
  const auto& lambdas = arnold.evidence.multipliers.lambdas;

  std::ostringstream os;
  os.precision(12);
  os << "V(x) = ";
  if (arnold.sign < 0) os << "-(";
  os << "C" << (i + 1) << "(x)";
  for (std::size_t idx = 0; idx < others.size(); ++idx) {
    const double l = lambdas[idx];
    if (l == 0.0) continue;
    os << (l > 0 ? " - " : " + ") << std::abs(l) << "*C" << (others[idx] + 1) << "(x)";
  }
  if (alpha != 0.0 && !others.empty()) {
    os << (alpha > 0 ? " + " : " - ") << std::abs(alpha) / 2.0 << "*[";
    for (std::size_t idx = 0; idx < others.size(); ++idx) {
      const std::size_t j = others[idx];
      if (idx > 0) os << " + ";
      os << "(C" << (j + 1) << "(x) - " << problem.value(j) << ")^2";
    }
    os << "]";
  }
  if (arnold.sign < 0) os << ")";
  os << " minus its value at x_e; V vanishes at x_e, is positive nearby, and is conserved along "
        "trajectories, so it is a Lyapunov function for x_e";
  return os.str();
}

}  // namespace

StabilityCertificate equivalence_harness(const AnalysisProblem& problem, const CheckOptions& opts) {
  StabilityCertificate cert;
  cert.pivot = problem.pivot();
  cert.dim = problem.dim();
  cert.constant_count = problem.k();
  cert.equilibrium = problem.equilibrium().coords();
  cert.verdicts = {arnold_check(problem, opts), energy_casimir_check(problem, opts),
                   ortega_ratiu_check(problem, opts)};

  const Outcome first = cert.verdicts.front().outcome;
  cert.agreement = std::all_of(cert.verdicts.begin(), cert.verdicts.end(),
                               [&](const MethodVerdict& v) { return v.outcome == first; });
  cert.margin = cert.verdicts.front().evidence.margin;

  if (!cert.agreement) {
    cert.status = CertificateStatus::Inconsistent;
  } else if (first == Outcome::Stable) {
    cert.status = CertificateStatus::Stable;
    const auto& ec = cert.verdicts[1];
    cert.lyapunov_note = lyapunov_note(problem, cert.verdicts.front(), ec.evidence.alpha.value_or(0.0));
  } else {
    cert.status = CertificateStatus::Indecisive;
  }
  return cert;
}

std::vector<StabilityCertificate> analyze_all_pivots(const AnalysisProblem& problem) {
  std::vector<std::future<StabilityCertificate>> jobs;
  for (std::size_t pivot = 1; pivot <= problem.k(); ++pivot) {
    jobs.push_back(std::async(std::launch::async,
                              [p = problem.with_pivot(pivot)] { return equivalence_harness(p); }));
  }
  std::vector<StabilityCertificate> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

IndependenceReport gradient_independence_report(const AnalysisProblem& problem) {
  IndependenceReport r;
  r.k = problem.k();
  std::vector<Vector> grads;
  for (std::size_t j = 0; j < problem.k(); ++j) grads.push_back(problem.gradient(j));
  r.rank = numkit::numerical_rank(grads, problem.dim());
  r.independent = r.rank == r.k;

  std::ostringstream os;
  os << "rank of {grad C_j(x_e)} is " << r.rank << " for k = " << r.k << " constants";
  if (r.independent) {
    os << "; the gradients are linearly independent, so condition (i) fails for every pivot. "
          "Stability must instead come from the dynamics reduced to the level set of (C_1..C_k) "
          "through x_e, provided x_e is not a bifurcation point of the reduced family "
          "(reduction is not performed by this tool)";
  } else {
    os << "; condition (i) can hold for a suitable pivot";
  }
  r.note = os.str();
  return r;
}

}  // namespace equistab::methods
