#pragma once

// Energy-method stability checks built around a pivot constant of motion.
//
// Given conserved quantities C_1..C_k, a pivot index i and an equilibrium x_e,
// the three checks (Arnold, Energy-Casimir, Ortega-Ratiu) share condition (i):
// grad C_i(x_e) must be a combination sum_{j != i} lambda_j grad C_j(x_e).
// They differ in where the second-order test happens:
//
//   Arnold          P_i restricted to W = intersection of ker dC_j(x_e), j != i
//   Energy-Casimir  P_i + alpha Q_i on the whole space (quadratic phi_j family)
//   Ortega-Ratiu    P_i + alpha Q_i restricted to W~ (kernels of d(phi_j o C_j))
//
// with P_i = Hess C_i - sum lambda_j Hess C_j and Q_i = sum grad C_j grad C_j^T.
// Exact arithmetic makes the three outcomes identical; equivalence_harness
// checks that they are.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "equistab/numkit.hpp"
#include "equistab/polynomial.hpp"

namespace equistab::methods {

using fields::EquilibriumPoint;
using fields::Polynomial;
using fields::PolyVectorField;
using numkit::SubspaceBasis;
using numkit::SymmetricMatrix;
using numkit::Vector;

/// Condition (i) holds when the residual is <= kTolGrad * (1 + ||grad C_i||).
inline constexpr double kTolGrad = 1e-9;

class ProblemError : public numkit::ContractError {
 public:
  using numkit::ContractError::ContractError;
};

/// (f, C_1..C_k, pivot i, x_e), validated on construction: dimensions agree,
/// 1 <= i <= k, and every C_j is conserved by f.
///
/// Gradients and Hessians of the constants at x_e are cached.
class AnalysisProblem {
 public:
  AnalysisProblem(PolyVectorField vf, std::vector<Polynomial> constants, std::size_t pivot,
                  EquilibriumPoint x_e);

  /// Same system, different pivot (1-based).
  AnalysisProblem with_pivot(std::size_t pivot) const;

  const PolyVectorField& vector_field() const { return vf_; }
  const std::vector<Polynomial>& constants() const { return constants_; }
  std::size_t pivot() const { return pivot_; }
  std::size_t pivot_index() const { return pivot_ - 1; }
  const EquilibriumPoint& equilibrium() const { return x_e_; }
  std::size_t dim() const { return vf_.dim(); }
  std::size_t k() const { return constants_.size(); }

  /// 0-based indices j != i, in order.
  const std::vector<std::size_t>& others() const { return others_; }
  const Vector& gradient(std::size_t j) const { return gradients_[j]; }
  const SymmetricMatrix& hessian(std::size_t j) const { return hessians_[j]; }
  double value(std::size_t j) const { return values_[j]; }

 private:
  PolyVectorField vf_;
  std::vector<Polynomial> constants_;
  std::size_t pivot_;
  EquilibriumPoint x_e_;
  std::vector<std::size_t> others_;
  std::vector<Vector> gradients_;
  std::vector<SymmetricMatrix> hessians_;
  Vector values_;
};

struct MultiplierSolution {
  Vector lambdas;  // one per others(), same order
  double residual_norm = 0.0;
  double threshold = 0.0;
  std::size_t rank = 0;
  bool unique = true;

  bool condition_i_holds() const { return residual_norm <= threshold; }
};

/// Minimum-norm solution of sum_{j != i} lambda_j grad C_j(x_e) = grad C_i(x_e),
/// or the residual of a caller-supplied lambda vector.
MultiplierSolution solve_multipliers(const AnalysisProblem& problem,
                                     const std::optional<Vector>& override_lambdas = std::nullopt);

/// phi_j'(C_j(x_e)) = -lambda_j, phi_j'' = alpha for every j != i.
struct CurvatureProfile {
  Vector slopes;
  double alpha = 0.0;

  static CurvatureProfile from_multipliers(const MultiplierSolution& m, double alpha);
  Vector multipliers() const;
};

SymmetricMatrix build_hessian_P(const AnalysisProblem& problem, const MultiplierSolution& multipliers);
SymmetricMatrix build_gram_sum(const AnalysisProblem& problem);
/// B^T Q_i B for an orthonormal basis B, assembled from the restricted
/// gradients B^T grad C_j. Gradients orthogonal to span(B) up to rank
/// tolerance contribute nothing.
SymmetricMatrix restricted_gram_sum(const AnalysisProblem& problem, const SubspaceBasis& basis);
SubspaceBasis subspace_W(const AnalysisProblem& problem);
SubspaceBasis subspace_W_tilde(const AnalysisProblem& problem, const CurvatureProfile& profile);

enum class Method { Arnold, EnergyCasimir, OrtegaRatiu };
enum class Outcome { Stable, Indecisive };
enum class FailureStage { None, ConditionI, ConditionII };

std::string to_string(Method m);
std::string to_string(Outcome o);
std::string to_string(FailureStage s);

struct Evidence {
  MultiplierSolution multipliers;
  SubspaceBasis subspace;  // where definiteness was tested
  Vector eigenvalues;      // of the tested (restricted) Hessian
  std::optional<double> alpha;
  double margin = 0.0;     // min |eigenvalue| / scale of the tested matrix
};

struct MethodVerdict {
  Method method = Method::Arnold;
  Outcome outcome = Outcome::Indecisive;
  int sign = 0;  // +1, -1, or 0 for none
  FailureStage failure_stage = FailureStage::None;
  Evidence evidence;

  bool stable() const { return outcome == Outcome::Stable; }
};

struct CheckOptions {
  std::optional<Vector> multiplier_override;
};

MethodVerdict arnold_check(const AnalysisProblem& problem, const CheckOptions& opts = {});
MethodVerdict energy_casimir_check(const AnalysisProblem& problem, const CheckOptions& opts = {});
MethodVerdict ortega_ratiu_check(const AnalysisProblem& problem, const CheckOptions& opts = {});
MethodVerdict run_check(Method method, const AnalysisProblem& problem, const CheckOptions& opts = {});

enum class CertificateStatus { Stable, Indecisive, Inconsistent };
std::string to_string(CertificateStatus s);

struct StabilityCertificate {
  std::size_t pivot = 1;
  std::size_t dim = 0;
  std::size_t constant_count = 0;
  Vector equilibrium;
  std::vector<MethodVerdict> verdicts;  // Arnold, Energy-Casimir, Ortega-Ratiu
  bool agreement = true;
  CertificateStatus status = CertificateStatus::Indecisive;
  /// Arnold margin: the quantity the three methods decide on in exact
  /// arithmetic. Disagreement at a small margin is a tolerance effect.
  double margin = 0.0;
  std::string lyapunov_note;  // empty unless Stable
};

StabilityCertificate equivalence_harness(const AnalysisProblem& problem, const CheckOptions& opts = {});

/// One certificate per pivot 1..k, in pivot order. Pivots run concurrently.
std::vector<StabilityCertificate> analyze_all_pivots(const AnalysisProblem& problem);

struct IndependenceReport {
  std::size_t rank = 0;
  std::size_t k = 0;
  bool independent = false;  // rank == k
  std::string note;
};

IndependenceReport gradient_independence_report(const AnalysisProblem& problem);

}  // namespace equistab::methods
