#pragma once

// Exact multivariate polynomial fields.
//
// A Polynomial stores its monomials in a map keyed by exponent vector, so the
// representation is canonical: no repeated exponents, no exact-zero
// coefficients, and iteration order is lexicographic in the exponents.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "equistab/numkit.hpp"

namespace equistab::fields {

using numkit::SymmetricMatrix;
using numkit::Vector;
using Exponents = std::vector<int>;

struct Term {
  double coeff = 0.0;
  Exponents powers;
};

class Polynomial {
 public:
  explicit Polynomial(std::size_t dim);
  Polynomial(std::size_t dim, const std::vector<Term>& terms);

  static Polynomial constant(std::size_t dim, double c);
  /// x_k (0-based).
  static Polynomial variable(std::size_t dim, std::size_t k);
  static Polynomial monomial(double coeff, Exponents powers);

  std::size_t dim() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  int degree() const;

  /// Coefficient of the given monomial (0 if absent).
  double coefficient(const Exponents& powers) const;
  double constant_term() const;
  std::vector<Term> terms() const;
  /// Largest |coefficient|; 0 for the zero polynomial.
  double max_abs_coefficient() const;

  double eval(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  SymmetricMatrix hessian(const Vector& x) const;

  /// d/dx_k as an exact polynomial.
  Polynomial derivative(std::size_t k) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Human-readable form, e.g. "0.5*x1^2 - x2*x3".
  std::string to_string() const;

 private:
  void add_term(double coeff, const Exponents& powers);
  void check_point(const Vector& x, const char* what) const;

  std::size_t dim_;
  std::map<Exponents, double> terms_;
};

/// Vector field f: R^n -> R^n with polynomial components.
class PolyVectorField {
 public:
  explicit PolyVectorField(std::vector<Polynomial> components);

  std::size_t dim() const { return components_.size(); }
  const Polynomial& component(std::size_t k) const { return components_[k]; }
  const std::vector<Polynomial>& components() const { return components_; }

  Vector eval(const Vector& x) const;
  /// Writes f(x) into out (resized as needed); no allocation when sized.
  void eval_into(const Vector& x, Vector& out) const;

  friend bool operator==(const PolyVectorField&, const PolyVectorField&) = default;

 private:
  std::vector<Polynomial> components_;
};

/// Absolute residual bound is kTolEquilibrium * (1 + ||x||).
inline constexpr double kTolEquilibrium = 1e-9;

class EquilibriumError : public numkit::ContractError {
 public:
  using numkit::ContractError::ContractError;
};

/// A point x_e with f(x_e) = 0, checked against its vector field on
/// construction.
class EquilibriumPoint {
 public:
  EquilibriumPoint(const PolyVectorField& vf, Vector coords);

  const Vector& coords() const { return coords_; }
  double residual() const { return residual_; }
  std::size_t dim() const { return coords_.size(); }

 private:
  Vector coords_;
  double residual_;
};

/// sum_k (d field / d x_k) * vf_k.
Polynomial lie_derivative(const Polynomial& field, const PolyVectorField& vf);

/// Per-coefficient cancellation bound for validate_conservation.
inline constexpr double kTolConservation = 1e-12;

struct ConservationEntry {
  std::size_t index = 0;
  bool conserved = true;
  double max_abs_coefficient = 0.0;
  std::vector<Term> offending;  // terms of L_f C above the bound
};

struct ConservationReport {
  bool passed = true;
  std::vector<ConservationEntry> entries;
};

ConservationReport validate_conservation(const PolyVectorField& vf,
                                         const std::vector<Polynomial>& fields);

/// Renders one monomial, e.g. "x1*x3^2".
std::string monomial_to_string(const Exponents& powers);

}  // namespace equistab::fields
