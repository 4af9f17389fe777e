#include "equistab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace equistab::fields {

using numkit::ContractError;

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    std::ostringstream os;
    os << what << ": dimension mismatch (expected " << expected << ", got " << got << ")";
    throw ContractError(os.str());
  }
}

}  // namespace

Polynomial::Polynomial(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ContractError("Polynomial: dim must be >= 1");
}

Polynomial::Polynomial(std::size_t dim, const std::vector<Term>& terms) : Polynomial(dim) {
  for (const auto& t : terms) add_term(t.coeff, t.powers);
}

Polynomial Polynomial::constant(std::size_t dim, double c) {
  Polynomial p(dim);
  p.add_term(c, Exponents(dim, 0));
  return p;
}

Polynomial Polynomial::variable(std::size_t dim, std::size_t k) {
  if (k >= dim) throw ContractError("Polynomial::variable: index out of range");
  Exponents e(dim, 0);
  e[k] = 1;
  Polynomial p(dim);
  p.add_term(1.0, e);
  return p;
}

Polynomial Polynomial::monomial(double coeff, Exponents powers) {
  Polynomial p(powers.size());
  p.add_term(coeff, powers);
  return p;
}

void Polynomial::add_term(double coeff, const Exponents& powers) {
  check_dim(dim_, powers.size(), "Polynomial term");
  for (int e : powers) {
    if (e < 0) throw ContractError("Polynomial term: negative exponent");
  }
  if (!std::isfinite(coeff)) throw ContractError("Polynomial term: non-finite coefficient");
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(powers, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int p : e) s += p;
    d = std::max(d, s);
  }
  return d;
}

double Polynomial::coefficient(const Exponents& powers) const {
  auto it = terms_.find(powers);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::constant_term() const { return coefficient(Exponents(dim_, 0)); }

std::vector<Term> Polynomial::terms() const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& [e, c] : terms_) out.push_back({c, e});
  return out;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void Polynomial::check_point(const Vector& x, const char* what) const { check_dim(dim_, x.size(), what); }

double Polynomial::eval(const Vector& x) const {
  check_point(x, "Polynomial::eval");
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double m = c;
    for (std::size_t k = 0; k < dim_; ++k) {
      if (e[k] != 0) m *= ipow(x[k], e[k]);
    }
    s += m;
  }
  return s;
}

Vector Polynomial::gradient(const Vector& x) const {
  check_point(x, "Polynomial::gradient");
  Vector g(dim_, 0.0);
  for (const auto& [e, c] : terms_) {
    for (std::size_t k = 0; k < dim_; ++k) {
      if (e[k] == 0) continue;
      double m = c * e[k];
      for (std::size_t l = 0; l < dim_; ++l) {
        const int p = (l == k) ? e[l] - 1 : e[l];
        if (p != 0) m *= ipow(x[l], p);
      }
      g[k] += m;
    }
  }
  return g;
}

SymmetricMatrix Polynomial::hessian(const Vector& x) const {
  check_point(x, "Polynomial::hessian");
  SymmetricMatrix h(dim_);
  Exponents reduced(dim_);
  for (const auto& [e, c] : terms_) {
    for (std::size_t i = 0; i < dim_; ++i) {
      if (e[i] == 0) continue;
      for (std::size_t j = i; j < dim_; ++j) {
        reduced = e;
        double m = c * reduced[i];
        --reduced[i];
        if (reduced[j] == 0) continue;
        m *= reduced[j];
        --reduced[j];
        for (std::size_t l = 0; l < dim_; ++l) {
          if (reduced[l] != 0) m *= ipow(x[l], reduced[l]);
        }
        h.add_to(i, j, m);
      }
    }
  }
  return h;
}

Polynomial Polynomial::derivative(std::size_t k) const {
  if (k >= dim_) throw ContractError("Polynomial::derivative: index out of range");
  Polynomial out(dim_);
  for (const auto& [e, c] : terms_) {
    if (e[k] == 0) continue;
    Exponents d = e;
    --d[k];
    out.add_term(c * e[k], d);
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_dim(dim_, other.dim_, "Polynomial +");
  for (const auto& [e, c] : other.terms_) add_term(c, e);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_dim(dim_, other.dim_, "Polynomial -");
  for (const auto& [e, c] : other.terms_) add_term(-c, e);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  check_dim(a.dim_, b.dim_, "Polynomial *");
  Polynomial out(a.dim_);
  Exponents e(a.dim_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t k = 0; k < a.dim_; ++k) e[k] = ea[k] + eb[k];
      out.add_term(ca * cb, e);
    }
  }
  return out;
}

std::string monomial_to_string(const Exponents& powers) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    if (powers[k] == 0) continue;
    if (!first) os << "*";
    os << "x" << (k + 1);
    if (powers[k] > 1) os << "^" << powers[k];
    first = false;
  }
  return first ? std::string("1") : os.str();
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(12);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    const bool is_const = std::all_of(e.begin(), e.end(), [](int p) { return p == 0; });
    const double mag = std::abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (is_const) {
      os << mag;
    } else {
      if (mag != 1.0) os << mag << "*";
      os << monomial_to_string(e);
    }
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

PolyVectorField::PolyVectorField(std::vector<Polynomial> components) : components_(std::move(components)) {
  if (components_.empty()) throw ContractError("PolyVectorField: needs at least one component");
  for (const auto& c : components_) check_dim(components_.size(), c.dim(), "PolyVectorField component");
}

Vector PolyVectorField::eval(const Vector& x) const {
  Vector out;
  eval_into(x, out);
  return out;
}

void PolyVectorField::eval_into(const Vector& x, Vector& out) const {
  out.resize(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) out[k] = components_[k].eval(x);
}

EquilibriumPoint::EquilibriumPoint(const PolyVectorField& vf, Vector coords) : coords_(std::move(coords)) {
  check_dim(vf.dim(), coords_.size(), "EquilibriumPoint");
  residual_ = numkit::norm2(vf.eval(coords_));
  const double bound = kTolEquilibrium * (1.0 + numkit::norm2(coords_));
  if (!(residual_ <= bound)) {
    std::ostringstream os;
    os << "EquilibriumPoint: ||f(x)|| = " << residual_ << " exceeds " << bound;
    throw EquilibriumError(os.str());
  }
}

Polynomial lie_derivative(const Polynomial& field, const PolyVectorField& vf) {
  check_dim(vf.dim(), field.dim(), "lie_derivative");
  Polynomial out(field.dim());
  for (std::size_t k = 0; k < field.dim(); ++k) {
    Polynomial dk = field.derivative(k);
    if (dk.is_zero()) continue;
    out += dk * vf.component(k);
  }
  return out;
}

ConservationReport validate_conservation(const PolyVectorField& vf, const std::vector<Polynomial>& fields) {
  ConservationReport report;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const Polynomial lf = lie_derivative(fields[i], vf);
    ConservationEntry entry;
    entry.index = i;
    entry.max_abs_coefficient = lf.max_abs_coefficient();
    for (const auto& t : lf.terms()) {
      if (std::abs(t.coeff) > kTolConservation) entry.offending.push_back(t);
    }
    entry.conserved = entry.offending.empty();
    report.passed = report.passed && entry.conserved;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace equistab::fields
