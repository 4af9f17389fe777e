#include "equistab/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace equistab::numkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_same_length(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << what << ": length mismatch (" << a.size() << " vs " << b.size() << ")";
    throw ContractError(os.str());
  }
}

}  // namespace

double dot(const Vector& a, const Vector& b) {
  require_same_length(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& v) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double x : v) s += (x / scale) * (x / scale);
  return scale * std::sqrt(s);
}

Vector axpy(double a, const Vector& x, const Vector& y) {
  require_same_length(x, y, "axpy");
  Vector out(y);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
  return out;
}

Vector scaled(double a, const Vector& x) {
  Vector out(x);
  for (double& v : out) v *= a;
  return out;
}

// ---------------------------------------------------------------------------
// SymmetricMatrix

SymmetricMatrix::SymmetricMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
  if (dim == 0) throw ContractError("SymmetricMatrix: dim must be >= 1");
}

SymmetricMatrix SymmetricMatrix::zero_dimensional() { return SymmetricMatrix(); }

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
  SymmetricMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.data_[i * dim + i] = 1.0;
  return m;
}

SymmetricMatrix SymmetricMatrix::diagonal(const Vector& diag) {
  SymmetricMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * m.dim_ + i] = diag[i];
  return m;
}

SymmetricMatrix SymmetricMatrix::from_rows(const std::vector<Vector>& rows) {
  SymmetricMatrix m(rows.size());
  const std::size_t n = rows.size();
  for (const auto& r : rows) {
    if (r.size() != n) throw ContractError("SymmetricMatrix::from_rows: rows must be square");
  }
  for (std::size_t i = 0; i < n; ++i) {
    m.data_[i * n + i] = rows[i][i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (rows[i][j] + rows[j][i]);
      m.data_[i * n + j] = v;
      m.data_[j * n + i] = v;
    }
  }
  return m;
}

SymmetricMatrix SymmetricMatrix::outer(const Vector& v) {
  SymmetricMatrix m(v.size());
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.data_[i * n + j] = v[i] * v[j];
  return m;
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
  data_[i * dim_ + j] = value;
  data_[j * dim_ + i] = value;
}

void SymmetricMatrix::add_to(std::size_t i, std::size_t j, double value) {
  data_[i * dim_ + j] += value;
  if (i != j) data_[j * dim_ + i] += value;
}

double SymmetricMatrix::frobenius_norm() const { return norm2(data_); }

Vector SymmetricMatrix::apply(const Vector& x) const {
  if (x.size() != dim_) throw ContractError("SymmetricMatrix::apply: dimension mismatch");
  Vector y(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += data_[i * dim_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

double SymmetricMatrix::quadratic_form(const Vector& x) const { return dot(x, apply(x)); }

std::vector<Vector> SymmetricMatrix::rows() const {
  std::vector<Vector> out(dim_, Vector(dim_));
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out[i][j] = data_[i * dim_ + j];
  return out;
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& other) {
  if (other.dim_ != dim_) throw ContractError("SymmetricMatrix +: dimension mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator-=(const SymmetricMatrix& other) {
  if (other.dim_ != dim_) throw ContractError("SymmetricMatrix -: dimension mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Eigen

EigenDecomposition symmetric_eigen(const SymmetricMatrix& input) {
  const std::size_t n = input.dim();
  EigenDecomposition out;
  if (n == 0) return out;

  std::vector<Vector> a = input.rows();
  std::vector<Vector> v(n, Vector(n, 0.0));  // columns are eigenvectors: v[row][col]
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  const double fro = input.frobenius_norm();
  // Off-diagonal mass below this is numerically zero relative to the matrix.
  const double target = kEps * 1e-2 * fro;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) s += a[p][q] * a[p][q];
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  bool converged = (fro == 0.0) || off_norm() <= target;
  while (!converged) {
    if (sweep >= kMaxJacobiSweeps) {
      std::ostringstream os;
      os << "symmetric_eigen: no convergence after " << sweep
         << " Jacobi sweeps (||A||_F = " << fro << ", off-diagonal norm = " << off_norm() << ")";
      throw NumericError(os.str());
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        if (apq == 0.0) continue;
        const double app = a[p][p];
        const double aqq = a[q][q];
        // Rotation angle annihilating a[p][q].
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        }
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = 0.0;
        a[q][p] = 0.0;
        a[p][p] = app - t * apq;
        a[q][q] = aqq + t * apq;

        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
    converged = off_norm() <= target;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i][i] < a[j][j]; });

  out.sweeps = sweep;
  out.eigenvalues.reserve(n);
  out.eigenvectors.reserve(n);
  for (std::size_t idx : order) {
    out.eigenvalues.push_back(a[idx][idx]);
    Vector col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][idx];
    out.eigenvectors.push_back(std::move(col));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Definiteness

std::string to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "positive_definite";
    case Definiteness::NegativeDefinite: return "negative_definite";
    case Definiteness::PositiveSemidefinite: return "positive_semidefinite";
    case Definiteness::NegativeSemidefinite: return "negative_semidefinite";
    case Definiteness::Indefinite: return "indefinite";
    case Definiteness::ZeroDimensional: return "zero_dimensional";
  }
  return "unknown";
}

DefinitenessEvidence analyze_definiteness(const SymmetricMatrix& a) {
  DefinitenessEvidence ev;
  if (a.is_zero_dimensional()) return ev;

  ev.eigenvalues = symmetric_eigen(a).eigenvalues;
  ev.scale = std::max(1.0, a.frobenius_norm());
  const double thr = kTolPd * ev.scale;

  std::size_t pos = 0, neg = 0, zero = 0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (double l : ev.eigenvalues) {
    if (l > thr) {
      ++pos;
    } else if (l < -thr) {
      ++neg;
    } else {
      ++zero;
    }
    min_abs = std::min(min_abs, std::abs(l));
  }
  ev.margin = min_abs / ev.scale;

  if (neg == 0 && zero == 0) {
    ev.kind = Definiteness::PositiveDefinite;
  } else if (pos == 0 && zero == 0) {
    ev.kind = Definiteness::NegativeDefinite;
  } else if (neg == 0) {
    ev.kind = Definiteness::PositiveSemidefinite;
  } else if (pos == 0) {
    ev.kind = Definiteness::NegativeSemidefinite;
  } else {
    ev.kind = Definiteness::Indefinite;
  }
  return ev;
}

Definiteness classify_definiteness(const SymmetricMatrix& a) { return analyze_definiteness(a).kind; }

// ---------------------------------------------------------------------------
// Subspaces, SVD, least squares

SubspaceBasis SubspaceBasis::full_space(std::size_t n) {
  SubspaceBasis b;
  b.ambient_dim = n;
  for (std::size_t i = 0; i < n; ++i) {
    Vector e(n, 0.0);
    e[i] = 1.0;
    b.basis.push_back(std::move(e));
  }
  return b;
}

double SubspaceBasis::distance_to(const Vector& x) const {
  if (x.size() != ambient_dim) throw ContractError("SubspaceBasis::distance_to: dimension mismatch");
  Vector r = x;
  for (const auto& b : basis) r = axpy(-dot(b, x), b, r);
  return norm2(r);
}

ColumnSvd column_svd(const std::vector<Vector>& columns, std::size_t rows) {
  const std::size_t n = columns.size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw ContractError("column_svd: column length mismatch");
  }

  std::vector<Vector> u = columns;
  std::vector<Vector> v(n, Vector(n, 0.0));  // v[j] is the j-th right vector
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  double fro2 = 0.0;
  for (const auto& c : u) fro2 += dot(c, c);
  // Columns below this squared norm are numerically zero; rotating them
  // against the rest only churns rounding noise.
  const double negligible = kEps * kEps * fro2;

  int sweep = 0;
  bool rotated = true;
  while (rotated) {
    if (sweep >= kMaxJacobiSweeps) {
      std::ostringstream os;
      os << "column_svd: one-sided Jacobi did not converge after " << sweep << " sweeps (||A||_F = "
         << std::sqrt(fro2) << ")";
      throw NumericError(os.str());
    }
    ++sweep;
    rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = dot(u[p], u[p]);
        const double beta = dot(u[q], u[q]);
        const double gamma = dot(u[p], u[q]);
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        if (std::min(alpha, beta) <= negligible) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        double t;
        if (std::abs(zeta) > 1e150) {
          t = 0.5 / zeta;
        } else {
          t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(zeta, 1.0));
        }
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = c * t;
        for (std::size_t k = 0; k < rows; ++k) {
          const double up = u[p][k];
          const double uq = u[q][k];
          u[p][k] = c * up - s * uq;
          u[q][k] = s * up + c * uq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vp = v[p][k];
          const double vq = v[q][k];
          v[p][k] = c * vp - s * vq;
          v[q][k] = s * vp + c * vq;
        }
      }
    }
  }

  ColumnSvd out;
  out.singular_values.reserve(n);
  for (const auto& col : u) out.singular_values.push_back(norm2(col));
  out.right_vectors = std::move(v);
  out.left_scaled = std::move(u);
  return out;
}

namespace {

// Transposes a row family (m rows of length n) into n columns of length m.
std::vector<Vector> as_columns(const std::vector<Vector>& vectors, std::size_t ambient_dim) {
  std::vector<Vector> cols(ambient_dim, Vector(vectors.size(), 0.0));
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    if (vectors[r].size() != ambient_dim) {
      std::ostringstream os;
      os << "null_space: vector " << r << " has length " << vectors[r].size() << ", expected "
         << ambient_dim;
      throw ContractError(os.str());
    }
    for (std::size_t c = 0; c < ambient_dim; ++c) cols[c][r] = vectors[r][c];
  }
  return cols;
}

double rank_threshold(const Vector& sigma) {
  double smax = 0.0;
  for (double s : sigma) smax = std::max(smax, s);
  return kTolRank * smax;
}

}  // namespace

std::size_t numerical_rank(const std::vector<Vector>& vectors, std::size_t ambient_dim) {
  return ambient_dim - null_space(vectors, ambient_dim).size();
}

SubspaceBasis null_space(const std::vector<Vector>& vectors, std::size_t ambient_dim) {
  if (vectors.empty()) return SubspaceBasis::full_space(ambient_dim);

  const ColumnSvd svd = column_svd(as_columns(vectors, ambient_dim), vectors.size());
  const double thr = rank_threshold(svd.singular_values);

  SubspaceBasis out;
  out.ambient_dim = ambient_dim;
  for (std::size_t j = 0; j < ambient_dim; ++j) {
    if (svd.singular_values[j] <= thr) out.basis.push_back(svd.right_vectors[j]);
  }
  return out;
}

LeastSquaresSolution least_squares_minnorm(const std::vector<Vector>& columns, const Vector& target) {
  for (const auto& c : columns) require_same_length(c, target, "least_squares_minnorm");

  LeastSquaresSolution out;
  out.coefficients.assign(columns.size(), 0.0);
  if (!columns.empty()) {
    const ColumnSvd svd = column_svd(columns, target.size());
    const double thr = rank_threshold(svd.singular_values);
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const double s = svd.singular_values[j];
      if (s <= thr || s == 0.0) continue;
      ++out.rank;
      // x += v_j (u_j^T b) / sigma_j with u_j = left_scaled_j / sigma_j.
      const double w = dot(svd.left_scaled[j], target) / (s * s);
      out.coefficients = axpy(w, svd.right_vectors[j], out.coefficients);
    }
  }

  Vector r = scaled(-1.0, target);
  for (std::size_t j = 0; j < columns.size(); ++j) r = axpy(out.coefficients[j], columns[j], r);
  out.residual_norm = norm2(r);
  return out;
}

SymmetricMatrix restrict_quadratic_form(const SymmetricMatrix& a, const SubspaceBasis& b) {
  if (b.ambient_dim != a.dim()) {
    std::ostringstream os;
    os << "restrict_quadratic_form: basis ambient dimension " << b.ambient_dim
       << " does not match matrix dimension " << a.dim();
    throw ContractError(os.str());
  }
  if (b.empty()) return SymmetricMatrix::zero_dimensional();

  const std::size_t m = b.size();
  std::vector<Vector> ab;
  ab.reserve(m);
  for (const auto& v : b.basis) ab.push_back(a.apply(v));

  std::vector<Vector> rows(m, Vector(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) rows[i][j] = dot(b.basis[i], ab[j]);
  return SymmetricMatrix::from_rows(rows);
}

std::vector<double> finsler_schedule() {
  std::vector<double> s{0.0};
  for (int k = 0; k <= kFinslerMaxExponent; ++k) s.push_back(std::ldexp(1.0, k));
  return s;
}

std::optional<FinslerCertificate> finsler_alpha_search(const SymmetricMatrix& p,
                                                       const SymmetricMatrix& q,
                                                       int sign) {
  if (p.dim() != q.dim()) throw ContractError("finsler_alpha_search: P and Q dimensions differ");
  if (sign != 1 && sign != -1) throw ContractError("finsler_alpha_search: sign must be +1 or -1");

  const auto q_eig = symmetric_eigen(q);
  const double q_floor = -kTolPsd * std::max(1.0, q.frobenius_norm());
  if (!q_eig.eigenvalues.empty() && q_eig.eigenvalues.front() < q_floor) {
    std::ostringstream os;
    os << "finsler_alpha_search: Q is not positive semidefinite (min eigenvalue "
       << q_eig.eigenvalues.front() << ")";
    throw ContractError(os.str());
  }

  const SymmetricMatrix signed_p = static_cast<double>(sign) * p;
  for (double t : finsler_schedule()) {
    const SymmetricMatrix m = signed_p + t * q;
    const auto ev = symmetric_eigen(m);
    const double thr = kTolPd * std::max(1.0, m.frobenius_norm());
    if (ev.eigenvalues.front() > thr) {
      return FinslerCertificate{t == 0.0 ? 0.0 : sign * t, ev.eigenvalues.front()};
    }
  }
  return std::nullopt;
}

}  // namespace equistab::numkit
