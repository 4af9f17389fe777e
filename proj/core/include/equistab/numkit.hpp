#pragma once

// Dense symmetric linear algebra with explicit tolerance contracts.
//
// Everything in here is small-dimensional (tens, at most a few hundred) and
// value-typed. Matrices are immutable once built; every routine is a pure
// function of its inputs.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace equistab::numkit {

using Vector = std::vector<double>;

/// Eigenvalue sign threshold, relative to max(1, ||A||_F).
inline constexpr double kTolPd = 1e-9;
/// Singular-value cutoff relative to the largest singular value.
inline constexpr double kTolRank = 1e-10;
/// Allowed negative eigenvalue for a matrix declared positive semidefinite,
/// relative to max(1, ||Q||_F).
inline constexpr double kTolPsd = 1e-9;
inline constexpr int kMaxJacobiSweeps = 100;
/// Finsler schedule is {0, 1, 2, 4, ..., 2^kFinslerMaxExponent}.
inline constexpr int kFinslerMaxExponent = 60;

/// Caller broke a documented precondition (dimension mismatch and the like).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
Vector axpy(double a, const Vector& x, const Vector& y);  // a*x + y
Vector scaled(double a, const Vector& x);

/// Dense symmetric matrix stored in full, row-major.
///
/// Symmetry is exact: every writer sets (i,j) and (j,i) together, and
/// construction from arbitrary rows averages the two triangles. A
/// zero-dimensional matrix exists only as the result of restricting a form to
/// the trivial subspace.
class SymmetricMatrix {
 public:
  /// Zero matrix of the given dimension (dim >= 1).
  explicit SymmetricMatrix(std::size_t dim);

  static SymmetricMatrix zero_dimensional();
  static SymmetricMatrix identity(std::size_t dim);
  static SymmetricMatrix diagonal(const Vector& diag);
  /// Builds (R + R^T) / 2 from a square row list.
  static SymmetricMatrix from_rows(const std::vector<Vector>& rows);
  /// v v^T.
  static SymmetricMatrix outer(const Vector& v);

  std::size_t dim() const { return dim_; }
  bool is_zero_dimensional() const { return dim_ == 0; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double value);
  void add_to(std::size_t i, std::size_t j, double value);

  double frobenius_norm() const;
  Vector apply(const Vector& x) const;
  double quadratic_form(const Vector& x) const;
  std::vector<Vector> rows() const;

  SymmetricMatrix& operator+=(const SymmetricMatrix& other);
  SymmetricMatrix& operator-=(const SymmetricMatrix& other);
  SymmetricMatrix& operator*=(double s);

  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
  friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
  friend SymmetricMatrix operator*(double s, SymmetricMatrix a) { return a *= s; }
  friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

 private:
  SymmetricMatrix() = default;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  Vector eigenvalues;                 // ascending
  std::vector<Vector> eigenvectors;   // eigenvectors[k] pairs with eigenvalues[k]
  int sweeps = 0;
};

/// Cyclic Jacobi. Throws NumericError if kMaxJacobiSweeps is exhausted.
EigenDecomposition symmetric_eigen(const SymmetricMatrix& a);

/// Orthonormal basis of a subspace of R^ambient_dim (possibly empty).
struct SubspaceBasis {
  std::size_t ambient_dim = 0;
  std::vector<Vector> basis;

  std::size_t size() const { return basis.size(); }
  bool empty() const { return basis.empty(); }

  static SubspaceBasis full_space(std::size_t n);
  /// Euclidean distance from x to the span.
  double distance_to(const Vector& x) const;
};

enum class Definiteness {
  PositiveDefinite,
  NegativeDefinite,
  PositiveSemidefinite,
  NegativeSemidefinite,
  Indefinite,
  ZeroDimensional,
};

std::string to_string(Definiteness d);

/// Classification plus the numbers it was decided from.
struct DefinitenessEvidence {
  Definiteness kind = Definiteness::ZeroDimensional;
  Vector eigenvalues;
  double scale = 1.0;   // max(1, ||A||_F)
  double margin = 0.0;  // min |lambda| / scale; 0 for ZeroDimensional

  bool is_definite() const {
    return kind == Definiteness::PositiveDefinite || kind == Definiteness::NegativeDefinite;
  }
};

DefinitenessEvidence analyze_definiteness(const SymmetricMatrix& a);
Definiteness classify_definiteness(const SymmetricMatrix& a);

/// Thin SVD by one-sided Jacobi on the columns of an m x n matrix.
/// Singular values are returned unsorted, paired with right singular vectors.
struct ColumnSvd {
  Vector singular_values;            // length n
  std::vector<Vector> right_vectors; // n vectors of length n, orthonormal
  std::vector<Vector> left_scaled;   // A v_j = sigma_j u_j, length m each
};

ColumnSvd column_svd(const std::vector<Vector>& columns, std::size_t rows);

/// Numerical rank of a vector family (same rule as null_space).
std::size_t numerical_rank(const std::vector<Vector>& vectors, std::size_t ambient_dim);

/// Orthonormal basis of {x : v^T x = 0 for every v in vectors}.
SubspaceBasis null_space(const std::vector<Vector>& vectors, std::size_t ambient_dim);

struct LeastSquaresSolution {
  Vector coefficients;
  double residual_norm = 0.0;
  std::size_t rank = 0;
};

/// Minimum-norm minimizer of || sum_j c_j columns[j] - target ||_2.
LeastSquaresSolution least_squares_minnorm(const std::vector<Vector>& columns, const Vector& target);

/// B^T A B. An empty basis yields the zero-dimensional matrix.
SymmetricMatrix restrict_quadratic_form(const SymmetricMatrix& a, const SubspaceBasis& b);

struct FinslerCertificate {
  double alpha = 0.0;
  double min_eigenvalue = 0.0;  // of sign * (P + alpha Q)
};

/// Constructive search for alpha with sign * (P + alpha Q) positive definite.
///
/// The schedule walks t in {0, 1, 2, 4, ..., 2^60} over sign*P + t*Q and
/// reports alpha = sign * t, so the negative branch reuses the positive path
/// on -P. Definiteness uses the same scale-relative rule as
/// classify_definiteness. An empty result means "no certificate found on the
/// schedule", never a disproof.
///
/// Throws ContractError if Q is not PSD or the dimensions differ.
std::optional<FinslerCertificate> finsler_alpha_search(const SymmetricMatrix& p,
                                                       const SymmetricMatrix& q,
                                                       int sign);

/// The schedule values, in search order.
std::vector<double> finsler_schedule();

}  // namespace equistab::numkit
