#include "oracles.hpp"

#include <algorithm>
#include <stdexcept>

namespace equistab::testing {

std::size_t row_reduction_rank(std::vector<Vector> rows, double rel_tol) {
  if (rows.empty()) return 0;
  const std::size_t n = rows.front().size();
  double amax = 0.0;
  for (const auto& r : rows)
    for (double v : r) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) return 0;
  const double tol = rel_tol * amax;

  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t piv = rank;
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (std::abs(rows[r][col]) > std::abs(rows[piv][col])) piv = r;
    }
    if (std::abs(rows[piv][col]) <= tol) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      const double f = rows[r][col] / rows[rank][col];
      for (std::size_t c = col; c < n; ++c) rows[r][c] -= f * rows[rank][c];
    }
    ++rank;
  }
  return rank;
}

std::pair<double, double> eig2x2(double a, double b, double c) {
  const double mean = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mean - rad, mean + rad};
}

namespace {

// Number of eigenvalues of A strictly below sigma (Sylvester's law of inertia).
std::size_t count_below(const SymmetricMatrix& a, double sigma) {
  const std::size_t n = a.dim();
  std::vector<Vector> m = a.rows();
  for (std::size_t i = 0; i < n; ++i) m[i][i] -= sigma;
  std::size_t neg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double d = m[k][k];
    if (d == 0.0) d = 1e-300;
    if (d < 0) ++neg;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m[i][k] / d;
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  return neg;
}

}  // namespace

double min_eigenvalue_bisection(const SymmetricMatrix& a, double tol) {
  // Gershgorin bounds.
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (j != i) r += std::abs(a(i, j));
    }
    lo = std::min(lo, a(i, i) - r);
    hi = std::max(hi, a(i, i) + r);
  }
  lo -= 1.0;
  hi += 1.0;
  const double scale = std::max(1.0, hi - lo);
  while (hi - lo > tol * scale) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(a, mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Vector gaussian_vector(Rng& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (double& x : v) x = nd(rng);
  return v;
}

Vector random_unit_vector(Rng& rng, std::size_t n) {
  for (;;) {
    Vector v = gaussian_vector(rng, n);
    const double len = numkit::norm2(v);
    if (len > 1e-8) return numkit::scaled(1.0 / len, v);
  }
}

SymmetricMatrix random_symmetric(Rng& rng, std::size_t n, double scale) {
  SymmetricMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, uniform(rng, -scale, scale));
  return m;
}

std::vector<Vector> random_orthonormal(Rng& rng, std::size_t n) {
  std::vector<Vector> q;
  while (q.size() < n) {
    Vector v = gaussian_vector(rng, n);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) v = numkit::axpy(-numkit::dot(u, v), u, v);
    const double len = numkit::norm2(v);
    if (len < 1e-6) continue;
    q.push_back(numkit::scaled(1.0 / len, v));
  }
  return q;
}

Polynomial random_polynomial(Rng& rng, std::size_t dim, int max_degree, std::size_t terms) {
  Polynomial p(dim);
  for (std::size_t t = 0; t < terms; ++t) {
    fields::Exponents e(dim, 0);
    const int deg = uniform_int(rng, 0, max_degree);
    for (int d = 0; d < deg; ++d) ++e[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(dim) - 1))];
    p += Polynomial::monomial(uniform(rng, -2.0, 2.0), e);
  }
  return p;
}

Vector fd_gradient(const Polynomial& p, const Vector& x, double h) {
  Vector g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    Vector xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (p.eval(xp) - p.eval(xm)) / (2.0 * h);
  }
  return g;
}

std::vector<Vector> fd_hessian(const Polynomial& p, const Vector& x, double h) {
  const std::size_t n = x.size();
  std::vector<Vector> h_rows(n, Vector(n));
  for (std::size_t k = 0; k < n; ++k) {
    Vector xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const Vector gp = p.gradient(xp);
    const Vector gm = p.gradient(xm);
    for (std::size_t i = 0; i < n; ++i) h_rows[i][k] = (gp[i] - gm[i]) / (2.0 * h);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (h_rows[i][j] + h_rows[j][i]);
      h_rows[i][j] = s;
      h_rows[j][i] = s;
    }
  return h_rows;
}

Polynomial poly_det(const std::vector<std::vector<Polynomial>>& m) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("poly_det: empty matrix");
  const std::size_t dim = m[0][0].dim();
  if (n == 1) return m[0][0];
  Polynomial out(dim);
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c].is_zero()) continue;
    std::vector<std::vector<Polynomial>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Polynomial> row;
      for (std::size_t cc = 0; cc < n; ++cc) {
        if (cc != c) row.push_back(m[r][cc]);
      }
      minor.push_back(std::move(row));
    }
    Polynomial term = m[0][c] * poly_det(minor);
    if (c % 2 == 0) {
      out += term;
    } else {
      out -= term;
    }
  }
  return out;
}

PolyVectorField cross_field(const std::vector<std::vector<Polynomial>>& rows, std::size_t n) {
  if (rows.size() + 1 != n) throw std::invalid_argument("cross_field: need n-1 rows");
  std::vector<Polynomial> comps;
  for (std::size_t m = 0; m < n; ++m) {
    // Cofactor of entry (0, m) in [e_m; rows].
    std::vector<std::vector<Polynomial>> minor;
    for (const auto& r : rows) {
      std::vector<Polynomial> row;
      for (std::size_t c = 0; c < n; ++c) {
        if (c != m) row.push_back(r[c]);
      }
      minor.push_back(std::move(row));
    }
    Polynomial d = n == 1 ? Polynomial::constant(n, 1.0) : poly_det(minor);
    if (m % 2 == 1) d *= -1.0;
    comps.push_back(std::move(d));
  }
  return PolyVectorField(std::move(comps));
}

std::vector<Polynomial> poly_gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  for (std::size_t k = 0; k < p.dim(); ++k) g.push_back(p.derivative(k));
  return g;
}

namespace {

Vector random_int_vector(Rng& rng, std::size_t n, int lo, int hi) {
  Vector v(n);
  for (double& x : v) x = uniform_int(rng, lo, hi);
  return v;
}

}  // namespace

RandomSystem random_conserved_system(Rng& rng, std::size_t n, std::size_t k) {
  if (k + 1 > n) throw std::invalid_argument("random_conserved_system: need k <= n - 1");

  // f(x_e) vanishes iff the n-1 rows of the cross product are dependent at x_e.
  const std::size_t max_rank = (k == n - 1) ? k - 1 : k;
  const auto r = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(max_rank)));

  std::vector<Vector> grads;
  for (;;) {
    std::vector<Vector> base;
    for (std::size_t s = 0; s < r; ++s) base.push_back(random_int_vector(rng, n, -2, 2));
    grads.assign(k, Vector(n, 0.0));
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t s = 0; s < r; ++s) grads[j] = numkit::axpy(uniform_int(rng, -2, 2), base[s], grads[j]);
    if (row_reduction_rank(grads) == r) break;
  }

  const Vector x_e = random_int_vector(rng, n, -1, 1);
  std::vector<Polynomial> y;
  for (std::size_t i = 0; i < n; ++i) y.push_back(Polynomial::variable(n, i) - Polynomial::constant(n, x_e[i]));

  std::vector<Polynomial> constants;
  for (std::size_t j = 0; j < k; ++j) {
    Polynomial c(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (grads[j][i] != 0.0) c += grads[j][i] * y[i];
    }
    const bool diagonal_pd = uniform_int(rng, 0, 2) == 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        int coeff;
        if (diagonal_pd) {
          coeff = (a == b) ? uniform_int(rng, 1, 3) : 0;
        } else {
          coeff = uniform_int(rng, -2, 2);
        }
        if (coeff != 0) c += static_cast<double>(coeff) * (y[a] * y[b]);
      }
    }
    if (uniform_int(rng, 0, 1) == 1) {
      const auto a = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
      const auto b = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
      const auto d = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n) - 1));
      c += static_cast<double>(uniform_int(rng, 0, 1) * 2 - 1) * (y[a] * y[b] * y[d]);
    }
    constants.push_back(std::move(c));
  }

  std::vector<std::vector<Polynomial>> rows;
  for (const auto& c : constants) rows.push_back(poly_gradient(c));
  for (std::size_t extra = 0; rows.size() + 1 < n; ++extra) {
    Vector v = (extra == 0 && r == k) ? grads[0] : random_int_vector(rng, n, -2, 2);
    std::vector<Polynomial> row;
    for (double vi : v) row.push_back(Polynomial::constant(n, vi));
    rows.push_back(std::move(row));
  }

  return RandomSystem{cross_field(rows, n), std::move(constants), x_e, r};
}

RandomSystem random_gradient_set(Rng& rng, std::size_t n, std::size_t k) {
  const auto r = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(std::min(n - 1, k))));
  std::vector<Vector> base;
  for (std::size_t s = 0; s < r; ++s) base.push_back(gaussian_vector(rng, n));
  std::vector<Polynomial> constants;
  for (std::size_t j = 0; j < k; ++j) {
    Vector g(n, 0.0);
    for (const auto& b : base) g = numkit::axpy(uniform(rng, -2, 2), b, g);
    Polynomial c(n);
    // Degree >= 2 terms only, so the gradient at the origin is exactly g.
    for (const auto& t : random_polynomial(rng, n, 3, 4).terms()) {
      int deg = 0;
      for (int e : t.powers) deg += e;
      if (deg >= 2) c += Polynomial::monomial(t.coeff, t.powers);
    }
    for (std::size_t i = 0; i < n; ++i) {
      fields::Exponents e(n, 0);
      e[i] = 1;
      c += Polynomial::monomial(g[i], e);
    }
    constants.push_back(std::move(c));
  }
  PolyVectorField zero(std::vector<Polynomial>(n, Polynomial(n)));
  return RandomSystem{std::move(zero), std::move(constants), Vector(n, 0.0), r};
}

std::pair<SymmetricMatrix, SymmetricMatrix> random_finsler_pair(Rng& rng, std::size_t n) {
  const auto basis = random_orthonormal(rng, n);
  const auto r = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n)));  // rank of Q
  // Coordinates: first r basis vectors span range(Q), the rest span ker(Q).
  std::vector<Vector> m(n, Vector(n, 0.0));
  Vector q_diag(n, 0.0);
  for (std::size_t i = 0; i < r; ++i) q_diag[i] = uniform(rng, 0.1, 2.0);

  const std::size_t kdim = n - r;
  if (kdim > 0) {
    const auto kb = random_orthonormal(rng, kdim);
    Vector lam(kdim);
    for (double& l : lam) l = uniform(rng, 0.1, 2.0);
    for (std::size_t a = 0; a < kdim; ++a)
      for (std::size_t b = 0; b < kdim; ++b) {
        double s = 0.0;
        for (std::size_t t = 0; t < kdim; ++t) s += kb[t][a] * lam[t] * kb[t][b];
        m[r + a][r + b] = s;
      }
  }
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      if (b >= r && a >= r) continue;
      const double v = b < r ? uniform(rng, -3.0, 3.0) : uniform(rng, -2.0, 2.0);
      m[a][b] = v;
      m[b][a] = v;
    }
  }

  // Rotate: X = U M U^T with U columns = basis.
  auto rotate = [&](const std::vector<Vector>& inner) {
    std::vector<Vector> out(n, Vector(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) s += basis[a][i] * inner[a][b] * basis[b][j];
        out[i][j] = s;
      }
    return SymmetricMatrix::from_rows(out);
  };
  std::vector<Vector> qm(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) qm[i][i] = q_diag[i];
  return {rotate(m), rotate(qm)};
}

}  // namespace equistab::testing
