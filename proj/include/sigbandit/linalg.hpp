#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sigbandit/error.hpp"

namespace sigbandit {

// Dense symmetric matrix in packed lower-triangular storage, so M(i, j) and
// M(j, i) are the same number by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

  static SymMatrix identity(std::size_t n, double scale = 1.0) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, scale);
    return m;
  }

  std::size_t order() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[packed(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { data_[packed(i, j)] = v; }
  void add(std::size_t i, std::size_t j, double v) { data_[packed(i, j)] += v; }

  void add_diagonal(double c) {
    for (std::size_t i = 0; i < n_; ++i) add(i, i, c);
  }

  // M += x x^T
  void add_outer(std::span<const double> x) {
    check_dim(x.size());
    for (std::size_t i = 0; i < n_; ++i) {
      const double xi = x[i];
      double* row = data_.data() + i * (i + 1) / 2;
      for (std::size_t j = 0; j <= i; ++j) row[j] += xi * x[j];
    }
  }

  std::vector<double> multiply(std::span<const double> x) const {
    check_dim(x.size());
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) y[i] += (*this)(i, j) * x[j];
    }
    return y;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
    }
    return std::sqrt(s);
  }

  void scale(double c) {
    for (double& v : data_) v *= c;
  }

  const std::vector<double>& packed_data() const noexcept { return data_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

  void check_dim(std::size_t n) const {
    if (n != n_) {
      throw Error(ErrorCode::ShapeMismatch, "vector of length " + std::to_string(n) +
                                                " against matrix of order " + std::to_string(n_));
    }
  }

 private:
  static std::size_t packed(std::size_t i, std::size_t j) {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }

  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Lower-triangular L with L L^T = M.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(const SymMatrix& m) : n_(m.order()), l_(n_ * n_, 0.0) {
    for (std::size_t j = 0; j < n_; ++j) {
      double diag = m(j, j);
      for (std::size_t k = 0; k < j; ++k) diag -= at(j, k) * at(j, k);
      if (!(diag > 0.0) || !std::isfinite(diag)) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "non-positive pivot " + std::to_string(diag) + " at column " + std::to_string(j));
      }
      const double ljj = std::sqrt(diag);
      at(j, j) = ljj;
      for (std::size_t i = j + 1; i < n_; ++i) {
        double s = m(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= at(i, k) * at(j, k);
        at(i, j) = s / ljj;
      }
    }
  }

  std::size_t order() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return l_[i * n_ + j]; }

  // Solves L y = b.
  std::vector<double> forward(std::span<const double> b) const {
    check(b.size());
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t k = 0; k < i; ++k) y[i] -= at(i, k) * y[k];
      y[i] /= at(i, i);
    }
    return y;
  }

  std::vector<double> solve(std::span<const double> b) const {
    std::vector<double> x = forward(b);
    for (std::size_t i = n_; i-- > 0;) {
      for (std::size_t k = i + 1; k < n_; ++k) x[i] -= at(k, i) * x[k];
      x[i] /= at(i, i);
    }
    return x;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return l_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return l_[i * n_ + j]; }
  void check(std::size_t n) const {
    if (n != n_) throw Error(ErrorCode::ShapeMismatch, "rhs length does not match factor order");
  }

  std::size_t n_;
  std::vector<double> l_;
};

inline std::vector<double> chol_solve(const SymMatrix& m, std::span<const double> b) {
  m.check_dim(b.size());
  return CholeskyFactor(m).solve(b);
}

// sqrt(x^T M^{-1} x) = |L^{-1} x|
inline double inv_quad_norm(const CholeskyFactor& factor, std::span<const double> x) {
  const std::vector<double> y = factor.forward(x);
  double s = 0.0;
  for (double v : y) s += v * v;
  return std::sqrt(s);
}

inline double inv_quad_norm(const SymMatrix& m, std::span<const double> x) {
  m.check_dim(x.size());
  return inv_quad_norm(CholeskyFactor(m), x);
}

inline SymMatrix rank1_update(SymMatrix m, std::span<const double> x) {
  m.add_outer(x);
  return m;
}

// All eigenvalues (ascending) by cyclic Jacobi rotations, iterated until the
// off-diagonal Frobenius norm drops below 1e-12 * ||M||_F.
inline std::vector<double> symmetric_eigenvalues(const SymMatrix& m) {
  const std::size_t n = m.order();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  }
  auto el = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  const double tol = 1e-12 * m.frobenius_norm();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) off += el(i, j) * el(i, j);
      }
    }
    if (std::sqrt(off) <= tol) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = el(p, q);
        if (apq == 0.0) continue;
        const double theta = (el(q, q) - el(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = el(k, p);
          const double akq = el(k, q);
          el(k, p) = c * akp - s * akq;
          el(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = el(p, k);
          const double aqk = el(q, k);
          el(p, k) = c * apk - s * aqk;
          el(q, k) = s * apk + c * aqk;
        }
        el(p, q) = 0.0;
        el(q, p) = 0.0;
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = el(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

inline double min_eigen(const SymMatrix& m) {
  if (m.order() == 0) throw Error(ErrorCode::ShapeMismatch, "empty matrix");
  return symmetric_eigenvalues(m).front();
}

inline double max_eigen(const SymMatrix& m) {
  if (m.order() == 0) throw Error(ErrorCode::ShapeMismatch, "empty matrix");
  return symmetric_eigenvalues(m).back();
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "dot of unequal lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace sigbandit
