#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "critnls/errors.hpp"

namespace critnls {

// Square band matrix with kl sub- and ku super-diagonals, stored row-wise.
template <class T>
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(std::size_t n, std::size_t kl, std::size_t ku)
      : n_(n), kl_(kl), ku_(ku), width_(kl + ku + 1), a_(n * (kl + ku + 1), T{}) {}

  std::size_t size() const { return n_; }
  std::size_t lower() const { return kl_; }
  std::size_t upper() const { return ku_; }

  bool in_band(std::size_t i, std::size_t j) const { return j + kl_ >= i && j <= i + ku_; }
  T& at(std::size_t i, std::size_t j) { return a_[i * width_ + (j + kl_ - i)]; }
  T at(std::size_t i, std::size_t j) const { return in_band(i, j) ? a_[i * width_ + (j + kl_ - i)] : T{}; }
  // Entry (i, i - kl + k) is row(i)[k].
  const T* row(std::size_t i) const { return a_.data() + i * width_; }

  std::vector<T> multiply(std::span<const T> x) const {
    std::vector<T> y(n_, T{});
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
      const std::size_t j1 = std::min(n_ - 1, i + ku_);
      T s{};
      for (std::size_t j = j0; j <= j1; ++j) s += a_[i * width_ + (j + kl_ - i)] * x[j];
      y[i] = s;
    }
    return y;
  }

 private:
  std::size_t n_ = 0, kl_ = 0, ku_ = 0, width_ = 1;
  std::vector<T> a_;
};

// LU factorization with partial pivoting; fill-in widens the upper band to kl + ku.
template <class T>
class BandLU {
 public:
  explicit BandLU(const BandMatrix<T>& m)
      : n_(m.size()), kl_(m.lower()), ku_(m.lower() + m.upper()), width_(kl_ + ku_ + 1),
        a_(n_ * width_, T{}), piv_(n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j0 = i >= kl_ ? i - kl_ : 0;
      const std::size_t j1 = std::min(n_ - 1, i + m.upper());
      for (std::size_t j = j0; j <= j1; ++j) ref(i, j) = m.at(i, j);
    }
    factor();
  }

  void solve_in_place(std::span<T> b) const {
    const std::size_t n = n_;
    for (std::size_t k = 0; k < n; ++k) {
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
      const T bk = b[k];
      const std::size_t i1 = std::min(n - 1, k + kl_);
      // Multiplier (i, k) sits kl - (i - k) places into row i.
      const T* l = a_.data() + (k + 1) * width_ + kl_ - 1;
      for (std::size_t i = k + 1; i <= i1; ++i, l += width_ - 1) b[i] -= *l * bk;
    }
    for (std::size_t k = n; k-- > 0;) {
      const T* u = a_.data() + k * width_ + kl_;
      const std::size_t m = std::min(n - 1 - k, ku_);
      // The freshly computed b[k + 1] enters last, so most of the row overlaps the previous one.
      T s = b[k];
      for (std::size_t j = m; j >= 1; --j) s -= u[j] * b[k + j];
      b[k] = s * inv_diag_[k];
    }
  }

  std::vector<T> solve(std::span<const T> b) const {
    std::vector<T> x(b.begin(), b.end());
    solve_in_place(x);
    return x;
  }

 private:
  T& ref(std::size_t i, std::size_t j) { return a_[i * width_ + (j + kl_ - i)]; }
  const T& cref(std::size_t i, std::size_t j) const { return a_[i * width_ + (j + kl_ - i)]; }

  void factor() {
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t i1 = std::min(n_ - 1, k + kl_);
      std::size_t p = k;
      double best = std::abs(ref(k, k));
      for (std::size_t i = k + 1; i <= i1; ++i) {
        const double v = std::abs(ref(i, k));
        if (v > best) { best = v; p = i; }
      }
      if (!(best > 0.0) || !std::isfinite(best))
        throw Error(ErrorKind::integrator, "singular band matrix at row " + std::to_string(k));
      piv_[k] = p;
      const std::size_t j1 = std::min(n_ - 1, k + ku_);
      if (p != k)
        for (std::size_t j = k; j <= j1; ++j) std::swap(ref(k, j), ref(p, j));
      const T pivot = ref(k, k);
      for (std::size_t i = k + 1; i <= i1; ++i) {
        const T l = ref(i, k) / pivot;
        ref(i, k) = l;
        if (l == T{}) continue;
        for (std::size_t j = k + 1; j <= j1; ++j) ref(i, j) -= l * ref(k, j);
      }
    }
    inv_diag_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) inv_diag_[k] = T(1) / ref(k, k);
  }

  std::size_t n_, kl_, ku_, width_;
  std::vector<T> a_;
  std::vector<std::size_t> piv_;
  std::vector<T> inv_diag_;
};

}  // namespace critnls
