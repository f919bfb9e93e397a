#pragma once

#include <array>
#include <cmath>

#include "mosqopt/state.hpp"

namespace mosqopt {

// Dense square matrix of dimension 1..6. Large enough for every Jacobian in
// this project, small enough to keep on the stack.
class SmallMatrix {
 public:
  static constexpr int kMax = 6;

  SmallMatrix() = default;
  explicit SmallMatrix(int n) : n_(n) {}

  int size() const { return n_; }
  double operator()(int i, int j) const { return a_[i * kMax + j]; }
  double& operator()(int i, int j) { return a_[i * kMax + j]; }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  // Induced infinity norm (max absolute row sum).
  double inf_norm() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (int j = 0; j < n_; ++j) s += std::fabs((*this)(i, j));
      m = std::fmax(m, s);
    }
    return m;
  }

  bool all_finite() const {
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (!std::isfinite((*this)(i, j))) return false;
    return true;
  }

  // y = A x, defined for n <= 4 where states live.
  StateVec apply(const StateVec& x) const {
    StateVec y = StateVec::zeros(n_);
    const int n = y.dim();  // clamped to the state capacity
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  // y = A^T x; the workhorse of the reverse (adjoint) sweeps.
  StateVec apply_transposed(const StateVec& x) const {
    StateVec y = StateVec::zeros(n_);
    const int n = y.dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) y[j] += (*this)(i, j) * x[i];
    return y;
  }

 private:
  std::array<double, kMax * kMax> a_{};
  int n_ = 0;
};

}  // namespace mosqopt
