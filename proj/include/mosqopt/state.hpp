#pragma once

#include <array>
#include <cmath>
#include <initializer_list>

namespace mosqopt {

inline constexpr int kMaxStateDim = 4;

enum class Model { kSit, kWolbachia };

inline constexpr int state_dim(Model m) { return m == Model::kSit ? 3 : 4; }

// Compartment densities at an instant: (E, F, Ms) for the sterile-male
// system, (Eu, Fu, Ei, Fi) for the Wolbachia system. Value type, fixed
// capacity, immutable in spirit (operations return new values).
class StateVec {
 public:
  StateVec() = default;
  StateVec(std::initializer_list<double> xs) {
    for (double x : xs) {
      if (dim_ == kMaxStateDim) break;
      v_[dim_++] = x;
    }
  }
  static StateVec zeros(int dim) {
    StateVec s;
    s.dim_ = dim < 0 ? 0 : (dim > kMaxStateDim ? kMaxStateDim : dim);
    return s;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }

  bool all_finite() const {
    for (int i = 0; i < dim_; ++i)
      if (!std::isfinite(v_[i])) return false;
    return true;
  }
  double min() const {
    double m = v_[0];
    for (int i = 1; i < dim_; ++i) m = std::fmin(m, v_[i]);
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (int i = 0; i < dim_; ++i) m = std::fmax(m, std::fabs(v_[i]));
    return m;
  }

  StateVec& operator+=(const StateVec& o) {
    for (int i = 0; i < dim_; ++i) v_[i] += o.v_[i];
    return *this;
  }

 private:
  std::array<double, kMaxStateDim> v_{};
  int dim_ = 0;
};

inline StateVec operator+(StateVec a, const StateVec& b) { return a += b; }

inline StateVec operator*(double a, const StateVec& x) {
  StateVec r = x;
  for (int i = 0; i < r.dim(); ++i) r[i] *= a;
  return r;
}

// x + a*y, the only compound update RK sweeps need.
inline StateVec axpy(const StateVec& x, double a, const StateVec& y) {
  StateVec r = x;
  for (int i = 0; i < r.dim(); ++i) r[i] += a * y[i];
  return r;
}

inline double max_abs_diff(const StateVec& a, const StateVec& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::fmax(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace mosqopt
