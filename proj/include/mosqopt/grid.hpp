#pragma once

#include "mosqopt/errors.hpp"

namespace mosqopt {

// Uniform mesh of N intervals on [0, T] days; nodes t_k = k*dt.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double horizon_days, int intervals)
      : T_(horizon_days), N_(intervals) {
    if (!(T_ > 0.0)) throw InvalidConstraintError("TimeGrid: T must be > 0");
    if (N_ < 1) throw InvalidConstraintError("TimeGrid: N must be >= 1");
  }

  double T() const { return T_; }
  int N() const { return N_; }
  double dt() const { return T_ / N_; }
  double node(int k) const { return k * dt(); }

  bool operator==(const TimeGrid& o) const { return T_ == o.T_ && N_ == o.N_; }

 private:
  double T_ = 1.0;
  int N_ = 1;
};

// Default mesh density: resolves the fastest tabulated rate with margin.
inline int default_intervals(double horizon_days) {
  int per_day = static_cast<int>(horizon_days * 10.0 + 0.5);
  return per_day > 200 ? per_day : 200;
}

}  // namespace mosqopt
