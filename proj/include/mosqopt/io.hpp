#pragma once

#include <string>
#include <vector>

#include "mosqopt/control.hpp"
#include "mosqopt/integrate.hpp"

namespace mosqopt {

// Full-precision decimal rendering (17 significant digits), stable across
// runs; shared by every CSV/dat emitter.
std::string format_full(double x);

// Column names of a trajectory: t, compartments, u.
std::vector<std::string> trajectory_columns(Model model);

// Trajectory CSV: header row, one row per node, LF line endings. The
// control column carries the interval value starting at each node; the
// final node repeats the last interval (step-plot convention).
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// Control CSV, same conventions, columns t,u.
void write_control_csv(const std::string& path, const ControlGrid& u);

// Space-separated twins of the CSVs for direct gnuplot consumption.
void write_trajectory_dat(const std::string& path, const Trajectory& traj);
void write_control_dat(const std::string& path, const ControlGrid& u);

// Stacked time-series panels (one per compartment, one for the control),
// plain hand-emitted SVG.
void write_simulation_svg(const std::string& path, const Trajectory& traj);

// Two panels: release schedule (bars) above, state trajectories below.
void write_solution_svg(const std::string& path, const Trajectory& traj);

}  // namespace mosqopt
