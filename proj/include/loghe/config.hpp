#pragma once

#include <string>
#include <vector>

#include "loghe/sde.hpp"

namespace loghe {

/// Parsed experiment description: flat key = value lines with optional
/// [section] headers; keys are globally unique. Unknown keys are rejected.
struct ExperimentSpec {
  std::string experiment;
  SimConfig sim;
  int replicates = 1;
  double p = 2.0;      // moment exponent, also the schedule's p
  double theta = 0.0;  // H.2 exponent used for T_p and the schedule
  Vec p_list;          // defaults to {p}
  Vec delta_list{1e-2, 1e-3, 1e-4};
  std::vector<int> n_list{8, 16, 32};
  double beta = 0.25;
  double p_wnorm = 1.5;
  double M_threshold = 0.0;  // 0 -> 25 ||u0||^2
  int t_points = 10;         // Lyapunov time-grid size
  int cases = 0;             // 0 -> per-suite defaults (1e4 gap / 1e3 Sobolev / 200 Gronwall)
  double saturation_threshold = 0.2;
  std::string out_dir = "out";
  bool corrupt_rhs = false;  // test hook: multiplies suite right-hand sides by 0
};

ExperimentSpec parse_config(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text, const std::string& origin = "<memory>");

}  // namespace loghe
