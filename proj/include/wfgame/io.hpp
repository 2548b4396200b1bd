#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wfgame/kernel.hpp"
#include "wfgame/simulate.hpp"

namespace wfgame {

// Edge-list text file: one "x y weight" triple per line (0-based indices);
// blank lines and lines starting with '#' are skipped.
std::vector<WeightedEdge> load_edge_list(const std::string& path);

// Matrix as plain CSV, one row per line, 17 significant digits.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// Kernel transition matrix as CSV (debugging aid).
void write_kernel_csv(const std::string& path, const VotingKernel& kernel);

// Trajectory CSV: a '# {json}' header line with parameters and seed, then
// columns time, p1, W1..WL, log_weight.
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record,
                          const std::string& params_json);

// One-column sample CSV with the same '# {json}' header convention.
void write_samples_csv(const std::string& path, const std::vector<double>& samples,
                       const std::string& params_json, const std::string& column_name);

std::string format_double(double v);

} // namespace wfgame
