#include "wfgame/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wfgame {

std::vector<WeightedEdge> load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("edge list: cannot open " + path);
    std::vector<WeightedEdge> edges;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream ss(line);
        WeightedEdge e;
        if (!(ss >> e.x >> e.y >> e.weight)) {
            throw InvalidInput("edge list: malformed line " + std::to_string(lineno) + " in " + path);
        }
        edges.push_back(e);
    }
    return edges;
}

std::string format_double(double v) {
    char buf[40];
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.1f", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
    }
    return buf;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot write " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_kernel_csv(const std::string& path, const VotingKernel& kernel) {
    write_matrix_csv(path, kernel.q());
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record,
                          const std::string& params_json) {
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot write " + path);
    out << "# " << params_json << '\n';
    const int ells = record.w_ell.empty() ? 0 : static_cast<int>(record.w_ell.front().size());
    out << "time,p1";
    for (int ell = 1; ell <= ells; ++ell) out << ",W" << ell;
    out << ",log_weight\n";
    for (std::size_t i = 0; i < record.sample_times.size(); ++i) {
        out << format_double(record.sample_times[i]) << ',' << format_double(record.p1[i]);
        for (int ell = 0; ell < ells; ++ell) out << ',' << format_double(record.w_ell[i][ell]);
        out << ',' << format_double(record.weighted ? record.log_weight[i] : 0.0) << '\n';
    }
}

void write_samples_csv(const std::string& path, const std::vector<double>& samples,
                       const std::string& params_json, const std::string& column_name) {
    std::ofstream out(path);
    if (!out) throw SimulationError("cannot write " + path);
    out << "# " << params_json << '\n' << column_name << '\n';
    for (double s : samples) out << format_double(s) << '\n';
}

} // namespace wfgame
