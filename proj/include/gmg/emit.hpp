#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace gmg {

/// One benchmark result row; the column set is fixed across output formats.
struct BenchRow {
    int dim = 0;
    int L = 0;
    int L_theta = 0;
    std::string smoother;
    std::string cycle;
    std::string solver;
    int iterations = 0;
    double err_l2 = 0;
    double err_ratio = std::nan("");  // error of the previous depth over this one
    double flops = 0;
    double flops_per_unknown = 0;
    std::uint64_t transfer_bytes = 0;
    double mem_per_dof = 0;
    double wall_seconds = 0;
};

/// Scientific notation with 4 significant digits, '.' decimal separator.
inline std::string sci4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline const char* csv_header() {
    return "dim,L,L_theta,smoother,cycle,solver,iterations,err_l2,err_ratio,flops,"
           "flops_per_unknown,transfer_bytes,mem_per_dof,wall_seconds";
}

inline void write_csv(std::ostream& os, const std::vector<BenchRow>& rows,
                      const std::vector<std::string>& meta = {}) {
    for (const auto& m : meta) os << "# " << m << "\n";
    os << csv_header() << "\n";
    char buf[64];
    for (const auto& r : rows) {
        os << r.dim << ',' << r.L << ',' << r.L_theta << ',' << r.smoother << ',' << r.cycle
           << ',' << r.solver << ',' << r.iterations << ',' << sci4(r.err_l2) << ',';
        if (!std::isnan(r.err_ratio)) {
            std::snprintf(buf, sizeof buf, "%.3f", r.err_ratio);
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.0f", r.flops);
        os << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.2f", r.flops_per_unknown);
        os << ',' << buf << ',' << r.transfer_bytes;
        std::snprintf(buf, sizeof buf, "%.4f", r.mem_per_dof);
        os << ',' << buf;
        std::snprintf(buf, sizeof buf, "%.6f", r.wall_seconds);
        os << ',' << buf << "\n";
    }
}

inline void write_json(std::ostream& os, const std::vector<BenchRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json j;
        j["dim"] = r.dim;
        j["L"] = r.L;
        j["L_theta"] = r.L_theta;
        j["smoother"] = r.smoother;
        j["cycle"] = r.cycle;
        j["solver"] = r.solver;
        j["iterations"] = r.iterations;
        j["err_l2"] = r.err_l2;
        if (std::isnan(r.err_ratio)) j["err_ratio"] = nullptr;
        else j["err_ratio"] = r.err_ratio;
        j["flops"] = r.flops;
        j["flops_per_unknown"] = r.flops_per_unknown;
        j["transfer_bytes"] = r.transfer_bytes;
        j["mem_per_dof"] = r.mem_per_dof;
        j["wall_seconds"] = r.wall_seconds;
        arr.push_back(std::move(j));
    }
    os << arr.dump(2) << "\n";
}

} // namespace gmg
