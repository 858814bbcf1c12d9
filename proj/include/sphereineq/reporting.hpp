#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sphereineq::cli {

struct RunConfig {
    std::string command; // series | certify | fig1 | harness | constants
    std::vector<double> p_grid;
    std::vector<double> m_grid;
    std::vector<double> q_grid;
    std::vector<int> n_grid;
    double tol = 1e-8;
    double m_cap = 20.0;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string flavor = "scalar"; // scalar | vector | both
    std::string out_dir = ".";
    std::vector<std::string> formats{"csv"};

    bool wants(const std::string& fmt) const;
};

/// Grid syntax: "start:stop:step" (endpoints inclusive, 1e-12 snapping) or a
/// comma list.  Throws std::invalid_argument on malformed input.
std::vector<double> parse_grid(const std::string& text);

/// FNV-1a hash of the content-relevant configuration fields.
std::uint64_t config_hash(const RunConfig& cfg);

/// Shortest round-trip decimal representation ('.' separator, C locale).
std::string format_double(double x);

// Each runner writes its files under cfg.out_dir and returns a process exit
// code: 0 on success, 1 when a verdict failed or a cell errored.
int run_series(const RunConfig& cfg);
int run_certify(const RunConfig& cfg);
int run_fig1(const RunConfig& cfg);
int run_harness(const RunConfig& cfg);
int run_constants(const RunConfig& cfg);

} // namespace sphereineq::cli
