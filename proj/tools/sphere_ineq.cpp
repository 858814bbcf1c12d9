#include "sphereineq/reporting.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <clocale>
#include <cstdlib>
#include <iostream>

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("SPHERE_INEQ_OUT");
    return env != nullptr && *env != '\0' ? env : ".";
}

} // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");

    CLI::App app{"Certified spectral sums, proof-grid certificates and "
                 "inequality harnesses on the 2-sphere"};
    app.require_subcommand(1);

    std::string p_spec, m_spec, q_spec, n_spec, formats_spec;
    sphereineq::cli::RunConfig cfg;
    cfg.out_dir = default_out_dir();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--p", p_spec, "p grid (start:stop:step or comma list)");
        sub->add_option("--m", m_spec, "m grid");
        sub->add_option("--q", q_spec, "q grid");
        sub->add_option("--n", n_spec, "family sizes (comma list)");
        sub->add_option("--tol", cfg.tol, "enclosure tolerance");
        sub->add_option("--seed", cfg.seed, "base mixing seed");
        sub->add_option("--jobs", cfg.jobs, "worker threads for sweeps");
        sub->add_option("--formats", formats_spec, "subset of csv,json,svg");
        sub->add_option("--out", cfg.out_dir, "output directory")
            ->default_val(cfg.out_dir);
        sub->add_option("--m-cap", cfg.m_cap, "certificate m range cap");
        sub->add_option("--flavor", cfg.flavor, "scalar, vector or both");
    };

    CLI::App* series = app.add_subcommand(
        "series", "Sweep certified enclosures of the scalar and lattice sums");
    CLI::App* certify = app.add_subcommand(
        "certify", "Re-run the case analysis certifying I_p(m) < 1 on a grid");
    CLI::App* fig1 = app.add_subcommand(
        "fig1", "Emit the m1(p) - m0(p) crossing curve and its root");
    CLI::App* harness = app.add_subcommand(
        "harness", "Orthonormal-family and interpolation-ratio checks");
    CLI::App* constants =
        app.add_subcommand("constants", "Comparison table of embedding constants");
    for (CLI::App* sub : {series, certify, fig1, harness, constants})
        add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        auto parse_if = [](const std::string& spec) {
            return spec.empty() ? std::vector<double>{}
                                : sphereineq::cli::parse_grid(spec);
        };
        cfg.p_grid = parse_if(p_spec);
        cfg.m_grid = parse_if(m_spec);
        cfg.q_grid = parse_if(q_spec);
        for (double v : parse_if(n_spec))
            cfg.n_grid.push_back(static_cast<int>(v));

        if (formats_spec.empty()) {
            if (certify->parsed())
                formats_spec = "csv,json";
            else if (fig1->parsed())
                formats_spec = "csv,svg";
            else
                formats_spec = "csv";
        }
        cfg.formats.clear();
        std::stringstream fs(formats_spec);
        std::string tok;
        while (std::getline(fs, tok, ',')) {
            if (tok != "csv" && tok != "json" && tok != "svg")
                throw std::invalid_argument("unknown format '" + tok + "'");
            cfg.formats.push_back(tok);
        }
        if (cfg.formats.empty())
            throw std::invalid_argument("no output format selected");

        if (series->parsed()) {
            cfg.command = "series";
            if (cfg.p_grid.empty() || cfg.m_grid.empty())
                throw std::invalid_argument("series requires --p and --m grids");
            return sphereineq::cli::run_series(cfg);
        }
        if (certify->parsed()) {
            cfg.command = "certify";
            if (!cfg.m_grid.empty()) {
                double cap = 0.0;
                for (double m : cfg.m_grid) cap = std::max(cap, m);
                if (cap > 0.0) cfg.m_cap = cap;
            }
            return sphereineq::cli::run_certify(cfg);
        }
        if (fig1->parsed()) {
            cfg.command = "fig1";
            return sphereineq::cli::run_fig1(cfg);
        }
        if (harness->parsed()) {
            cfg.command = "harness";
            return sphereineq::cli::run_harness(cfg);
        }
        cfg.command = "constants";
        return sphereineq::cli::run_constants(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
