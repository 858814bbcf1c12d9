#include "sphereineq/reporting.hpp"

#include "sphereineq/em_certifier.hpp"
#include "sphereineq/errors.hpp"
#include "sphereineq/inequality_lab.hpp"
#include "sphereineq/spectral_series.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <limits>
#include <sstream>

namespace sphereineq::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string hash_hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::string file_header(const RunConfig& cfg) {
    return "# sphereineq " + std::string(kVersion) + "\n# config " +
           hash_hex(config_hash(cfg)) + "\n";
}

void write_file(const RunConfig& cfg, const std::string& name,
                const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const fs::path path = fs::path(cfg.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + path.string());
    out << content;
}

nlohmann::ordered_json json_preamble(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["config"] = hash_hex(config_hash(cfg));
    return j;
}

void write_json(const RunConfig& cfg, const std::string& name,
                const nlohmann::ordered_json& j) {
    write_file(cfg, name, j.dump(2) + "\n");
}

/// Deterministic fan-out over [0, count): results land by index, so the
/// output is independent of the job count.
void parallel_cells(int count, int jobs, const std::function<void(int)>& work) {
    jobs = std::max(1, jobs);
    if (jobs == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    std::vector<std::future<void>> futures;
    futures.reserve(jobs);
    for (int t = 0; t < jobs; ++t)
        futures.push_back(std::async(std::launch::async, [&, t] {
            for (int i = t; i < count; i += jobs) work(i);
        }));
    for (auto& f : futures) f.get();
}

struct SvgSeries {
    std::vector<double> x, y;
};

/// Minimal hand-emitted line chart: axes, one polyline, optional root marker.
std::string svg_line_chart(const RunConfig& cfg, const SvgSeries& s,
                           double root_x, bool mark_root,
                           const std::string& title) {
    const double width = 640, height = 480, pad = 50;
    double xmin = s.x.front(), xmax = s.x.back();
    double ymin = *std::min_element(s.y.begin(), s.y.end());
    double ymax = *std::max_element(s.y.begin(), s.y.end());
    if (ymax == ymin) ymax = ymin + 1.0;
    const double yspan = ymax - ymin;
    ymin -= 0.05 * yspan;
    ymax += 0.05 * yspan;
    auto px = [&](double x) {
        return pad + (x - xmin) / (xmax - xmin) * (width - 2 * pad);
    };
    auto py = [&](double y) {
        return height - pad - (y - ymin) / (ymax - ymin) * (height - 2 * pad);
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
       << height << "\">\n";
    os << "<!-- sphereineq " << kVersion << " config " << hash_hex(config_hash(cfg))
       << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    // axes
    os << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\""
       << width - pad << "\" y2=\"" << height - pad
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad
       << "\" y2=\"" << height - pad << "\" stroke=\"black\"/>\n";
    if (ymin < 0.0 && ymax > 0.0)
        os << "<line x1=\"" << pad << "\" y1=\"" << py(0.0) << "\" x2=\""
           << width - pad << "\" y2=\"" << py(0.0)
           << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"" << height - pad + 20
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(xmin)
       << "</text>\n";
    os << "<text x=\"" << width - pad << "\" y=\"" << height - pad + 20
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << format_double(xmax) << "</text>\n";
    os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
        os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    os << "\"/>\n";
    if (mark_root) {
        os << "<circle cx=\"" << px(root_x) << "\" cy=\"" << py(0.0)
           << "\" r=\"4\" fill=\"#c0392b\"/>\n";
        os << "<text x=\"" << px(root_x) + 8 << "\" y=\"" << py(0.0) - 8
           << "\" font-family=\"sans-serif\" font-size=\"11\">p* = "
           << format_double(root_x) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

} // namespace

bool RunConfig::wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty grid specification");

    auto to_double = [](const std::string& tok) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed grid number '" + tok + "'");
        }
        if (pos != tok.size())
            throw std::invalid_argument("malformed grid number '" + tok + "'");
        return v;
    };

    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        if (parts.size() != 3)
            throw std::invalid_argument("range grid must be start:stop:step");
        const double start = to_double(parts[0]);
        const double stop = to_double(parts[1]);
        const double step = to_double(parts[2]);
        if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
        if (stop < start) throw std::invalid_argument("grid stop below start");
        const double snap =
            1e-12 * std::max({1.0, std::fabs(start), std::fabs(stop)});
        for (int k = 0;; ++k) {
            double v = start + k * step;
            if (v > stop + snap) break;
            if (std::fabs(v - stop) <= snap) v = stop;
            out.push_back(v);
            if (out.size() > 10'000'000)
                throw std::invalid_argument("grid too large");
        }
    } else {
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty())
                throw std::invalid_argument("empty entry in grid list");
            out.push_back(to_double(tok));
        }
    }
    if (out.empty()) throw std::invalid_argument("grid resolved to no points");
    return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::string canon = cfg.command;
    auto add = [&canon](const std::string& s) {
        canon += '|';
        canon += s;
    };
    for (double v : cfg.p_grid) add(format_double(v));
    add(";");
    for (double v : cfg.m_grid) add(format_double(v));
    add(";");
    for (double v : cfg.q_grid) add(format_double(v));
    add(";");
    for (int v : cfg.n_grid) add(std::to_string(v));
    add(format_double(cfg.tol));
    add(format_double(cfg.m_cap));
    add(std::to_string(cfg.seed));
    add(cfg.flavor);
    for (const auto& f : cfg.formats) add(f);

    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

int run_series(const RunConfig& cfg) {
    struct Row {
        double p, m;
        series::CertifiedValue i, j;
        double em_bound;
        bool verdict;
        std::string error;
    };
    const int np = static_cast<int>(cfg.p_grid.size());
    const int nm = static_cast<int>(cfg.m_grid.size());
    std::vector<Row> rows(static_cast<std::size_t>(np) * nm);

    parallel_cells(np * nm, cfg.jobs, [&](int idx) {
        const double p = cfg.p_grid[idx / nm];
        const double m = cfg.m_grid[idx % nm];
        Row& row = rows[idx];
        row.p = p;
        row.m = m;
        try {
            row.i = series::eval_I({p, m}, cfg.tol);
            row.j = series::eval_J({p, m}, cfg.tol);
            row.em_bound = m > 0.0 ? em::em_upper_bound({p, m})
                                   : std::numeric_limits<double>::infinity();
            row.verdict = row.i.hi < 1.0 && row.j.hi < 1.0;
        } catch (const std::exception& e) {
            row.error = e.what();
            row.verdict = false;
            row.em_bound = std::numeric_limits<double>::quiet_NaN();
        }
    });

    int errored = 0;
    std::string csv = file_header(cfg) + "p,m,I_lo,I_hi,J_lo,J_hi,em_bound,verdict\n";
    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    for (const Row& row : rows) {
        if (!row.error.empty()) {
            ++errored;
            std::cerr << "series cell (p=" << format_double(row.p)
                      << ", m=" << format_double(row.m) << "): " << row.error
                      << "\n";
            csv += format_double(row.p) + "," + format_double(row.m) +
                   ",nan,nan,nan,nan,nan,error\n";
            nlohmann::ordered_json jr;
            jr["p"] = row.p;
            jr["m"] = row.m;
            jr["error"] = row.error;
            jrows.push_back(jr);
            continue;
        }
        csv += format_double(row.p) + "," + format_double(row.m) + "," +
               format_double(row.i.lo) + "," + format_double(row.i.hi) + "," +
               format_double(row.j.lo) + "," + format_double(row.j.hi) + "," +
               format_double(row.em_bound) + "," + bool_str(row.verdict) + "\n";
        nlohmann::ordered_json jr;
        jr["p"] = row.p;
        jr["m"] = row.m;
        jr["I"] = {row.i.lo, row.i.hi};
        jr["J"] = {row.j.lo, row.j.hi};
        jr["em_bound"] = row.em_bound;
        jr["verdict"] = row.verdict;
        jrows.push_back(jr);
    }

    if (cfg.wants("csv")) write_file(cfg, "series.csv", csv);
    if (cfg.wants("json")) {
        nlohmann::ordered_json j = json_preamble(cfg);
        j["rows"] = jrows;
        write_json(cfg, "series.json", j);
    }
    return errored > 0 ? 1 : 0;
}

int run_certify(const RunConfig& cfg) {
    std::vector<double> p_grid = cfg.p_grid;
    if (p_grid.empty())
        for (int i = 1; i <= 40; ++i) p_grid.push_back(1.0 + 9.0 * i / 40.0);

    const em::CertificateReport report = em::certify(p_grid, cfg.m_cap, cfg.tol);

    std::string csv = file_header(cfg);
    csv += "# scope verified on grid (finite sample, not a continuum proof)\n";
    csv += "# p_star " + format_double(report.p_star) + "\n";
    csv += "# m_star " + format_double(report.m_star) + "\n";
    csv += "# summary " + bool_str(report.summary) + "\n";
    csv += "p,m,branch,bound_value,verdict\n";
    for (const em::CertCell& cell : report.cells)
        csv += format_double(cell.p) + "," + format_double(cell.m) + "," +
               em::to_string(cell.branch) + "," + format_double(cell.bound_value) +
               "," + bool_str(cell.verdict) + "\n";

    if (cfg.wants("csv")) write_file(cfg, "certificate.csv", csv);
    if (cfg.wants("json")) {
        nlohmann::ordered_json j = json_preamble(cfg);
        j["p_star"] = report.p_star;
        j["m_star"] = report.m_star;
        j["summary"] = report.summary;
        nlohmann::ordered_json cells = nlohmann::ordered_json::array();
        for (const em::CertCell& cell : report.cells) {
            nlohmann::ordered_json jc;
            jc["p"] = cell.p;
            jc["m"] = cell.m;
            jc["branch"] = em::to_string(cell.branch);
            jc["bound_value"] = cell.bound_value;
            jc["verdict"] = cell.verdict;
            cells.push_back(jc);
        }
        j["cells"] = cells;
        write_json(cfg, "certificate.json", j);
    }
    return report.summary ? 0 : 1;
}

int run_fig1(const RunConfig& cfg) {
    const int points = 501;
    SvgSeries s;
    s.x.resize(points);
    s.y.resize(points);
    for (int i = 0; i < points; ++i) {
        const double p = 2.0 + 0.5 * i / (points - 1);
        s.x[i] = p;
        s.y[i] = em::m1(p) - em::m0(p);
    }
    const double p_star = em::find_p_star(1e-8);

    std::string csv = file_header(cfg);
    csv += "# p_star " + format_double(p_star) + "\n";
    csv += "p,m1_minus_m0\n";
    for (int i = 0; i < points; ++i)
        csv += format_double(s.x[i]) + "," + format_double(s.y[i]) + "\n";

    if (cfg.wants("csv")) write_file(cfg, "fig1.csv", csv);
    if (cfg.wants("svg"))
        write_file(cfg, "fig1.svg",
                   svg_line_chart(cfg, s, p_star, true, "m1(p) - m0(p) on [2, 2.5]"));
    if (cfg.wants("json")) {
        nlohmann::ordered_json j = json_preamble(cfg);
        j["p_star"] = p_star;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (int i = 0; i < points; ++i)
            rows.push_back({s.x[i], s.y[i]});
        j["rows"] = rows;
        write_json(cfg, "fig1.json", j);
    }
    return 0;
}

int run_harness(const RunConfig& cfg) {
    struct Row {
        std::string type;
        std::string flavor;
        int n = 0;
        double m = 0.0;
        double pq = 0.0;
        std::uint64_t seed = 0;
        double value = 0.0;
        double quad_error = 0.0;
        double margin = 0.0;
        bool ok = true;
    };
    std::vector<Row> rows;

    std::vector<lab::Flavor> flavors;
    if (cfg.flavor == "scalar" || cfg.flavor == "both")
        flavors.push_back(lab::Flavor::Scalar);
    if (cfg.flavor == "vector" || cfg.flavor == "both")
        flavors.push_back(lab::Flavor::VectorDivFree);
    if (flavors.empty())
        throw std::invalid_argument("harness: flavor must be scalar, vector or both");

    const std::vector<double> ms = cfg.m_grid.empty()
                                       ? std::vector<double>{1.0}
                                       : cfg.m_grid;
    const std::vector<int> ns = cfg.n_grid.empty() ? std::vector<int>{1, 3, 8}
                                                   : cfg.n_grid;
    const std::vector<double> ps =
        cfg.p_grid.empty() ? std::vector<double>{1.0, 2.0, 4.0} : cfg.p_grid;
    const std::vector<double> qs =
        cfg.q_grid.empty() ? std::vector<double>{2.0, 4.0, 10.0} : cfg.q_grid;

    double max_p = 1.0;
    for (double p : ps) max_p = std::max(max_p, p);

    // Theorem-1 ratios per (flavor, n, m, p).
    std::uint64_t seed_offset = 0;
    for (lab::Flavor flavor : flavors)
        for (int n : ns)
            for (double m : ms) {
                int degree = 1;
                while (sphere::basis_dimension(degree) - 1 < n) ++degree;
                const std::uint64_t seed = cfg.seed + seed_offset++;
                const lab::Family fam =
                    lab::build_family(m, n, flavor, seed, degree);
                const sphere::QuadratureRule rule =
                    sphere::build_rule(lab::harness_rule_degree(degree, max_p));
                for (double p : ps) {
                    const lab::RatioResult r = lab::theorem1_ratio(fam, p, rule);
                    Row row{"theorem1", lab::to_string(flavor), n, m, p, seed,
                            r.value, r.quad_error, 1.0 + r.quad_error - r.value,
                            r.value <= 1.0 + r.quad_error + 1e-12};
                    rows.push_back(row);
                }
            }

    // Gagliardo-Nirenberg ratios per (q, seed).
    {
        const int degree = 8;
        double max_q = 2.0;
        for (double q : qs) max_q = std::max(max_q, q);
        const sphere::QuadratureRule rule =
            sphere::build_rule(lab::harness_rule_degree(degree, max_q));
        lab::Rng rng(cfg.seed);
        const sphere::SpectralCoeffs field = lab::random_zero_mean_field(rng, degree);
        for (double q : qs) {
            const lab::RatioResult r = lab::gn_ratio(field, q, rule);
            rows.push_back({"gn", "scalar", 1, 0.0, q, cfg.seed, r.value,
                            r.quad_error, 1.0 + r.quad_error - r.value,
                            r.value <= 1.0 + r.quad_error + 1e-12});
        }
    }

    // Trace-chain margins per (m, p) with p > 1.
    {
        const int degree = 6;
        lab::Rng rng(cfg.seed + 1);
        const sphere::SpectralCoeffs v = lab::random_nonneg_potential(rng, 2);
        const sphere::QuadratureRule rule =
            sphere::build_rule(std::min(600, 2 * (4 + 2 * degree)));
        for (double m : ms)
            for (double p : ps) {
                if (!(p > 1.0)) continue;
                const lab::TracePair t =
                    lab::alt_trace_check(m, p, v, degree, rule);
                rows.push_back({"trace", "scalar", 0, m, p, cfg.seed + 1, t.lhs,
                                0.0, t.rhs - t.lhs,
                                t.lhs <= t.rhs * (1.0 + 1e-8)});
            }
    }

    bool all_ok = true;
    std::string csv =
        file_header(cfg) + "type,flavor,n,m,p_or_q,seed,value,quad_error,margin,ok\n";
    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    for (const Row& row : rows) {
        all_ok = all_ok && row.ok;
        csv += row.type + "," + row.flavor + "," + std::to_string(row.n) + "," +
               format_double(row.m) + "," + format_double(row.pq) + "," +
               std::to_string(row.seed) + "," + format_double(row.value) + "," +
               format_double(row.quad_error) + "," + format_double(row.margin) +
               "," + bool_str(row.ok) + "\n";
        nlohmann::ordered_json jr;
        jr["type"] = row.type;
        jr["flavor"] = row.flavor;
        jr["n"] = row.n;
        jr["m"] = row.m;
        jr["p_or_q"] = row.pq;
        jr["seed"] = row.seed;
        jr["value"] = row.value;
        jr["quad_error"] = row.quad_error;
        jr["margin"] = row.margin;
        jr["ok"] = row.ok;
        jrows.push_back(jr);
    }

    if (cfg.wants("csv")) write_file(cfg, "harness.csv", csv);
    if (cfg.wants("json")) {
        nlohmann::ordered_json j = json_preamble(cfg);
        j["rows"] = jrows;
        write_json(cfg, "harness.json", j);
    }
    return all_ok ? 0 : 1;
}

int run_constants(const RunConfig& cfg) {
    const std::vector<double> qs = cfg.q_grid.empty()
                                       ? std::vector<double>{2, 4, 6, 8, 10}
                                       : cfg.q_grid;
    std::string csv = file_header(cfg) +
                      "q,gn_sphere,beckner_route,zero_mean_gn_route,plane,"
                      "conjectured_asymptote,ladyzhenskaya_q4,comparison_holds\n";
    nlohmann::ordered_json jrows = nlohmann::ordered_json::array();
    for (double q : qs) {
        const lab::ConstantsTable t = lab::compare_constants(q);
        csv += format_double(t.q) + "," + format_double(t.gn_sphere) + "," +
               format_double(t.beckner_route) + "," +
               format_double(t.zero_mean_gn_route) + "," + format_double(t.plane) +
               "," + format_double(t.conjectured_asymptote) + "," +
               format_double(t.ladyzhenskaya_q4) + "," +
               bool_str(t.comparison_holds) + "\n";
        nlohmann::ordered_json jr;
        jr["q"] = t.q;
        jr["gn_sphere"] = t.gn_sphere;
        jr["beckner_route"] = t.beckner_route;
        jr["zero_mean_gn_route"] = t.zero_mean_gn_route;
        jr["plane"] = t.plane;
        jr["conjectured_asymptote"] = t.conjectured_asymptote;
        jr["ladyzhenskaya_q4"] = t.ladyzhenskaya_q4;
        jr["comparison_holds"] = t.comparison_holds;
        jrows.push_back(jr);
    }
    if (cfg.wants("csv")) write_file(cfg, "constants.csv", csv);
    if (cfg.wants("json")) {
        nlohmann::ordered_json j = json_preamble(cfg);
        j["rows"] = jrows;
        write_json(cfg, "constants.json", j);
    }
    return 0;
}

} // namespace sphereineq::cli
