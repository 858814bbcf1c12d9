#include "sphereineq/inequality_lab.hpp"

#include "sphereineq/errors.hpp"
#include "sphereineq/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sphereineq::lab {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_orthogonal(std::uint64_t seed, int size) {
    // Householder QR of a uniform(-1,1) matrix with the R diagonal forced
    // positive; seed 0 short-circuits to the identity.
    std::vector<double> q(static_cast<std::size_t>(size) * size, 0.0);
    for (int i = 0; i < size; ++i) q[static_cast<std::size_t>(i) * size + i] = 1.0;
    if (seed == 0) return q;

    Rng rng(seed);
    std::vector<double> r(static_cast<std::size_t>(size) * size);
    for (double& x : r) x = rng.symmetric();

    auto rr = [&](int i, int j) -> double& { return r[static_cast<std::size_t>(i) * size + j]; };
    auto qq = [&](int i, int j) -> double& { return q[static_cast<std::size_t>(i) * size + j]; };

    std::vector<double> v(size);
    for (int k = 0; k < size; ++k) {
        double norm = 0.0;
        for (int i = k; i < size; ++i) norm += rr(i, k) * rr(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = rr(k, k) >= 0.0 ? -norm : norm;
        double vnorm2 = 0.0;
        for (int i = k; i < size; ++i) {
            v[i] = rr(i, k) - (i == k ? alpha : 0.0);
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 == 0.0) continue;
        for (int j = k; j < size; ++j) {
            double dot = 0.0;
            for (int i = k; i < size; ++i) dot += v[i] * rr(i, j);
            const double f = 2.0 * dot / vnorm2;
            for (int i = k; i < size; ++i) rr(i, j) -= f * v[i];
        }
        for (int jrow = 0; jrow < size; ++jrow) { // Q <- Q H_k
            double dot = 0.0;
            for (int i = k; i < size; ++i) dot += qq(jrow, i) * v[i];
            const double f = 2.0 * dot / vnorm2;
            for (int i = k; i < size; ++i) qq(jrow, i) -= f * v[i];
        }
    }
    for (int k = 0; k < size; ++k)
        if (rr(k, k) < 0.0)
            for (int i = 0; i < size; ++i) qq(i, k) = -qq(i, k);
    return q;
}

std::shared_ptr<const sphere::QuadratureRule> finer_rule_cache(int exact_degree) {
    // The harness requests the finer rule repeatedly with a handful of degrees.
    static thread_local std::vector<
        std::pair<int, std::shared_ptr<const sphere::QuadratureRule>>>
        cache;
    for (auto& entry : cache)
        if (entry.first == exact_degree) return entry.second;
    cache.emplace_back(exact_degree, std::make_shared<const sphere::QuadratureRule>(
                                         sphere::build_rule(exact_degree)));
    if (cache.size() > 16) cache.erase(cache.begin());
    return cache.back().second;
}

double density_lp_norm(const Family& fam, double p,
                       const sphere::QuadratureRule& rule) {
    const DensityField rho = density(fam, rule);
    return sphere::lp_norm(rho.values, p, rule);
}

} // namespace

std::string to_string(Flavor flavor) {
    return flavor == Flavor::Scalar ? "scalar" : "vector";
}

int Family::max_degree() const {
    int d = 0;
    for (const auto& mem : members) d = std::max(d, mem.max_degree());
    return d;
}

double Family::gram_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i; j < members.size(); ++j) {
            const double g = sphere::h1m_inner(members[i], members[j], m);
            worst = std::max(worst, std::fabs(g - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

double b_p(double p) {
    if (!(p >= 1.0)) throw std::domain_error("b_p requires p >= 1");
    if (p == 1.0) return 1.0;
    return std::exp((p - 1.0) / p * std::log((p - 1.0) / (4.0 * kPi)));
}

Family build_family(double m, int size, Flavor flavor, std::uint64_t mixing_seed,
                    int max_degree) {
    if (!(m > 0.0)) throw std::domain_error("build_family requires m > 0");
    if (size < 1) throw std::invalid_argument("build_family: size must be >= 1");
    if (size > sphere::basis_dimension(max_degree) - 1)
        throw std::invalid_argument(
            "build_family: size exceeds the zero-mean dimension of max_degree");

    const std::vector<double> q = random_orthogonal(mixing_seed, size);
    Family fam;
    fam.m = m;
    fam.flavor = flavor;
    fam.members.reserve(size);
    for (int j = 0; j < size; ++j) {
        sphere::SpectralCoeffs c(max_degree);
        for (int i = 0; i < size; ++i) {
            const int flat = i + 1; // skip the constant slot
            const int n = sphere::index_from_flat(flat).n;
            c.flat()[flat] = q[static_cast<std::size_t>(j) * size + i] /
                             std::sqrt(m * m + sphere::eigenvalue(n));
        }
        fam.members.push_back(std::move(c));
    }
    return fam;
}

DensityField density(const Family& fam, const sphere::QuadratureRule& rule) {
    DensityField out;
    out.n_members = static_cast<int>(fam.members.size());
    out.values.assign(rule.nodes.size(), 0.0);
    const int d = fam.max_degree();
    out.degree_sufficient = rule.exact_degree >= 2 * d;

    if (fam.flavor == Flavor::Scalar) {
        const auto table = sphere::basis_matrix_cached(d, rule);
        const int dim = sphere::basis_dimension(d);
        for (const auto& mem : fam.members) {
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double* bt = table->data() + i * dim;
                double v = 0.0;
                for (int j = 0; j < dim; ++j) v += bt[j] * mem.flat()[j];
                out.values[i] += v * v;
            }
        }
    } else {
        const auto vb_ptr = sphere::vector_basis_matrix_cached(d, rule);
        const sphere::VectorBasis& vb = *vb_ptr;
        for (const auto& mem : fam.members) {
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double* bt = vb.theta.data() + i * vb.dim;
                const double* bp = vb.phi.data() + i * vb.dim;
                double vt = 0.0, vp = 0.0;
                for (int j = 0; j < vb.dim; ++j) {
                    vt += bt[j] * mem.flat()[j];
                    vp += bp[j] * mem.flat()[j];
                }
                out.values[i] += vt * vt + vp * vp;
            }
        }
    }
    return out;
}

RatioResult theorem1_ratio(const Family& fam, double p,
                           const sphere::QuadratureRule& rule) {
    if (!(p >= 1.0)) throw std::domain_error("theorem1_ratio requires p >= 1");
    if (fam.members.empty())
        throw std::invalid_argument("theorem1_ratio: empty family");
    const double n = static_cast<double>(fam.members.size());
    const double bound = b_p(p) * std::pow(fam.m, -2.0 / p) * std::pow(n, 1.0 / p);

    const double coarse = density_lp_norm(fam, p, rule) / bound;
    const auto fine = finer_rule_cache(std::min(2 * rule.exact_degree, 600));
    const double refined = density_lp_norm(fam, p, *fine) / bound;
    return {coarse, std::fabs(refined - coarse)};
}

RatioResult gn_ratio(const sphere::SpectralCoeffs& coeffs, double q,
                     const sphere::QuadratureRule& rule) {
    if (!(q >= 2.0)) throw std::domain_error("gn_ratio requires q >= 2");
    if (!coeffs.zero_mean())
        throw std::invalid_argument("gn_ratio requires a zero-mean field");
    const double l2 = coeffs.norm_sq();
    const double grad2 = coeffs.grad_norm_sq();
    if (l2 == 0.0) throw std::invalid_argument("gn_ratio: zero field");

    const double denom = std::pow(1.0 / (4.0 * kPi), (q - 2.0) / (2.0 * q)) *
                         std::sqrt(q / 2.0) * std::pow(l2, 1.0 / q) *
                         std::pow(grad2, 0.5 - 1.0 / q);

    auto lq_over = [&](const sphere::QuadratureRule& r) {
        return sphere::lp_norm(sphere::synthesize(coeffs, r).values, q, r) / denom;
    };
    const double coarse = lq_over(rule);
    const double refined =
        lq_over(*finer_rule_cache(std::min(2 * rule.exact_degree, 600)));
    return {coarse, std::fabs(refined - coarse)};
}

GalerkinOperator build_k_operator(double m, const sphere::SpectralCoeffs& V,
                                  int max_degree,
                                  const sphere::QuadratureRule& rule) {
    if (!(m > 0.0)) throw std::domain_error("build_k_operator requires m > 0");
    const int dim = sphere::basis_dimension(max_degree) - 1;
    if (dim > 400)
        throw std::invalid_argument("build_k_operator: Galerkin dimension above 400");

    const std::vector<double> v_values = sphere::synthesize(V, rule).values;
    for (double v : v_values)
        if (v < 0.0)
            throw std::domain_error("build_k_operator: V must be nonnegative at the nodes");

    // K = S^T S with S[i][a] = sqrt(w_i V_i) y_a(s_i) / sqrt(m^2 + Lambda_a),
    // so the Galerkin matrix is positive semidefinite by construction.
    const auto table_ptr = sphere::basis_matrix_cached(max_degree, rule);
    const std::vector<double>& table = *table_ptr;
    const int full = sphere::basis_dimension(max_degree);
    const std::size_t nodes = rule.nodes.size();
    std::vector<double> s(nodes * static_cast<std::size_t>(dim));
    std::vector<double> scale(dim);
    for (int a = 0; a < dim; ++a) {
        const int n = sphere::index_from_flat(a + 1).n;
        scale[a] = 1.0 / std::sqrt(m * m + sphere::eigenvalue(n));
    }
    for (std::size_t i = 0; i < nodes; ++i) {
        const double wv = std::sqrt(rule.weights[i] * v_values[i]);
        const double* bt = table.data() + i * full;
        double* srow = s.data() + i * dim;
        for (int a = 0; a < dim; ++a) srow[a] = wv * bt[a + 1] * scale[a];
    }

    GalerkinOperator op;
    op.dim = dim;
    op.entries.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double* srow = s.data() + i * dim;
        for (int a = 0; a < dim; ++a) {
            const double sa = srow[a];
            if (sa == 0.0) continue;
            double* krow = op.entries.data() + static_cast<std::size_t>(a) * dim;
            for (int b = a; b < dim; ++b) krow[b] += sa * srow[b];
        }
    }
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < a; ++b)
            op.entries[static_cast<std::size_t>(a) * dim + b] =
                op.entries[static_cast<std::size_t>(b) * dim + a];

    op.spectrum = linalg::jacobi_eigen(op.entries, dim).eigenvalues;
    return op;
}

TracePair alt_trace_check(double m, double p, const sphere::SpectralCoeffs& V,
                          int max_degree, const sphere::QuadratureRule& rule) {
    double r = 0.0;
    if (std::isinf(p))
        r = 1.0;
    else if (p > 1.0)
        r = p / (p - 1.0);
    else
        throw std::domain_error("alt_trace_check requires p > 1");

    const GalerkinOperator op = build_k_operator(m, V, max_degree, rule);

    TracePair out;
    for (double lambda : op.spectrum)
        out.lhs += std::pow(std::max(lambda, 0.0), r);

    double zeta = 0.0;
    for (int n = 1; n <= max_degree; ++n)
        zeta += (2.0 * n + 1.0) * std::pow(m * m + sphere::eigenvalue(n), -r);

    const std::vector<double> v_values = sphere::synthesize(V, rule).values;
    double vr_integral = 0.0;
    for (std::size_t i = 0; i < v_values.size(); ++i)
        vr_integral += rule.weights[i] * std::pow(std::max(v_values[i], 0.0), r);

    out.rhs = zeta / (4.0 * kPi) * vr_integral;
    return out;
}

TracePair variational_step_check(const Family& fam,
                                 const sphere::SpectralCoeffs& V,
                                 const sphere::QuadratureRule& rule,
                                 int max_degree) {
    if (fam.flavor != Flavor::Scalar)
        throw std::invalid_argument("variational_step_check: scalar families only");
    if (fam.max_degree() > max_degree)
        throw std::invalid_argument(
            "variational_step_check: family exceeds the Galerkin degree");

    const DensityField rho = density(fam, rule);
    const std::vector<double> v_values = sphere::synthesize(V, rule).values;
    TracePair out;
    for (std::size_t i = 0; i < rho.values.size(); ++i)
        out.lhs += rule.weights[i] * rho.values[i] * v_values[i];

    const GalerkinOperator op = build_k_operator(fam.m, V, max_degree, rule);
    const std::size_t n = std::min(fam.members.size(), op.spectrum.size());
    for (std::size_t i = 0; i < n; ++i) out.rhs += op.spectrum[i];
    return out;
}

ConstantsTable compare_constants(double q) {
    if (!(q >= 2.0)) throw std::domain_error("compare_constants requires q >= 2");
    ConstantsTable t;
    t.q = q;
    const double common = std::pow(1.0 / (4.0 * kPi), (q - 2.0) / (2.0 * q));
    t.gn_sphere = common * std::sqrt(q / 2.0);
    t.beckner_route = common * std::sqrt((q - 1.0) / 2.0);
    t.zero_mean_gn_route = t.gn_sphere * std::pow(2.0, -1.0 / q);
    t.plane = common * std::pow(q, (q - 2.0) / q) /
              std::pow(q - 1.0, (q - 1.0) / q) * std::sqrt(q / 2.0);
    t.conjectured_asymptote = std::sqrt(q / (8.0 * kPi));
    t.ladyzhenskaya_q4 = 1.0 / kPi;
    t.comparison_holds = std::pow(2.0, -2.0 / q) <= 1.0 - 1.0 / q + 1e-15;
    return t;
}

sphere::SpectralCoeffs random_zero_mean_field(Rng& rng, int max_degree) {
    sphere::SpectralCoeffs c(max_degree);
    for (int i = 1; i < c.dim(); ++i) c.flat()[i] = rng.symmetric();
    return c;
}

sphere::SpectralCoeffs random_nonneg_potential(Rng& rng, int half_degree) {
    sphere::SpectralCoeffs base(half_degree);
    for (int i = 0; i < base.dim(); ++i) base.flat()[i] = rng.symmetric();
    const sphere::QuadratureRule rule = sphere::build_rule(4 * half_degree);
    const std::vector<double> values = sphere::synthesize(base, rule).values;
    std::vector<double> squared(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        squared[i] = values[i] * values[i] + 1e-6;
    return sphere::project(squared, rule, 2 * half_degree);
}

int harness_rule_degree(int max_degree, double q) {
    const int half = static_cast<int>(std::ceil(q / 2.0));
    return std::min(600, 4 * max_degree * half);
}

std::string serialize(const Family& fam) {
    std::ostringstream os;
    os.precision(17);
    os << "m=" << fam.m << " flavor=" << to_string(fam.flavor) << " n="
       << fam.members.size() << '\n';
    for (std::size_t j = 0; j < fam.members.size(); ++j) {
        os << "member " << (j + 1) << '\n';
        os << sphere::serialize(fam.members[j]);
    }
    return os.str();
}

Family parse_family(const std::string& text) {
    std::istringstream is(text);
    std::string header;
    if (!std::getline(is, header))
        throw std::invalid_argument("parse_family: missing header");
    Family fam;
    int count = 0;
    {
        std::istringstream hs(header);
        std::string tok;
        bool have_m = false, have_flavor = false, have_n = false;
        while (hs >> tok) {
            if (tok.rfind("m=", 0) == 0) {
                fam.m = std::stod(tok.substr(2));
                have_m = true;
            } else if (tok.rfind("flavor=", 0) == 0) {
                const std::string f = tok.substr(7);
                if (f == "scalar")
                    fam.flavor = Flavor::Scalar;
                else if (f == "vector")
                    fam.flavor = Flavor::VectorDivFree;
                else
                    throw std::invalid_argument("parse_family: unknown flavor " + f);
                have_flavor = true;
            } else if (tok.rfind("n=", 0) == 0) {
                count = std::stoi(tok.substr(2));
                have_n = true;
            }
        }
        if (!have_m || !have_flavor || !have_n)
            throw std::invalid_argument("parse_family: incomplete header");
    }

    std::vector<std::string> blocks;
    std::string line, current;
    bool in_member = false;
    while (std::getline(is, line)) {
        if (line.rfind("member ", 0) == 0) {
            if (in_member) blocks.push_back(current);
            current.clear();
            in_member = true;
        } else if (in_member && !line.empty()) {
            current += line;
            current += '\n';
        }
    }
    if (in_member) blocks.push_back(current);
    if (static_cast<int>(blocks.size()) != count)
        throw std::invalid_argument("parse_family: member count mismatch");

    int max_degree = 0;
    std::vector<sphere::SpectralCoeffs> parsed;
    for (const std::string& b : blocks) {
        parsed.push_back(sphere::parse_coeffs(b));
        max_degree = std::max(max_degree, parsed.back().max_degree());
    }
    for (auto& c : parsed) {
        if (c.max_degree() == max_degree) {
            fam.members.push_back(std::move(c));
        } else {
            sphere::SpectralCoeffs widened(max_degree);
            for (int i = 0; i < c.dim(); ++i) widened.flat()[i] = c.flat()[i];
            fam.members.push_back(std::move(widened));
        }
    }
    return fam;
}

} // namespace sphereineq::lab
