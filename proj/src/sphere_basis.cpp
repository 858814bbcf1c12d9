#include "sphereineq/sphere_basis.hpp"

#include "sphereineq/errors.hpp"
#include "sphereineq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sphereineq::sphere {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleEps = 1e-12;
constexpr int kRuleDegreeCap = 600;

int triangular(int n, int m) { return n * (n + 1) / 2 + m; }

void check_index(HarmonicIndex idx) {
    if (idx.n < 0 || idx.n > kDegreeCap)
        throw std::domain_error("harmonic degree out of range [0, 256]");
    if (idx.k < 1 || idx.k > 2 * idx.n + 1)
        throw std::domain_error("harmonic order slot out of range 1..2n+1");
}

// Normalized associated Legendre recurrences.  Pbar_n^m is scaled so that
// int_{-1}^{1} Pbar^2 dx = 1/(2 pi), which together with the sqrt(2)-scaled
// longitude factors makes the Y_n^k orthonormal w.r.t. the surface measure.
//
//   Pbar_0^0 = sqrt(1/(4 pi))
//   Pbar_m^m = sqrt((2m+1)/(2m)) sqrt(1-x^2) Pbar_{m-1}^{m-1}
//   Pbar_{m+1}^m = sqrt(2m+3) x Pbar_m^m
//   Pbar_n^m = a(n,m) (x Pbar_{n-1}^m - b(n,m) Pbar_{n-2}^m)
//     a(n,m) = sqrt((4n^2-1)/(n^2-m^2))
//     b(n,m) = sqrt(((n-1)^2-m^2)/(4(n-1)^2-1))
//
// All Pbar_n^m for n <= max_degree at a single x, triangular layout (n, m).
std::vector<double> legendre_row(int max_degree, double x) {
    const int nmax = max_degree;
    std::vector<double> p(triangular(nmax, nmax) + 1, 0.0);
    const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
    p[triangular(0, 0)] = std::sqrt(1.0 / (4.0 * kPi));
    for (int m = 1; m <= nmax; ++m)
        p[triangular(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx *
                              p[triangular(m - 1, m - 1)];
    for (int m = 0; m < nmax; ++m)
        p[triangular(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * p[triangular(m, m)];
    for (int m = 0; m <= nmax; ++m) {
        for (int n = m + 2; n <= nmax; ++n) {
            const double a = std::sqrt((4.0 * n * n - 1.0) /
                                       (static_cast<double>(n) * n - static_cast<double>(m) * m));
            const double b = std::sqrt(
                ((static_cast<double>(n - 1) * (n - 1)) - static_cast<double>(m) * m) /
                (4.0 * static_cast<double>(n - 1) * (n - 1) - 1.0));
            p[triangular(n, m)] =
                a * (x * p[triangular(n - 1, m)] - b * p[triangular(n - 2, m)]);
        }
    }
    return p;
}

// d/dtheta of Pbar_n^m(cos theta) = (n x Pbar_n^m - e(n,m) Pbar_{n-1}^m)/sin theta
double e_coeff(int n, int m) {
    return std::sqrt((static_cast<double>(n) * n - static_cast<double>(m) * m) *
                     (2.0 * n + 1.0) / (2.0 * n - 1.0));
}

struct TrigTables {
    std::vector<double> cos_m, sin_m; // cos(m phi), sin(m phi) for m = 0..max
};

TrigTables trig_tables(int max_order, double phi) {
    TrigTables t;
    t.cos_m.resize(max_order + 1);
    t.sin_m.resize(max_order + 1);
    const double c = std::cos(phi), s = std::sin(phi);
    t.cos_m[0] = 1.0;
    t.sin_m[0] = 0.0;
    for (int m = 1; m <= max_order; ++m) {
        t.cos_m[m] = t.cos_m[m - 1] * c - t.sin_m[m - 1] * s;
        t.sin_m[m] = t.sin_m[m - 1] * c + t.cos_m[m - 1] * s;
    }
    return t;
}

// Longitude factor of Y for azimuthal order m' and its phi-derivative / m.
inline double azimuth(int mp, const TrigTables& t) {
    if (mp > 0) return std::numbers::sqrt2 * t.cos_m[mp];
    if (mp < 0) return std::numbers::sqrt2 * t.sin_m[-mp];
    return 1.0;
}

inline double azimuth_dphi(int mp, const TrigTables& t) {
    if (mp > 0) return -mp * std::numbers::sqrt2 * t.sin_m[mp];
    if (mp < 0) return -mp * std::numbers::sqrt2 * t.cos_m[-mp];
    return 0.0;
}

} // namespace

HarmonicIndex index_from_flat(int flat) {
    const int n = static_cast<int>(std::floor(std::sqrt(static_cast<double>(flat))));
    return {n, flat - n * n + 1};
}

SpectralCoeffs::SpectralCoeffs(int max_degree) : max_degree_(max_degree) {
    if (max_degree < 0 || max_degree > kDegreeCap)
        throw std::domain_error("SpectralCoeffs: max_degree out of range");
    c_.assign(basis_dimension(max_degree), 0.0);
}

double SpectralCoeffs::get(HarmonicIndex idx) const {
    check_index(idx);
    if (idx.n > max_degree_) return 0.0;
    return c_[flat_index(idx)];
}

void SpectralCoeffs::set(HarmonicIndex idx, double value) {
    check_index(idx);
    if (idx.n > max_degree_)
        throw std::domain_error("SpectralCoeffs::set: degree above max_degree");
    c_[flat_index(idx)] = value;
}

double SpectralCoeffs::norm_sq() const {
    double s = 0.0;
    for (double v : c_) s += v * v;
    return s;
}

double SpectralCoeffs::grad_norm_sq() const {
    double s = 0.0;
    for (int n = 0; n <= max_degree_; ++n) {
        const double lam = eigenvalue(n);
        for (int i = n * n; i < (n + 1) * (n + 1); ++i) s += lam * c_[i] * c_[i];
    }
    return s;
}

double h1m_inner(const SpectralCoeffs& a, const SpectralCoeffs& b, double m) {
    const int nmax = std::min(a.max_degree(), b.max_degree());
    double s = 0.0;
    for (int n = 0; n <= nmax; ++n) {
        const double w = m * m + eigenvalue(n);
        for (int i = n * n; i < (n + 1) * (n + 1); ++i)
            s += w * a.flat()[i] * b.flat()[i];
    }
    return s;
}

QuadratureRule build_rule(int exact_degree) {
    if (exact_degree < 0 || exact_degree > kRuleDegreeCap)
        throw std::domain_error("build_rule: exact_degree out of range [0, 600]");
    const int n_polar = (exact_degree + 2) / 2; // ceil((d+1)/2)
    const int n_phi = exact_degree + 1;
    const GaussLegendre gl = gauss_legendre(n_polar);

    QuadratureRule rule;
    rule.exact_degree = exact_degree;
    rule.nodes.reserve(static_cast<std::size_t>(n_polar) * n_phi);
    rule.weights.reserve(static_cast<std::size_t>(n_polar) * n_phi);
    const double wphi = 2.0 * kPi / n_phi;
    for (int i = 0; i < n_polar; ++i) {
        const double theta = std::acos(gl.nodes[i]);
        for (int j = 0; j < n_phi; ++j) {
            rule.nodes.push_back({theta, 2.0 * kPi * j / n_phi});
            rule.weights.push_back(gl.weights[i] * wphi);
        }
    }
    return rule;
}

double assoc_legendre(int n, int k_abs, double x) {
    if (n < 0 || n > kDegreeCap)
        throw std::domain_error("assoc_legendre: degree out of range [0, 256]");
    if (k_abs < 0 || k_abs > n)
        throw std::domain_error("assoc_legendre: order out of range [0, n]");
    if (!(x >= -1.0 && x <= 1.0))
        throw std::domain_error("assoc_legendre: argument outside [-1, 1]");
    const std::vector<double> row = legendre_row(n, x);
    return row[triangular(n, k_abs)];
}

double sph_harmonic(HarmonicIndex idx, SpherePoint s) {
    check_index(idx);
    const int mp = idx.k - idx.n - 1;
    const double pbar = assoc_legendre(idx.n, std::abs(mp), std::cos(s.theta));
    const TrigTables t = trig_tables(std::abs(mp), s.phi);
    return pbar * azimuth(mp, t);
}

TangentVector sph_harmonic_gradient(HarmonicIndex idx, SpherePoint s) {
    check_index(idx);
    if (idx.n == 0) return {0.0, 0.0};
    const double st = std::sin(s.theta);
    if (st < kPoleEps)
        throw pole_error("sph_harmonic_gradient: local frame degenerates at the pole");
    const int mp = idx.k - idx.n - 1;
    const int ma = std::abs(mp);
    const double x = std::cos(s.theta);
    const std::vector<double> row = legendre_row(idx.n, x);
    const double pn = row[triangular(idx.n, ma)];
    const double pn1 = idx.n - 1 >= ma ? row[triangular(idx.n - 1, ma)] : 0.0;
    const double dtheta =
        (idx.n * x * pn - (idx.n - 1 >= ma ? e_coeff(idx.n, ma) : 0.0) * pn1) / st;
    const TrigTables t = trig_tables(ma, s.phi);
    return {dtheta * azimuth(mp, t), pn * azimuth_dphi(mp, t) / st};
}

TangentVector vector_eigenfunction(HarmonicIndex idx, SpherePoint s) {
    check_index(idx);
    if (idx.n < 1)
        throw std::domain_error("vector_eigenfunction requires degree n >= 1");
    const TangentVector g = sph_harmonic_gradient(idx, s);
    const double scale = 1.0 / std::sqrt(eigenvalue(idx.n));
    return {scale * g.v_phi, -scale * g.v_theta};
}

namespace {

std::vector<double> build_basis_matrix(int max_degree, const QuadratureRule& rule) {
    const int dim = basis_dimension(max_degree);
    std::vector<double> table(rule.nodes.size() * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const SpherePoint s = rule.nodes[i];
        const std::vector<double> row = legendre_row(max_degree, std::cos(s.theta));
        const TrigTables t = trig_tables(max_degree, s.phi);
        double* out = table.data() + i * dim;
        for (int n = 0; n <= max_degree; ++n)
            for (int k = 1; k <= 2 * n + 1; ++k) {
                const int mp = k - n - 1;
                out[n * n + k - 1] = row[triangular(n, std::abs(mp))] * azimuth(mp, t);
            }
    }
    return table;
}

// Synthesis and Gram assembly reuse the same node-by-basis tables many times
// per rule, so memoize them.  The key pins the rule's degree, node count and
// first/last node coordinates, which identifies rules from build_rule.
struct BasisCacheKey {
    int max_degree;
    int exact_degree;
    std::size_t nodes;
    double theta0, phi_last, w0;
    bool operator==(const BasisCacheKey&) const = default;
};

BasisCacheKey cache_key(int max_degree, const QuadratureRule& rule) {
    return {max_degree,
            rule.exact_degree,
            rule.nodes.size(),
            rule.nodes.empty() ? 0.0 : rule.nodes.front().theta,
            rule.nodes.empty() ? 0.0 : rule.nodes.back().phi,
            rule.weights.empty() ? 0.0 : rule.weights.front()};
}

constexpr std::size_t kCacheDoubleCap = 48'000'000;

} // namespace

std::vector<double> basis_matrix(int max_degree, const QuadratureRule& rule) {
    if (max_degree < 0 || max_degree > kDegreeCap)
        throw std::domain_error("basis_matrix: max_degree out of range");
    return build_basis_matrix(max_degree, rule);
}

std::shared_ptr<const std::vector<double>> basis_matrix_cached(
    int max_degree, const QuadratureRule& rule) {
    if (max_degree < 0 || max_degree > kDegreeCap)
        throw std::domain_error("basis_matrix_cached: max_degree out of range");
    static thread_local std::vector<
        std::pair<BasisCacheKey, std::shared_ptr<const std::vector<double>>>>
        cache;
    const BasisCacheKey key = cache_key(max_degree, rule);
    for (const auto& entry : cache)
        if (entry.first == key) return entry.second;
    cache.emplace_back(key, std::make_shared<const std::vector<double>>(
                                build_basis_matrix(max_degree, rule)));
    std::size_t held = 0;
    for (const auto& entry : cache) held += entry.second->size();
    while (held > kCacheDoubleCap && cache.size() > 1) {
        held -= cache.front().second->size();
        cache.erase(cache.begin());
    }
    return cache.back().second;
}

namespace {
VectorBasis build_vector_basis(int max_degree, const QuadratureRule& rule);
} // namespace

VectorBasis vector_basis_matrix(int max_degree, const QuadratureRule& rule) {
    if (max_degree < 1 || max_degree > kDegreeCap)
        throw std::domain_error("vector_basis_matrix: max_degree out of range");
    return build_vector_basis(max_degree, rule);
}

std::shared_ptr<const VectorBasis> vector_basis_matrix_cached(
    int max_degree, const QuadratureRule& rule) {
    if (max_degree < 1 || max_degree > kDegreeCap)
        throw std::domain_error("vector_basis_matrix_cached: max_degree out of range");
    static thread_local std::vector<
        std::pair<BasisCacheKey, std::shared_ptr<const VectorBasis>>>
        cache;
    const BasisCacheKey key = cache_key(max_degree, rule);
    for (const auto& entry : cache)
        if (entry.first == key) return entry.second;
    cache.emplace_back(key, std::make_shared<const VectorBasis>(
                                build_vector_basis(max_degree, rule)));
    std::size_t held = 0;
    for (const auto& entry : cache)
        held += entry.second->theta.size() + entry.second->phi.size();
    while (held > kCacheDoubleCap && cache.size() > 1) {
        held -= cache.front().second->theta.size() + cache.front().second->phi.size();
        cache.erase(cache.begin());
    }
    return cache.back().second;
}

namespace {
VectorBasis build_vector_basis(int max_degree, const QuadratureRule& rule) {
    VectorBasis vb;
    vb.dim = basis_dimension(max_degree);
    vb.theta.assign(rule.nodes.size() * static_cast<std::size_t>(vb.dim), 0.0);
    vb.phi.assign(rule.nodes.size() * static_cast<std::size_t>(vb.dim), 0.0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const SpherePoint s = rule.nodes[i];
        const double st = std::sin(s.theta);
        if (st < kPoleEps)
            throw pole_error("vector_basis_matrix: rule node at a pole");
        const double x = std::cos(s.theta);
        const std::vector<double> row = legendre_row(max_degree, x);
        const TrigTables t = trig_tables(max_degree, s.phi);
        double* out_t = vb.theta.data() + i * vb.dim;
        double* out_p = vb.phi.data() + i * vb.dim;
        for (int n = 1; n <= max_degree; ++n) {
            const double inv_sqrt_lam = 1.0 / std::sqrt(eigenvalue(n));
            for (int k = 1; k <= 2 * n + 1; ++k) {
                const int mp = k - n - 1;
                const int ma = std::abs(mp);
                const double pn = row[triangular(n, ma)];
                const double pn1 = n - 1 >= ma ? row[triangular(n - 1, ma)] : 0.0;
                const double dtheta =
                    (n * x * pn - (n - 1 >= ma ? e_coeff(n, ma) : 0.0) * pn1) / st;
                const double g_theta = dtheta * azimuth(mp, t);
                const double g_phi = pn * azimuth_dphi(mp, t) / st;
                out_t[n * n + k - 1] = inv_sqrt_lam * g_phi;
                out_p[n * n + k - 1] = -inv_sqrt_lam * g_theta;
            }
        }
    }
    return vb;
}
} // namespace

Synthesis synthesize(const SpectralCoeffs& coeffs, const QuadratureRule& rule) {
    int top_degree = 0;
    for (int n = coeffs.max_degree(); n >= 1; --n) {
        bool any = false;
        for (int i = n * n; i < (n + 1) * (n + 1); ++i)
            if (coeffs.flat()[i] != 0.0) {
                any = true;
                break;
            }
        if (any) {
            top_degree = n;
            break;
        }
    }
    Synthesis out;
    out.degree_sufficient = rule.exact_degree >= 2 * top_degree;
    const auto table = basis_matrix_cached(coeffs.max_degree(), rule);
    const int dim = coeffs.dim();
    out.values.resize(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double* bt = table->data() + i * dim;
        double v = 0.0;
        for (int j = 0; j < dim; ++j) v += bt[j] * coeffs.flat()[j];
        out.values[i] = v;
    }
    return out;
}

double lp_norm(const std::vector<double>& values, double p_exp,
               const QuadratureRule& rule) {
    if (values.size() != rule.weights.size())
        throw std::invalid_argument("lp_norm: values not aligned with rule nodes");
    if (!(p_exp >= 1.0)) throw std::domain_error("lp_norm requires p_exp >= 1");
    double s = 0.0;
    const int ip = static_cast<int>(p_exp);
    if (p_exp == ip && ip <= 32) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            double term = 1.0, b = std::fabs(values[i]);
            for (int e = ip; e > 0; e >>= 1, b *= b)
                if (e & 1) term *= b;
            s += rule.weights[i] * term;
        }
    } else {
        for (std::size_t i = 0; i < values.size(); ++i)
            s += rule.weights[i] * std::pow(std::fabs(values[i]), p_exp);
    }
    return std::pow(s, 1.0 / p_exp);
}

SpectralCoeffs project(const std::vector<double>& values,
                       const QuadratureRule& rule, int max_degree) {
    if (values.size() != rule.nodes.size())
        throw std::invalid_argument("project: values not aligned with rule nodes");
    const auto table = basis_matrix_cached(max_degree, rule);
    const int dim = basis_dimension(max_degree);
    SpectralCoeffs out(max_degree);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double wv = rule.weights[i] * values[i];
        const double* bt = table->data() + i * dim;
        for (int j = 0; j < dim; ++j) out.flat()[j] += wv * bt[j];
    }
    return out;
}

std::string serialize(const SpectralCoeffs& coeffs) {
    std::ostringstream os;
    os.precision(17);
    for (int n = 0; n <= coeffs.max_degree(); ++n)
        for (int k = 1; k <= 2 * n + 1; ++k) {
            const double v = coeffs.flat()[n * n + k - 1];
            if (v != 0.0) os << n << ' ' << k << ' ' << v << '\n';
        }
    return os.str();
}

SpectralCoeffs parse_coeffs(const std::string& text) {
    std::istringstream is(text);
    struct Entry {
        int n, k;
        double v;
    };
    std::vector<Entry> entries;
    int max_degree = 0;
    int n = 0, k = 0;
    double v = 0.0;
    while (is >> n >> k >> v) {
        check_index({n, k});
        entries.push_back({n, k, v});
        max_degree = std::max(max_degree, n);
    }
    if (!is.eof())
        throw std::invalid_argument("parse_coeffs: malformed 'n k value' line");
    SpectralCoeffs c(max_degree);
    for (const Entry& e : entries) c.set({e.n, e.k}, e.v);
    return c;
}

} // namespace sphereineq::sphere
