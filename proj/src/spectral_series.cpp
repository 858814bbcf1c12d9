#include "sphereineq/spectral_series.hpp"

#include "sphereineq/errors.hpp"
#include "sphereineq/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphereineq::series {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kScalarTermCap = 100'000'000;
constexpr double kLatticeRadiusCap = 3568.0; // pi * D^2 ~ 4e7 lattice points

/// Neumaier-compensated accumulator that also tracks a rounding slack of
/// max(4 ulp |running value|, 1e-300) per accumulated term.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        slack_ += std::max(4.0 * kEps * std::fabs(t), 1e-300);
    }
    double value() const { return sum_ + comp_; }
    double slack() const { return slack_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double slack_ = 0.0;
};

struct Interval {
    double lo, hi;
};

Interval inflate(Interval iv, double rel) {
    iv.lo -= rel * std::fabs(iv.lo) + 1e-300;
    iv.hi += rel * std::fabs(iv.hi) + 1e-300;
    return iv;
}

double ipow(double base, int e) {
    double r = 1.0, b = base;
    for (; e > 0; e >>= 1, b *= b)
        if (e & 1) r *= b;
    return r;
}

bool is_small_integer(double p) { return p == std::floor(p) && p <= 64.0; }

// ---------------------------------------------------------------------------
// Scalar series sum_{n >= start} (2n+1) / (m^2 + n^2 + n)^p.
//
// The summand is f(x) = s u^-p with s = 2x+1, u = m^2 + x^2 + x and u' = s,
// so f has the elementary antiderivative u^(1-p)/(1-p) and every derivative
// needed by the fourth-order Euler-Maclaurin tail is a short polynomial in s
// times powers of u.  Odd powers of s integrate in closed form through
// s^2 = 4u + c, c = 1 - 4 m^2.
// ---------------------------------------------------------------------------

struct ScalarSeries {
    double p;
    double m;

    double u(double x) const { return m * m + x * x + x; }

    double f(double x) const {
        return (2.0 * x + 1.0) * std::pow(u(x), -p);
    }

    // integral of f over [x, inf)
    double tail_integral(double x) const {
        return std::pow(u(x), 1.0 - p) / (p - 1.0);
    }

    double f1(double x) const {
        const double ux = u(x), s = 2.0 * x + 1.0;
        return 2.0 * std::pow(ux, -p) - p * s * s * std::pow(ux, -p - 1.0);
    }

    double f3(double x) const {
        const double ux = u(x), s = 2.0 * x + 1.0;
        const double s2 = s * s;
        return -12.0 * p * std::pow(ux, -p - 1.0) +
               12.0 * p * (p + 1.0) * s2 * std::pow(ux, -p - 2.0) -
               p * (p + 1.0) * (p + 2.0) * s2 * s2 * std::pow(ux, -p - 3.0);
    }

    // pointwise majorant of |f''''| (all terms taken with positive sign)
    double g(double x) const {
        const double ux = u(x), s = 2.0 * x + 1.0;
        const double s2 = s * s;
        return 60.0 * p * (p + 1.0) * s * std::pow(ux, -p - 2.0) +
               20.0 * p * (p + 1.0) * (p + 2.0) * s * s2 * std::pow(ux, -p - 3.0) +
               p * (p + 1.0) * (p + 2.0) * (p + 3.0) * s * s2 * s2 * std::pow(ux, -p - 4.0);
    }

    // integral of g over [x, inf), in closed form
    double g_tail_integral(double x) const {
        const double ux = u(x);
        const double c = 1.0 - 4.0 * m * m;
        const double a1 = 60.0 * p + 80.0 * p * (p + 2.0) +
                          16.0 * p * (p + 2.0) * (p + 3.0);
        const double a2 = 20.0 * p * (p + 1.0) + 8.0 * p * (p + 1.0) * (p + 3.0);
        const double a3 = p * (p + 1.0) * (p + 2.0);
        return a1 * std::pow(ux, -p - 1.0) + a2 * c * std::pow(ux, -p - 2.0) +
               a3 * c * c * std::pow(ux, -p - 3.0);
    }

    // f is decreasing on [x, inf) once p s^2 >= 2u there; the left side grows
    // faster, so checking at x is enough.
    bool decreasing_from(double x) const {
        const double s = 2.0 * x + 1.0;
        return p * s * s >= 2.0 * u(x);
    }
};

struct ScalarTail {
    Interval enclosure;
    TailMethod method;
};

ScalarTail scalar_tail(const ScalarSeries& ser, double n) {
    // Integral-test bracket (valid: cutoffs are chosen in the decreasing range).
    Interval it{ser.tail_integral(n + 1.0), ser.tail_integral(n)};
    it = inflate(it, 8.0 * kEps);

    // Euler-Maclaurin refinement with the closed-form remainder majorant.
    const double center = ser.tail_integral(n) - 0.5 * ser.f(n) -
                          ser.f1(n) / 12.0 + ser.f3(n) / 720.0;
    const double radius = ser.g_tail_integral(n) / 720.0;
    Interval em{center - radius, center + radius};
    em = inflate(em, 1e-12);

    Interval meet{std::max(it.lo, em.lo), std::min(it.hi, em.hi)};
    if (meet.lo > meet.hi)
        throw std::logic_error("scalar_tail: integral-test and Euler-Maclaurin "
                               "tails are disjoint");
    const TailMethod method = (em.hi - em.lo) < (it.hi - it.lo)
                                  ? TailMethod::EulerMaclaurinTail
                                  : TailMethod::IntegralTest;
    return {meet, method};
}

CertifiedValue certified_scalar_sum(double p, double m, std::uint64_t start,
                                    double prefactor, double tol) {
    ScalarSeries ser{p, m};

    std::uint64_t cutoff = std::max<std::uint64_t>(
        {10, start, static_cast<std::uint64_t>(std::ceil(m)),
         static_cast<std::uint64_t>(std::ceil(p))});
    while (!ser.decreasing_from(static_cast<double>(cutoff)))
        cutoff *= 2;

    CompensatedSum sum;
    std::uint64_t summed_to = start - 1;
    while (true) {
        for (std::uint64_t n = summed_to + 1; n <= cutoff; ++n)
            sum.add(ser.f(static_cast<double>(n)));
        summed_to = cutoff;

        const ScalarTail tail = scalar_tail(ser, static_cast<double>(cutoff));
        Interval raw{sum.value() + tail.enclosure.lo - sum.slack(),
                     sum.value() + tail.enclosure.hi + sum.slack()};
        Interval total = inflate({prefactor * raw.lo, prefactor * raw.hi}, 4.0 * kEps);
        total.lo = std::max(total.lo, 0.0);

        if (total.hi - total.lo <= tol) {
            return {total.lo, total.hi, tail.method, summed_to - start + 1};
        }
        if (cutoff >= kScalarTermCap)
            throw nonconvergent_error(
                "certified_scalar_sum: tolerance " + std::to_string(tol) +
                " unreachable within " + std::to_string(kScalarTermCap) + " terms");
        cutoff = std::min<std::uint64_t>(cutoff * 2, kScalarTermCap);
    }
}

void validate_common(double p, double tol) {
    if (!(p > 1.0))
        throw std::domain_error("certified series evaluation requires p > 1");
    if (!(tol > 0.0))
        throw std::invalid_argument("tolerance must be positive");
}

// ---------------------------------------------------------------------------
// Lattice sum over Z^2 \ {0}.
// ---------------------------------------------------------------------------

struct LatticeSummand {
    double m2;
    double p;
    bool int_p;
    int pi;

    double operator()(double q) const { // q = |n|^2
        const double b = m2 + q;
        return int_p ? 1.0 / ipow(b, pi) : std::pow(b, -p);
    }
};

// Tail of sum_{|n| > D} (m^2 + |n|^2)^-p.  Cells of lattice points beyond
// radius D are disjoint and avoid the disk of radius D - sqrt(2)/2, which
// yields the two shifted radial integrals below (sqrt(2)/2 is half a cell
// diagonal); both reduce to the closed form T1(t) = (m^2+t^2)^(1-p)/(2(p-1)).
Interval lattice_tail(double p, double m, double d) {
    const double rt2 = std::numbers::sqrt2;
    auto t1 = [&](double t) {
        return std::pow(m * m + t * t, 1.0 - p) / (2.0 * (p - 1.0));
    };
    const double t_hi = d - rt2;
    const double t_lo = d + rt2;
    Interval iv{2.0 * kPi * t1(t_lo) * (1.0 - 1.0 / (rt2 * t_lo)),
                2.0 * kPi * t1(t_hi) * (1.0 + 1.0 / (rt2 * t_hi))};
    iv.lo = std::max(iv.lo, 0.0);
    return inflate(iv, 8.0 * kEps);
}

} // namespace

CertifiedValue eval_I(Params params, double tol) {
    validate_common(params.p, tol);
    if (!(params.m >= 0.0))
        throw std::domain_error("eval_I requires m >= 0");
    if (params.m == 0.0) return {0.0, 0.0, TailMethod::ClosedForm, 0};
    const double prefactor =
        (params.p - 1.0) * std::pow(params.m, 2.0 * (params.p - 1.0));
    return certified_scalar_sum(params.p, params.m, 1, prefactor, tol);
}

CertifiedValue eval_R(double p, double tol) {
    validate_common(p, tol);
    return certified_scalar_sum(p, 0.0, 2, 1.0, tol);
}

CertifiedValue eval_J_lattice(Params params, double tol) {
    validate_common(params.p, tol);
    if (!(params.m >= 0.0))
        throw std::domain_error("eval_J requires m >= 0");
    if (params.m == 0.0) return {0.0, 0.0, TailMethod::ClosedForm, 0};

    const double p = params.p, m = params.m;
    const double prefactor = (p - 1.0) * std::pow(m, 2.0 * (p - 1.0)) / kPi;
    const LatticeSummand h{m * m, p, is_small_integer(p),
                           static_cast<int>(p)};

    double radius = std::max(16.0, std::ceil(m));
    double prev_radius = 0.0;
    CompensatedSum sum;
    std::uint64_t points = 0;

    while (true) {
        // Add the open shell prev_radius < |n| <= radius (quadrant symmetry).
        const double r2_new = radius * radius;
        const double r2_old = prev_radius * prev_radius;
        const long a_max = static_cast<long>(radius);
        for (long a = 1; a <= a_max; ++a) {
            const double a2 = static_cast<double>(a) * static_cast<double>(a);
            if (a2 > r2_old) { // axis points (+-a, 0), (0, +-a)
                sum.add(4.0 * h(a2));
                points += 4;
            }
            const double b2_new = r2_new - a2;
            if (b2_new < 1.0) continue;
            const long b_hi = static_cast<long>(std::floor(std::sqrt(b2_new)));
            const double b2_old = r2_old - a2;
            const long b_lo =
                b2_old >= 1.0 ? static_cast<long>(std::floor(std::sqrt(b2_old))) + 1 : 1;
            for (long b = b_lo; b <= b_hi; ++b) {
                sum.add(4.0 * h(a2 + static_cast<double>(b) * static_cast<double>(b)));
                points += 4;
            }
        }
        prev_radius = radius;

        const Interval tail = lattice_tail(p, m, radius);
        Interval raw{sum.value() + tail.lo - sum.slack(),
                     sum.value() + tail.hi + sum.slack()};
        Interval total = inflate({prefactor * raw.lo, prefactor * raw.hi}, 4.0 * kEps);
        total.lo = std::max(total.lo, 0.0);
        if (total.hi - total.lo <= tol)
            return {total.lo, total.hi, TailMethod::IntegralTest, points};

        if (radius >= kLatticeRadiusCap)
            throw nonconvergent_error(
                "eval_J_lattice: tolerance " + std::to_string(tol) +
                " unreachable within the lattice-point cap");
        radius = std::min(std::ceil(radius * 1.6), kLatticeRadiusCap);
    }
}

namespace {

// Elementary upper bound for K_nu(z) from
// K_nu(z) = sqrt(pi/(2z)) e^-z / Gamma(nu+1/2) *
//           int_0^inf e^-s s^(nu-1/2) (1 + s/(2z))^(nu-1/2) ds
// via (1+u)^a <= e^(a u) for a >= 0; requires 2z > nu - 1/2.
double bessel_k_upper(double nu, double z) {
    const double pre = std::sqrt(kPi / (2.0 * z)) * std::exp(-z);
    if (nu <= 0.5) return pre;
    const double shift = (nu - 0.5) / (2.0 * z);
    if (shift >= 1.0)
        throw std::invalid_argument("bessel_k_upper: z too small for nu");
    return pre * std::pow(1.0 - shift, -(nu + 0.5));
}

// Enclosure of K_nu(z) by adaptive quadrature of the exact representation
// K_nu(z) = int_0^inf e^(-z cosh t) cosh(nu t) dt, truncated at T = 6 with
// remainder <= e^(-z cosh T + nu T) / (z sinh T - nu).
Interval bessel_k_quad(double nu, double z) {
    constexpr double kCut = 6.0;
    const double sinh_cut = std::sinh(kCut);
    if (!(z * sinh_cut > nu + 1.0))
        throw std::invalid_argument("bessel_k_quad: z too small for nu");
    const double log_rem = -z * std::cosh(kCut) + nu * kCut;
    const double remainder =
        log_rem < -700.0 ? 1e-290 : std::exp(log_rem) / (z * sinh_cut - nu);

    const QuadResult q = integrate(
        [nu, z](double t) { return std::exp(-z * std::cosh(t)) * std::cosh(nu * t); },
        0.0, kCut, 1e-13, 1e-305);
    const double pad = 10.0 * q.error + remainder + 4.0 * kEps * std::fabs(q.value);
    return {std::max(0.0, q.value - pad), q.value + pad + 1e-290};
}

} // namespace

CertifiedValue eval_J_theta(Params params, double tol) {
    validate_common(params.p, tol);
    const double p = params.p, m = params.m;
    if (!(m >= 0.2) || !(p <= 8.0))
        throw std::invalid_argument(
            "eval_J_theta requires m >= 0.2 and 1 < p <= 8");

    const double nu = p - 1.0;
    const double t = 2.0 * kPi * m;
    // Dual (theta/Poisson) representation of the full lattice sum:
    //   sum_{n in Z^2} (m^2+|n|^2)^-p
    //     = pi m^(2-2p)/(p-1) + C sum_{k != 0} |k|^(p-1) K_{p-1}(2 pi m |k|)
    // with C = 2 pi^p m^(1-p) / Gamma(p); all correction terms are positive.
    const double c_mid = 2.0 * std::pow(kPi, p) * std::pow(m, 1.0 - p) / std::tgamma(p);
    const Interval c_iv = inflate({c_mid, c_mid}, 1e-13);

    // The geometric ring-tail bound needs t k1 past the Bessel turning point
    // and a contracting ratio.
    const int ring_min = static_cast<int>(std::ceil(std::max(nu + 1.0, p) / t)) + 1;
    const int ring_cap = 400;

    Interval head{0.0, 0.0};
    std::uint64_t points = 0;
    double tail_hi = std::numeric_limits<double>::infinity();
    int ring = 0;
    while (ring < ring_cap) {
        ++ring;
        Interval ring_sum{0.0, 0.0};
        auto add_point = [&](long a, long b) {
            const double rho = std::hypot(static_cast<double>(a), static_cast<double>(b));
            const double z = t * rho;
            const double w = std::pow(rho, p - 1.0);
            if (z > 600.0) { // e^-z underflows; the term is below 1e-250
                ring_sum.hi += w * 1e-250;
            } else {
                const Interval k = bessel_k_quad(nu, z);
                ring_sum.lo += w * k.lo;
                ring_sum.hi += w * k.hi;
            }
            ++points;
        };
        for (long a = -ring; a <= ring; ++a) {
            add_point(a, ring);
            add_point(a, -ring);
        }
        for (long b = -ring + 1; b <= ring - 1; ++b) {
            add_point(ring, b);
            add_point(-ring, b);
        }
        head.lo += ring_sum.lo;
        head.hi += ring_sum.hi;
        if (ring < ring_min) continue;

        // Geometric tail over rings j > ring via K_nu(tj) <= K_nu(tk1) e^(-t(j-k1))
        // and (j/k1)^p <= e^(p (j-k1)/k1).
        const double k1 = ring + 1.0;
        const double khi_k1 =
            t * k1 > 600.0 ? 1e-250 : bessel_k_upper(nu, t * k1);
        const double ratio = std::exp(p / k1 - t);
        tail_hi = 8.0 * std::pow(2.0, 0.5 * (p - 1.0)) * khi_k1 *
                  std::pow(k1, p) / (1.0 - ratio);
        if (ring_sum.hi < 0.1 * tol / c_iv.hi && tail_hi < 0.1 * tol / c_iv.hi)
            break;
    }

    head = inflate(head, 1e-12); // plain accumulation over the rings
    Interval corr{c_iv.lo * head.lo, c_iv.hi * (head.hi + tail_hi)};

    // J = prefactor * (h_hat(0) + corr - m^-2p) and prefactor * h_hat(0) == 1
    // identically, so only the correction block carries uncertainty.
    const double center = std::pow(m, -2.0 * p);
    const double prefactor = (p - 1.0) * std::pow(m, 2.0 * (p - 1.0)) / kPi;
    Interval delta = inflate({corr.lo - center, corr.hi - center}, 8.0 * kEps);
    Interval total = inflate({1.0 + prefactor * delta.lo, 1.0 + prefactor * delta.hi},
                             4.0 * kEps);
    total.lo = std::max(total.lo, 0.0);
    if (total.hi - total.lo > tol)
        throw nonconvergent_error("eval_J_theta: tolerance unreachable");
    return {total.lo, total.hi, TailMethod::ClosedForm, points};
}

CertifiedValue eval_J(Params params, double tol) {
    validate_common(params.p, tol);
    if (!(params.m >= 0.0))
        throw std::domain_error("eval_J requires m >= 0");
    if (params.m == 0.0) return {0.0, 0.0, TailMethod::ClosedForm, 0};
    if (params.m >= 0.2 && params.p <= 8.0) {
        try {
            return eval_J_theta(params, tol);
        } catch (const nonconvergent_error&) {
            // fall through to the direct lattice route
        }
    }
    return eval_J_lattice(params, tol);
}

double r2_integral_check(Params params) {
    const double p = params.p, m = params.m;
    if (!(p > 1.0)) throw std::domain_error("r2_integral_check requires p > 1");
    if (!(m > 0.0)) throw std::domain_error("r2_integral_check requires m > 0");

    const double cut = 50.0 * std::max(m, 1.0);
    auto head = [m, p](double r) {
        return 2.0 * kPi * r * std::pow(m * m + r * r, -p);
    };
    // Far piece after r = 1/s followed by w = s^(2p-2); the Jacobian cancels
    // the endpoint singularity exactly:
    //   int_T^inf 2 pi r (m^2+r^2)^-p dr
    //     = (pi/(p-1)) int_0^(T^(2-2p)) (m^2 w^(1/(p-1)) + 1)^-p dw.
    auto far = [m, p](double w) {
        return std::pow(m * m * std::pow(w, 1.0 / (p - 1.0)) + 1.0, -p);
    };

    const double exact = kPi * std::pow(m, 2.0 - 2.0 * p) / (p - 1.0);
    const QuadResult q_head = integrate(head, 0.0, cut, 1e-12, 1e-13 * exact);
    const QuadResult q_far =
        integrate(far, 0.0, std::pow(cut, 2.0 - 2.0 * p), 1e-12,
                  1e-13 * exact * (p - 1.0) / kPi);
    const double total = q_head.value + (kPi / (p - 1.0)) * q_far.value;
    return std::fabs(total / exact - 1.0);
}

double asymptotic_defect(Params params, double tol) {
    const double p = params.p, m = params.m;
    if (!(p > 1.0)) throw std::domain_error("asymptotic_defect requires p > 1");
    if (!(m >= 10.0)) throw std::domain_error("asymptotic_defect requires m >= 10");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const double scale = 3.0 * m * m / (2.0 * (p - 1.0));
    const double inner_tol = std::max(1e-12, 0.25 * tol / scale);
    const CertifiedValue iv = eval_I(params, inner_tol);
    return (1.0 - iv.mid()) * scale;
}

MonotonicityReport scan_monotonicity(double p, const std::vector<double>& m_grid,
                                     double tol) {
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (!(m_grid[i] >= 0.0))
            throw std::domain_error("scan_monotonicity: grid values must be >= 0");
        if (i > 0 && !(m_grid[i] > m_grid[i - 1]))
            throw std::invalid_argument("scan_monotonicity: grid must be strictly ascending");
    }
    std::vector<CertifiedValue> values;
    values.reserve(m_grid.size());
    for (double m : m_grid) values.push_back(eval_I({p, m}, tol));

    MonotonicityReport report;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        if (values[i].hi < values[i + 1].lo)
            ++report.certified_increases;
        else if (values[i].lo > values[i + 1].hi)
            report.violations.push_back(i);
        else
            report.inconclusive.push_back(i);
    }
    return report;
}

} // namespace sphereineq::series
