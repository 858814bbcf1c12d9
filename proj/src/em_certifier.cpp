#include "sphereineq/em_certifier.hpp"

#include "sphereineq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sphereineq::em {

namespace {

void require_pm(series::Params params) {
    if (!(params.p > 1.0)) throw std::domain_error("requires p > 1");
    if (!(params.m > 0.0)) throw std::domain_error("requires m > 0");
}

} // namespace

EmClosedForms closed_forms(series::Params params) {
    require_pm(params);
    const double p = params.p, m = params.m;
    const double m2 = m * m, m4 = m2 * m2, m8 = m4 * m4;
    EmClosedForms cf;
    cf.f0 = (p - 1.0) / m2;
    cf.f1 = (p - 1.0) * (2.0 * m2 - p) / m4;
    cf.f3 = -(p - 1.0) * p *
            (12.0 * m4 - 12.0 * m2 * p - 12.0 * m2 + p * p + 3.0 * p + 2.0) / m8;
    cf.g_integral = p * (p - 1.0) *
                    (172.0 * m4 + 28.0 * (p + 1.0) * m2 + p * p + 3.0 * p + 2.0) / m8;
    return cf;
}

double f_m(series::Params params, double x) {
    const double p = params.p, m = params.m;
    const double u = m * m + x * x + x;
    if (!(u > 0.0))
        throw std::domain_error("f_m: argument outside the domain of the summand");
    return std::pow(m, 2.0 * (p - 1.0)) * (p - 1.0) * (2.0 * x + 1.0) *
           std::pow(u, -p);
}

double g_majorant(series::Params params, double x) {
    require_pm(params);
    const double p = params.p, m = params.m;
    const double u = m * m + x * x + x;
    const double s = x + 0.5;
    const double s2 = s * s;
    const double factor = 32.0 * p * (p * p - 1.0) * std::pow(m, 2.0 * p - 2.0);
    return factor * (s2 * s2 * s * (p + 2.0) * (p + 3.0) * std::pow(u, -p - 4.0) +
                     5.0 * s2 * s * (p + 2.0) * std::pow(u, -p - 3.0) +
                     3.75 * s * std::pow(u, -p - 2.0));
}

double finite_difference_check(series::Params params, double h) {
    require_pm(params);
    if (!(h > 0.0 && h < 0.1))
        throw std::invalid_argument("finite_difference_check requires 0 < h < 0.1");
    const EmClosedForms cf = closed_forms(params);
    // Fourth-order central stencils on the symmetric extension of f_m.
    const double d1 = f_m(params, h) - f_m(params, -h);
    const double d2 = f_m(params, 2.0 * h) - f_m(params, -2.0 * h);
    const double d3 = f_m(params, 3.0 * h) - f_m(params, -3.0 * h);
    const double fp = (8.0 * d1 - d2) / (12.0 * h);
    const double fppp = (-13.0 * d1 + 8.0 * d2 - d3) / (8.0 * h * h * h);
    const double err1 = std::fabs(fp - cf.f1) / std::max(std::fabs(cf.f1), 1.0);
    const double err3 = std::fabs(fppp - cf.f3) / std::max(std::fabs(cf.f3), 1.0);
    return std::max(err1, err3);
}

double em_upper_bound(series::Params params) {
    if (!(params.p >= 1.0)) throw std::domain_error("em_upper_bound requires p >= 1");
    if (!(params.m > 0.0)) throw std::domain_error("em_upper_bound requires m > 0");
    const double p = params.p, m = params.m;
    const double m2 = m * m;
    return 1.0 - (p - 1.0) / (36.0 * m2 * m2 * m2) *
                     (24.0 * m2 * m2 - 11.0 * p * m2 - 2.0 * p * (p + 1.0));
}

double m0(double p) {
    if (!(p >= 1.0)) throw std::domain_error("m0 requires p >= 1");
    return std::sqrt(3.0 * std::sqrt(313.0 * p * p + 192.0 * p) + 33.0 * p) / 12.0;
}

double m1(double p) {
    if (!(p > 1.0)) throw std::domain_error("m1 requires p > 1");
    return std::numbers::sqrt2 / std::sqrt(std::expm1(1.0 / (p - 1.0)));
}

double find_p_star(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("find_p_star: tol must be positive");
    auto diff = [](double p) { return m1(p) - m0(p); };
    double lo = 2.0, hi = 2.5;

    // Uniqueness scan before bisecting.
    const int scan = 100;
    int sign_changes = 0;
    double prev = diff(lo);
    double bracket_lo = lo, bracket_hi = hi;
    for (int i = 1; i <= scan; ++i) {
        const double x = lo + (hi - lo) * i / scan;
        const double d = diff(x);
        if ((prev < 0.0) != (d < 0.0)) {
            ++sign_changes;
            bracket_lo = lo + (hi - lo) * (i - 1) / scan;
            bracket_hi = x;
        }
        prev = d;
    }
    if (sign_changes != 1)
        throw bracket_error("find_p_star: expected exactly one sign change on [2, 2.5], found " +
                            std::to_string(sign_changes));

    double a = bracket_lo, b = bracket_hi;
    double fa = diff(a);
    while (b - a > tol) {
        const double c = 0.5 * (a + b);
        const double fc = diff(c);
        if ((fa < 0.0) == (fc < 0.0)) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    return 0.5 * (a + b);
}

double phi(double z, double p) {
    if (!(z > 0.0 && z <= 1.0))
        throw std::domain_error("phi requires 0 < z <= 1");
    const double lz = std::log(z);
    return 9.0 * z * p * p + (48.0 * z * lz - 40.0 * z + 9.0) * p + 48.0 * lz + 32.0;
}

PhiCoefficients phi_coefficients(double z) {
    if (!(z > 0.0 && z <= 1.0))
        throw std::domain_error("phi_coefficients requires 0 < z <= 1");
    const double lz = std::log(z);
    return {9.0 * z, 48.0 * z * lz - 40.0 * z + 9.0, 48.0 * lz + 32.0};
}

double a_factor(double z, double p) {
    if (!(z > 0.0 && z <= 1.0))
        throw std::domain_error("a_factor requires 0 < z <= 1");
    if (!(p > 1.0)) throw std::domain_error("a_factor requires p > 1");
    return (p - 1.0) / (48.0 * (p * z + 1.0) * (1.0 - (p - 1.0) * std::log(z)));
}

double g_bound(series::Params params) {
    const double p = params.p, m = params.m;
    if (!(p > 1.0)) throw std::domain_error("g_bound requires p > 1");
    if (!(m >= 0.0)) throw std::domain_error("g_bound requires m >= 0");
    if (m == 0.0) return 0.0;
    const double r_mid = series::eval_R(p, 1e-10).mid();
    return std::pow(m, 2.0 * (p - 1.0)) * (p - 1.0) *
           (3.0 * std::pow(m * m + 2.0, -p) + r_mid);
}

double r_em_bound(double p) {
    if (!(p > 1.0)) throw std::domain_error("r_em_bound requires p > 1");
    return (9.0 * p * p - 49.0 * p + 88.0) / (24.0 * std::pow(2.0, p) * (p - 1.0));
}

std::string to_string(CertBranch branch) {
    switch (branch) {
        case CertBranch::EMBound: return "EMBound";
        case CertBranch::PhiNegative: return "PhiNegative";
        case CertBranch::MonotoneInP: return "MonotoneInP";
        case CertBranch::DirectSeries: return "DirectSeries";
    }
    return "?";
}

namespace {

// The p = 2 certificate covers every m > 0: above m0(2) the Euler-Maclaurin
// bound applies, below it phi(m^2/2, 2) is negative.
bool p2_certificate(double m, double* bound_value) {
    const double m0_2 = m0(2.0);
    if (m > m0_2) {
        const double b = em_upper_bound({2.0, m});
        *bound_value = b;
        return b < 1.0;
    }
    const double z = 0.5 * m * m;
    const double b = phi(z, 2.0);
    *bound_value = b;
    return b < 0.0 && a_factor(z, 2.0) > 0.0;
}

} // namespace

CertificateReport certify(const std::vector<double>& p_grid, double m_cap,
                          double tol, int m_cells) {
    if (!(m_cap > 0.0)) throw std::invalid_argument("certify: m_cap must be positive");
    if (m_cells < 1) throw std::invalid_argument("certify: m_cells must be >= 1");
    for (double p : p_grid)
        if (!(p > 1.0)) throw std::domain_error("certify: all p must exceed 1");

    CertificateReport report;
    report.p_star = find_p_star(std::min(tol, 1e-8));
    report.m_star = m0(report.p_star);
    const double z_star = 0.5 * report.m_star * report.m_star;

    std::vector<double> ps(p_grid);
    std::sort(ps.begin(), ps.end());

    for (double p : ps) {
        const double m0p = m0(p);
        const double m1p = m1(p);
        for (int j = 1; j <= m_cells; ++j) {
            const double m = m_cap * j / m_cells;
            CertCell cell{p, m, CertBranch::EMBound, 0.0, false};
            if (m > m0p) {
                cell.branch = CertBranch::EMBound;
                cell.bound_value = em_upper_bound({p, m});
                cell.verdict = cell.bound_value < 1.0;
            } else if (p <= 2.0) {
                const double z = 0.5 * m * m;
                cell.branch = CertBranch::PhiNegative;
                cell.bound_value = phi(z, p);
                cell.verdict = cell.bound_value < 0.0 && a_factor(z, p) > 0.0;
            } else if (p <= report.p_star) {
                // phi is increasing in z and z = m^2/2 <= z_star here, so a
                // negative value at z_star settles the whole column.
                cell.branch = CertBranch::PhiNegative;
                cell.bound_value = phi(z_star, p);
                cell.verdict = cell.bound_value < 0.0 &&
                               a_factor(0.5 * m * m, p) > 0.0 &&
                               m <= report.m_star * (1.0 + 1e-12);
            } else {
                cell.branch = CertBranch::MonotoneInP;
                double p2_value = 0.0;
                const bool p2_ok = p2_certificate(m, &p2_value);
                cell.bound_value = p2_value;
                cell.verdict = (m < m1p) && p2_ok;
            }
            if (!cell.verdict) {
                cell.branch = CertBranch::DirectSeries;
                cell.bound_value = series::eval_I({p, m}, tol).hi;
                cell.verdict = cell.bound_value < 1.0;
            }
            report.summary = report.summary && cell.verdict;
            report.cells.push_back(cell);
        }
    }
    return report;
}

} // namespace sphereineq::em
