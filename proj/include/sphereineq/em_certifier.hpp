#pragma once

#include "sphereineq/spectral_series.hpp"

#include <string>
#include <vector>

namespace sphereineq::em {

/// Closed forms of the series summand f_m(x) = m^(2(p-1))(p-1)(2x+1)/(m^2+x^2+x)^p
/// at x = 0 and of the integral of the fourth-derivative majorant g.
struct EmClosedForms {
    double f0;         // f_m(0)
    double f1;         // f_m'(0)
    double f3;         // f_m'''(0)
    double g_integral; // integral of g over [0, inf)
};

EmClosedForms closed_forms(series::Params params);

/// The summand f_m as a function on its symmetric extension (x > root of u).
double f_m(series::Params params, double x);

/// Pointwise majorant g(x) >= |f_m''''(x)|.
double g_majorant(series::Params params, double x);

/// Max relative error between the closed-form derivatives at 0 and O(h^2)
/// central finite differences of f_m.
double finite_difference_check(series::Params params, double h);

/// 1 - (1/36)(p-1) m^-6 (24 m^4 - 11 p m^2 - 2 p (p+1)); majorizes I_p(m).
double em_upper_bound(series::Params params);

/// Positive root of 24 m^4 - 11 p m^2 - 2 p (p+1): the threshold above which
/// em_upper_bound drops below 1.
double m0(double p);

/// sqrt(2)/sqrt(e^(1/(p-1)) - 1): below this shift every series term is
/// decreasing in p.
double m1(double p);

/// Root of m1(p) - m0(p) on [2, 2.5], located by a 100-point uniqueness scan
/// followed by bisection.
double find_p_star(double tol = 1e-8);

/// phi(z, p) = 9 z p^2 + (48 z ln z - 40 z + 9) p + 48 ln z + 32, 0 < z <= 1.
double phi(double z, double p);

/// phi as a quadratic in p: a p^2 + b p + c.
struct PhiCoefficients {
    double a, b, c;
};
PhiCoefficients phi_coefficients(double z);

/// A(z, p) = (p-1) / (48 (p z + 1)(1 - (p-1) ln z)); positive on 0 < z <= 1.
double a_factor(double z, double p);

/// G(m, p) = m^(2(p-1))(p-1)(3/(m^2+2)^p + R(p)); dominates I_p(m).
double g_bound(series::Params params);

/// Euler-Maclaurin bound (9p^2 - 49p + 88) / (24 2^p (p-1)) for R(p).
double r_em_bound(double p);

enum class CertBranch { EMBound, PhiNegative, MonotoneInP, DirectSeries };

std::string to_string(CertBranch branch);

struct CertCell {
    double p;
    double m;
    CertBranch branch;
    double bound_value;
    bool verdict;
};

/// Machine transcript of the case analysis behind I_p(m) < 1, on a finite
/// parameter grid (verified on grid, not a continuum proof object).
struct CertificateReport {
    std::vector<CertCell> cells;
    double p_star = 0.0;
    double m_star = 0.0;
    bool summary = true;
};

CertificateReport certify(const std::vector<double>& p_grid, double m_cap,
                          double tol, int m_cells = 40);

} // namespace sphereineq::em
