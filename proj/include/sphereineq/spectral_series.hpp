#pragma once

#include <cstdint>
#include <vector>

namespace sphereineq::series {

/// The exponent/shift pair (p, m) that drives every series and bound.
struct Params {
    double p = 2.0; // exponent, p > 1 for certified evaluation
    double m = 1.0; // spectral shift, m >= 0
};

enum class TailMethod { IntegralTest, EulerMaclaurinTail, ClosedForm };

/// A numeric enclosure [lo, hi] together with the provenance of its tail bound.
struct CertifiedValue {
    double lo = 0.0;
    double hi = 0.0;
    TailMethod tail_method = TailMethod::ClosedForm;
    std::uint64_t terms_used = 0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Certified enclosure of I_p(m) = m^(2(p-1)) (p-1) sum_{n>=1} (2n+1) / (m^2+n^2+n)^p.
/// Sums explicitly to a cutoff and encloses the tail by a fourth-order
/// Euler-Maclaurin remainder intersected with the integral-test bracket.
CertifiedValue eval_I(Params params, double tol);

/// Certified enclosure of the lattice sum
/// J_p(m) = ((p-1) m^(2(p-1)) / pi) sum_{n in Z^2 \ 0} (m^2+|n|^2)^(-p).
/// Uses direct disk summation with shifted-annulus integral bounds, switching
/// to a theta-representation (elementary two-sided Bessel bounds) where the
/// direct tail cannot reach the tolerance within the lattice-point cap.
CertifiedValue eval_J(Params params, double tol);

/// Force the direct lattice route (exposed so the two routes can be
/// cross-checked against each other).
CertifiedValue eval_J_lattice(Params params, double tol);

/// Force the theta-representation route; requires m >= 2.5 and 1 < p <= 4.
CertifiedValue eval_J_theta(Params params, double tol);

/// Certified enclosure of R(p) = sum_{n>=2} (2n+1) / (n^2+n)^p, p > 1.
CertifiedValue eval_R(double p, double tol);

/// Relative defect between an adaptive quadrature of
/// integral_0^inf 2 pi r (m^2+r^2)^(-p) dr and pi m^(2-2p)/(p-1).
double r2_integral_check(Params params);

/// (1 - I_p(m)) * m^2 * 3 / (2(p-1)); tends to 1 as m -> infinity.
double asymptotic_defect(Params params, double tol);

struct MonotonicityReport {
    // Indices i where the increase from m_grid[i] to m_grid[i+1] failed to
    // certify: "violations" are certified decreases, "inconclusive" are
    // overlapping enclosures. Evidence only, never a proof.
    std::vector<std::size_t> violations;
    std::vector<std::size_t> inconclusive;
    std::size_t certified_increases = 0;
};

/// Evaluates I_p on an ascending m grid and reports every adjacent pair whose
/// enclosures fail to certify an increase.
MonotonicityReport scan_monotonicity(double p, const std::vector<double>& m_grid,
                                     double tol);

} // namespace sphereineq::series
