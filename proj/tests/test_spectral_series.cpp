#include "sphereineq/spectral_series.hpp"

#include "sphereineq/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace sphereineq;
using series::CertifiedValue;
using series::Params;
using series::TailMethod;

TEST_CASE("eval_I degenerate and domain handling") {
    const CertifiedValue v = series::eval_I({2.0, 0.0}, 1e-9);
    CHECK(v.lo == 0.0);
    CHECK(v.hi == 0.0);
    CHECK(v.tail_method == TailMethod::ClosedForm);

    CHECK_THROWS_AS(series::eval_I({1.0, 1.0}, 1e-9), std::domain_error);
    CHECK_THROWS_AS(series::eval_I({0.5, 1.0}, 1e-9), std::domain_error);
    CHECK_THROWS_AS(series::eval_I({2.0, -1.0}, 1e-9), std::domain_error);
    CHECK_THROWS_AS(series::eval_I({2.0, 1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("eval_I against the brute-force oracle") {
    // Frozen from brute_I(2, 1, 1e6): [0.535682285264600, 0.535682285264600].
    const CertifiedValue v = series::eval_I({2.0, 1.0}, 1e-10);
    CHECK(v.width() <= 1e-10);
    CHECK(v.contains(0.5356822852646));
    CHECK(std::fabs(v.mid() - 0.5357) < 2e-4);

    const oracles::Bracket live = oracles::brute_I(2.0, 1.0, 200000);
    CHECK(live.overlaps(v.lo, v.hi));

    const oracles::Bracket b3 = oracles::brute_I(3.0, 2.5, 200000);
    const CertifiedValue v3 = series::eval_I({3.0, 2.5}, 1e-11);
    CHECK(b3.overlaps(v3.lo, v3.hi));
}

TEST_CASE("eval_I near the large-m limit") {
    const CertifiedValue v = series::eval_I({2.0, 100.0}, 1e-10);
    CHECK(v.lo > 0.999);
    CHECK(v.hi < 1.0);
    // 1 - I = (2(p-1)/3) m^-2 + O(m^-4)
    CHECK(std::fabs((1.0 - v.mid()) * 1.5e4 - 1.0) < 1e-3);
}

TEST_CASE("eval_I enclosures are sound for partial sums and nest with tol") {
    const Params pr{1.5, 3.0};
    const CertifiedValue loose = series::eval_I(pr, 1e-6);
    const CertifiedValue tight = series::eval_I(pr, 1e-10);
    CHECK(tight.lo >= loose.lo - 1e-15);
    CHECK(tight.hi <= loose.hi + 1e-15);

    // Any explicit partial sum stays below hi.
    const oracles::Bracket partial = oracles::brute_I(pr.p, pr.m, 5000);
    CHECK(partial.lo <= loose.hi);
    CHECK(partial.hi >= loose.lo);
}

TEST_CASE("eval_R telescoping value and oracle values") {
    const CertifiedValue r2 = series::eval_R(2.0, 1e-12);
    CHECK(r2.contains(0.25));
    CHECK(r2.width() <= 1e-12);

    // Frozen from brute_R(3, 1e6): 0.02911380631918857.
    const CertifiedValue r3 = series::eval_R(3.0, 1e-12);
    CHECK(r3.contains(0.02911380631918857));

    const CertifiedValue r15 = series::eval_R(1.5, 1e-9);
    CHECK(r15.width() <= 1e-9);
    CHECK(oracles::brute_R(1.5, 400000).overlaps(r15.lo, r15.hi));

    CHECK_THROWS_AS(series::eval_R(1.0, 1e-9), std::domain_error);
}

TEST_CASE("eval_J degenerate input and oracle value") {
    const CertifiedValue z = series::eval_J({2.0, 0.0}, 1e-9);
    CHECK(z.lo == 0.0);
    CHECK(z.hi == 0.0);

    // Frozen from the theta representation, cross-checked against
    // brute_J(2, 1, 2000): J_2(1) = 0.70874286068856.
    const CertifiedValue v = series::eval_J({2.0, 1.0}, 1e-9);
    CHECK(v.contains(0.70874286068856));
    CHECK(v.hi < 1.0);
    CHECK(oracles::brute_J(2.0, 1.0, 600).overlaps(v.lo, v.hi));

    const CertifiedValue big = series::eval_J({2.0, 100.0}, 1e-6);
    CHECK(big.lo > 0.99);
    CHECK(big.hi < 1.0);
}

TEST_CASE("eval_J theta and lattice routes agree") {
    for (const Params pr : {Params{1.5, 0.5}, Params{2.0, 1.0}, Params{3.0, 4.0},
                            Params{6.0, 1.7}}) {
        const CertifiedValue theta = series::eval_J_theta(pr, 1e-9);
        const CertifiedValue lattice = series::eval_J_lattice(pr, 1e-4);
        CHECK(theta.lo <= lattice.hi);
        CHECK(lattice.lo <= theta.hi);
        CHECK(theta.width() <= 1e-9);
    }
}

TEST_CASE("eval_J route domains and nonconvergence") {
    CHECK_THROWS_AS(series::eval_J_theta({10.0, 1.0}, 1e-6), std::invalid_argument);
    CHECK_THROWS_AS(series::eval_J_theta({2.0, 0.1}, 1e-6), std::invalid_argument);
    // p near 1 decays too slowly for the direct route at any useful tolerance.
    CHECK_THROWS_AS(series::eval_J_lattice({1.05, 50.0}, 1e-6), nonconvergent_error);
    // The automatic route still resolves it through the theta representation.
    const CertifiedValue v = series::eval_J({1.05, 50.0}, 1e-9);
    CHECK(v.hi < 1.0);
    CHECK(v.width() <= 1e-9);
}

TEST_CASE("certified verdicts I < 1 and J < 1 on a spot grid") {
    for (double p : {1.1, 2.0, 10.0})
        for (double m : {0.0, 2.04, 55.1, 100.0}) {
            const CertifiedValue i = series::eval_I({p, m}, 1e-9);
            CHECK(i.hi < 1.0);
            const CertifiedValue j = series::eval_J({p, m}, p > 8.0 ? 1e-7 : 1e-9);
            CHECK(j.hi < 1.0);
        }
}

TEST_CASE("r2_integral_check hits the closed-form normalization") {
    for (double p : {1.5, 2.0, 3.0, 5.0})
        for (double m : {0.5, 1.0, 2.0, 10.0})
            CHECK(series::r2_integral_check({p, m}) <= 1e-10);
    CHECK(series::r2_integral_check({1.1, 10.0}) <= 1e-8);
    CHECK_THROWS_AS(series::r2_integral_check({1.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(series::r2_integral_check({2.0, 0.0}), std::domain_error);
}

TEST_CASE("asymptotic_defect approaches 1 at rate m^-2") {
    CHECK(std::fabs(series::asymptotic_defect({2.0, 100.0}, 0.01) - 1.0) <= 0.01);
    CHECK(std::fabs(series::asymptotic_defect({3.0, 50.0}, 0.02) - 1.0) <= 0.02);
    CHECK(std::fabs(series::asymptotic_defect({1.5, 200.0}, 0.005) - 1.0) <= 0.005);

    const double d50 = series::asymptotic_defect({2.0, 50.0}, 1e-3) - 1.0;
    const double d100 = series::asymptotic_defect({2.0, 100.0}, 1e-3) - 1.0;
    const double drop = std::fabs(d50) / std::fabs(d100);
    CHECK(drop >= 3.0);
    CHECK(drop <= 5.0);

    CHECK_THROWS_AS(series::asymptotic_defect({2.0, 5.0}, 0.01), std::domain_error);
}

TEST_CASE("scan_monotonicity reports no certified violations") {
    std::vector<double> grid;
    for (double m = 0.0; m <= 5.0 + 1e-12; m += 0.25) grid.push_back(m);
    const series::MonotonicityReport rep = series::scan_monotonicity(2.0, grid, 1e-8);
    CHECK(rep.violations.empty());
    CHECK(rep.certified_increases + rep.inconclusive.size() == grid.size() - 1);

    const series::MonotonicityReport single =
        series::scan_monotonicity(2.0, {1.0}, 1e-8);
    CHECK(single.violations.empty());
    CHECK(single.inconclusive.empty());
    CHECK(single.certified_increases == 0);

    std::vector<double> grid4;
    for (double m = 0.0; m <= 10.0 + 1e-12; m += 0.5) grid4.push_back(m);
    CHECK(series::scan_monotonicity(4.0, grid4, 1e-8).violations.empty());

    CHECK_THROWS_AS(series::scan_monotonicity(2.0, {1.0, 0.5}, 1e-8),
                    std::invalid_argument);
    CHECK_THROWS_AS(series::scan_monotonicity(2.0, {-1.0, 0.5}, 1e-8),
                    std::domain_error);
}
