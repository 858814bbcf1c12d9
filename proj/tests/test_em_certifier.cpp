#include "sphereineq/em_certifier.hpp"

#include "sphereineq/errors.hpp"
#include "sphereineq/quadrature.hpp"
#include "sphereineq/spectral_series.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace sphereineq;
using series::Params;

TEST_CASE("closed forms at reference points") {
    const em::EmClosedForms cf = em::closed_forms({2.0, 1.0});
    CHECK(cf.f0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cf.f1 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cf.f3 == doctest::Approx(24.0).epsilon(1e-14));
    CHECK(cf.g_integral == doctest::Approx(536.0).epsilon(1e-14)); // 2*(172+84+12)

    CHECK_THROWS_AS(em::closed_forms({2.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(em::closed_forms({1.0, 1.0}), std::domain_error);
}

TEST_CASE("g_integral matches adaptive quadrature of the majorant") {
    for (double p : {1.5, 2.0, 3.0})
        for (double m : {0.5, 1.0, 2.0}) {
            const em::EmClosedForms cf = em::closed_forms({p, m});
            const QuadResult q = integrate_to_inf(
                [p, m](double x) { return em::g_majorant({p, m}, x); }, 0.0, 1e-11);
            CHECK(std::fabs(q.value / cf.g_integral - 1.0) <= 1e-8);
        }
}

TEST_CASE("finite differences validate the derivative closed forms") {
    CHECK(em::finite_difference_check({2.0, 1.0}, 1e-3) <= 1e-6);
    CHECK(em::finite_difference_check({3.0, 2.0}, 1e-3) <= 1e-6);
    CHECK(em::finite_difference_check({2.0, 1.0}, 0.099) <= 1e-2);
    CHECK_THROWS_AS(em::finite_difference_check({2.0, 1.0}, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(em::finite_difference_check({2.0, 1.0}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("em_upper_bound reference values and root normalization") {
    CHECK(em::em_upper_bound({2.0, 2.0}) ==
          doctest::Approx(1.0 - 284.0 / 2304.0).epsilon(1e-14));
    CHECK(em::em_upper_bound({2.0, 1.0}) ==
          doctest::Approx(1.0 + 10.0 / 36.0).epsilon(1e-14));
    for (double p : {1.0, 1.5, 2.0, 3.0})
        CHECK(std::fabs(em::em_upper_bound({p, em::m0(p)}) - 1.0) <= 1e-12);
    CHECK_THROWS_AS(em::em_upper_bound({2.0, 0.0}), std::domain_error);
}

TEST_CASE("em_upper_bound dominates eval_I on a spot grid") {
    for (double p : {1.225, 2.0, 5.0, 10.0})
        for (double m : {0.5, 1.0, 5.0, 20.0}) {
            const double bound = em::em_upper_bound({p, m});
            CHECK(series::eval_I({p, m}, 1e-9).hi <= bound + 1e-9);
        }
}

TEST_CASE("thresholds m0 and m1") {
    CHECK(std::fabs(em::m0(2.0) - 1.1406) <= 5e-5);
    // m0(1) solves 24 m^4 - 11 m^2 - 4 = 0.
    const double root = em::m0(1.0);
    CHECK(root == doctest::Approx(0.8350674).epsilon(1e-6));
    const double m2 = root * root;
    CHECK(std::fabs(24.0 * m2 * m2 - 11.0 * m2 - 4.0) <= 1e-12);
    // m0 is increasing in p.
    CHECK(em::m0(1.5) < em::m0(2.0));
    CHECK(em::m0(2.0) < em::m0(3.0));

    CHECK(em::m1(2.0) == doctest::Approx(1.0788667).epsilon(1e-6));
    CHECK(em::m1(1.01) < 1e-3);
    CHECK_THROWS_AS(em::m1(1.0), std::domain_error);
    CHECK_THROWS_AS(em::m0(0.5), std::domain_error);
}

TEST_CASE("p_star location and bisection contract") {
    const double p_star = em::find_p_star(1e-6);
    CHECK(std::fabs(p_star - 2.10915) <= 1e-4);
    CHECK(std::fabs(em::find_p_star(1e-2) - p_star) <= 1e-2);
    CHECK(std::fabs(em::m0(p_star) - 1.169) <= 2e-3);
    // m1 - m0 changes sign across the bracket.
    CHECK(em::m1(2.0) - em::m0(2.0) < 0.0);
    CHECK(em::m1(2.5) - em::m0(2.5) > 0.0);
}

TEST_CASE("phi quadratic coefficients reproduce the displayed polynomials") {
    const double z0 = 0.5 * em::m0(2.0) * em::m0(2.0); // 0.65049...
    const em::PhiCoefficients c0 = em::phi_coefficients(z0);
    CHECK(std::fabs(c0.a - 5.854) <= 2e-3);
    CHECK(std::fabs(c0.b - (-30.446)) <= 2e-3);
    CHECK(std::fabs(c0.c - 11.358) <= 2e-3);

    const double z_star = 0.5 * std::pow(em::m0(em::find_p_star(1e-8)), 2);
    const em::PhiCoefficients cs = em::phi_coefficients(z_star);
    CHECK(std::fabs(cs.a - 6.1495) <= 1e-2);
    CHECK(std::fabs(cs.b - (-30.8222)) <= 1e-2);
    CHECK(std::fabs(cs.c - 13.7197) <= 1e-2);

    // phi evaluated through the coefficients agrees with phi itself.
    for (double p : {1.2, 2.0, 3.0})
        CHECK(em::phi(z0, p) ==
              doctest::Approx(c0.a * p * p + c0.b * p + c0.c).epsilon(1e-12));
}

TEST_CASE("phi and a_factor domains, a_factor closed form at z = 1") {
    for (double p : {1.5, 2.0, 5.0})
        CHECK(em::a_factor(1.0, p) ==
              doctest::Approx((p - 1.0) / (48.0 * (p + 1.0))).epsilon(1e-14));
    CHECK_THROWS_AS(em::phi(0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(em::phi(1.5, 2.0), std::domain_error);
    CHECK_THROWS_AS(em::a_factor(-0.1, 2.0), std::domain_error);
}

TEST_CASE("phi is strictly increasing in z") {
    for (double p : {1.5, 2.0, 2.1, 3.0}) {
        double prev = em::phi(0.02, p);
        for (double z = 0.07; z <= 1.0 + 1e-12; z += 0.05) {
            const double cur = em::phi(std::min(z, 1.0), p);
            CHECK(prev < cur);
            prev = cur;
        }
    }
}

TEST_CASE("g_bound dominates the series") {
    const double g21 = em::g_bound({2.0, 1.0});
    CHECK(g21 == doctest::Approx(1.0 / 3.0 + 0.25).epsilon(1e-9));
    CHECK(g21 >= series::eval_I({2.0, 1.0}, 1e-9).mid());
    CHECK(em::g_bound({2.0, 0.0}) == 0.0);
    CHECK(em::g_bound({1.5, 1.0}) >= series::eval_I({1.5, 1.0}, 1e-9).hi);
}

TEST_CASE("Gmp1 chain: G - 1 <= A phi for m <= sqrt(2)") {
    for (double p : {1.225, 1.5, 2.0, 3.0, 5.0, 7.75, 10.0})
        for (double m : {0.3, 0.7, 1.0, 1.3, 1.41}) {
            const double z = 0.5 * m * m;
            const double lhs = em::g_bound({p, m}) - 1.0;
            const double rhs = em::a_factor(z, p) * em::phi(z, p);
            CHECK(lhs <= rhs + 1e-9);
            CHECK(em::a_factor(z, p) > 0.0);
        }
}

TEST_CASE("r_em_bound dominates eval_R") {
    CHECK(em::r_em_bound(2.0) == doctest::Approx(13.0 / 48.0).epsilon(1e-14));
    for (double p : {1.5, 2.0, 3.0, 5.0})
        CHECK(em::r_em_bound(p) >= series::eval_R(p, 1e-10).hi);
    CHECK(em::r_em_bound(1.5) > 0.0);
    CHECK_THROWS_AS(em::r_em_bound(1.0), std::domain_error);
}

TEST_CASE("series terms decrease in p below m1") {
    for (double p : {2.5, 3.0, 5.0}) {
        const double m = 0.9 * em::m1(p);
        const double p2 = p + 0.7;
        auto term = [m](double pe, int n) {
            return std::pow(m, 2.0 * (pe - 1.0)) * (pe - 1.0) * (2.0 * n + 1.0) /
                   std::pow(m * m + static_cast<double>(n) * n + n, pe);
        };
        for (int n = 1; n <= 100; ++n) CHECK(term(p, n) > term(p2, n));
    }
}

TEST_CASE("certify reproduces the case analysis") {
    const em::CertificateReport rep =
        em::certify({1.5, 2.0, 2.05, 2.2, 3.0}, 10.0, 1e-8);
    CHECK(rep.summary);
    CHECK(rep.cells.size() == 5 * 40);
    CHECK(std::fabs(rep.p_star - 2.10915) <= 1e-4);
    CHECK(std::fabs(rep.m_star - 1.169) <= 2e-3);
    for (const em::CertCell& cell : rep.cells) {
        CHECK(cell.verdict);
        if (cell.branch == em::CertBranch::EMBound) CHECK(cell.m > em::m0(cell.p));
        if (cell.branch == em::CertBranch::MonotoneInP) {
            CHECK(cell.p > 2.0);
            CHECK(cell.m < em::m1(cell.p));
        }
    }

    const em::CertificateReport phi_only = em::certify({2.0}, em::m0(2.0), 1e-8);
    CHECK(phi_only.summary);
    for (const em::CertCell& cell : phi_only.cells) {
        CHECK(cell.branch == em::CertBranch::PhiNegative);
        CHECK(cell.verdict);
    }

    const em::CertificateReport empty = em::certify({}, 5.0, 1e-8);
    CHECK(empty.cells.empty());
    CHECK(empty.summary);

    CHECK_THROWS_AS(em::certify({0.9}, 5.0, 1e-8), std::domain_error);
    CHECK_THROWS_AS(em::certify({2.0}, -1.0, 1e-8), std::invalid_argument);
}
