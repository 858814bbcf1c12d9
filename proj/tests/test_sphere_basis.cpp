#include "sphereineq/sphere_basis.hpp"

#include "sphereineq/errors.hpp"
#include "sphereineq/inequality_lab.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace sphereineq;
using sphere::HarmonicIndex;
using sphere::SpherePoint;

namespace {
constexpr double kPi = std::numbers::pi;

SpherePoint random_point(lab::Rng& rng) {
    return {std::acos(2.0 * rng.uniform() - 1.0), 2.0 * kPi * rng.uniform()};
}
} // namespace

TEST_CASE("normalized Legendre reference values") {
    CHECK(sphere::assoc_legendre(0, 0, 0.37) ==
          doctest::Approx(1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-15));
    CHECK(sphere::assoc_legendre(1, 0, 1.0) ==
          doctest::Approx(std::sqrt(3.0 / (4.0 * kPi))).epsilon(1e-15));

    // Diagonal closed form: Pbar_n^n(x) = sqrt((2n+1)/(4 pi (2n)!)) (2n-1)!! (1-x^2)^(n/2).
    double dfact = 1.0;
    for (int k = 19; k >= 1; k -= 2) dfact *= k;
    double fact20 = 1.0;
    for (int k = 1; k <= 20; ++k) fact20 *= k;
    const double ref =
        std::sqrt(21.0 / (4.0 * kPi * fact20)) * dfact * std::pow(0.91, 5.0);
    CHECK(std::fabs(sphere::assoc_legendre(10, 10, 0.3) / ref - 1.0) <= 1e-12);

    CHECK_THROWS_AS(sphere::assoc_legendre(257, 0, 0.5), std::domain_error);
    CHECK_THROWS_AS(sphere::assoc_legendre(3, 4, 0.5), std::domain_error);
    CHECK_THROWS_AS(sphere::assoc_legendre(3, 1, 1.5), std::domain_error);
}

TEST_CASE("addition theorem and rotation invariance") {
    lab::Rng rng(101);
    double first_value = -1.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SpherePoint s = random_point(rng);
        for (int n : {1, 2, 5, 12, 20, 32}) {
            double sum = 0.0;
            for (int k = 1; k <= 2 * n + 1; ++k) {
                const double y = sphere::sph_harmonic({n, k}, s);
                sum += y * y;
            }
            const double expect = (2.0 * n + 1.0) / (4.0 * kPi);
            CHECK(std::fabs(sum - expect) <= 1e-10 * expect);
            if (n == 12) {
                if (first_value < 0.0) first_value = sum;
                CHECK(std::fabs(sum - first_value) <= 1e-10 * first_value);
            }
        }
    }
    CHECK(sphere::sph_harmonic({0, 1}, {0.3, 5.1}) ==
          doctest::Approx(1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-15));
}

TEST_CASE("gradient identities") {
    lab::Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const SpherePoint s = random_point(rng);
        for (int n : {1, 3, 9, 20, 32}) {
            double gsum = 0.0, wsum = 0.0;
            for (int k = 1; k <= 2 * n + 1; ++k) {
                gsum += sphere::sph_harmonic_gradient({n, k}, s).norm_sq();
                wsum += sphere::vector_eigenfunction({n, k}, s).norm_sq();
            }
            const double lam = sphere::eigenvalue(n);
            const double expect_g = lam * (2.0 * n + 1.0) / (4.0 * kPi);
            CHECK(std::fabs(gsum - expect_g) <= 1e-8 * expect_g);
            const double expect_w = (2.0 * n + 1.0) / (4.0 * kPi);
            CHECK(std::fabs(wsum - expect_w) <= 1e-8 * expect_w);
        }
    }

    // The rotated field has the same length pointwise.
    const SpherePoint s{1.1, 0.4};
    const auto g = sphere::sph_harmonic_gradient({5, 3}, s);
    const auto w = sphere::vector_eigenfunction({5, 3}, s);
    CHECK(w.norm_sq() ==
          doctest::Approx(g.norm_sq() / sphere::eigenvalue(5)).epsilon(1e-14));

    const auto zero = sphere::sph_harmonic_gradient({0, 1}, s);
    CHECK(zero.v_theta == 0.0);
    CHECK(zero.v_phi == 0.0);

    CHECK_THROWS_AS(sphere::sph_harmonic_gradient({3, 2}, {1e-13, 0.0}), pole_error);
    CHECK_THROWS_AS(sphere::vector_eigenfunction({0, 1}, s), std::domain_error);
}

TEST_CASE("gradient L2 norm equals the eigenvalue") {
    const sphere::QuadratureRule rule = sphere::build_rule(24);
    for (const HarmonicIndex idx : {HarmonicIndex{3, 1}, HarmonicIndex{7, 9}}) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            norm2 += rule.weights[i] *
                     sphere::sph_harmonic_gradient(idx, rule.nodes[i]).norm_sq();
        CHECK(norm2 == doctest::Approx(sphere::eigenvalue(idx.n)).epsilon(1e-12));
    }
}

TEST_CASE("quadrature rule integrates exactly") {
    const sphere::QuadratureRule trivial = sphere::build_rule(0);
    double total = 0.0;
    for (double w : trivial.weights) total += w;
    CHECK(total == doctest::Approx(4.0 * kPi).epsilon(1e-14));

    const sphere::QuadratureRule r12 = sphere::build_rule(12);
    double self = 0.0;
    for (std::size_t i = 0; i < r12.nodes.size(); ++i) {
        const double y = sphere::sph_harmonic({5, 3}, r12.nodes[i]);
        self += r12.weights[i] * y * y;
    }
    CHECK(std::fabs(self - 1.0) <= 1e-13);

    const sphere::QuadratureRule r14 = sphere::build_rule(14);
    double cross = 0.0;
    for (std::size_t i = 0; i < r14.nodes.size(); ++i)
        cross += r14.weights[i] * sphere::sph_harmonic({5, 3}, r14.nodes[i]) *
                 sphere::sph_harmonic({7, 1}, r14.nodes[i]);
    CHECK(std::fabs(cross) <= 1e-13);

    CHECK_THROWS_AS(sphere::build_rule(601), std::domain_error);
    CHECK_THROWS_AS(sphere::build_rule(-1), std::domain_error);
}

TEST_CASE("basis Gram matrix is the identity under the rule") {
    const sphere::QuadratureRule rule = sphere::build_rule(45);
    const int dim = sphere::basis_dimension(20);
    const std::vector<double> table = sphere::basis_matrix(20, rule);
    double worst = 0.0;
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            double g = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                g += rule.weights[i] * table[i * dim + a] * table[i * dim + b];
            worst = std::max(worst, std::fabs(g - (a == b ? 1.0 : 0.0)));
        }
    CHECK(worst <= 1e-12);
}

TEST_CASE("vector eigenfunctions are orthonormal for degrees 1 and 2") {
    const sphere::QuadratureRule rule = sphere::build_rule(16);
    const sphere::VectorBasis vb = sphere::vector_basis_matrix(2, rule);
    for (int a = 1; a < 9; ++a)
        for (int b = a; b < 9; ++b) {
            double g = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                g += rule.weights[i] *
                     (vb.theta[i * vb.dim + a] * vb.theta[i * vb.dim + b] +
                      vb.phi[i * vb.dim + a] * vb.phi[i * vb.dim + b]);
            CHECK(std::fabs(g - (a == b ? 1.0 : 0.0)) <= 1e-13);
        }
}

TEST_CASE("synthesize is linear and flags unresolved degrees") {
    const sphere::QuadratureRule rule = sphere::build_rule(8);
    sphere::SpectralCoeffs constant(0);
    constant.set({0, 1}, std::sqrt(4.0 * kPi));
    const sphere::Synthesis ones = sphere::synthesize(constant, rule);
    for (double v : ones.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ones.degree_sufficient);

    lab::Rng rng(5);
    sphere::SpectralCoeffs a(3), b(3);
    for (int i = 0; i < a.dim(); ++i) {
        a.flat()[i] = rng.symmetric();
        b.flat()[i] = rng.symmetric();
    }
    sphere::SpectralCoeffs combo(3);
    for (int i = 0; i < a.dim(); ++i)
        combo.flat()[i] = 2.5 * a.flat()[i] - 0.75 * b.flat()[i];
    const auto sa = sphere::synthesize(a, rule);
    const auto sb = sphere::synthesize(b, rule);
    const auto sc = sphere::synthesize(combo, rule);
    for (std::size_t i = 0; i < sc.values.size(); ++i)
        CHECK(sc.values[i] ==
              doctest::Approx(2.5 * sa.values[i] - 0.75 * sb.values[i])
                  .epsilon(1e-12));

    sphere::SpectralCoeffs deep(6);
    deep.set({6, 4}, 1.0);
    CHECK_FALSE(sphere::synthesize(deep, rule).degree_sufficient);
}

TEST_CASE("lp_norm reference values") {
    const sphere::QuadratureRule rule = sphere::build_rule(16);
    const std::vector<double> ones(rule.nodes.size(), 1.0);
    for (double p : {1.0, 2.0, 3.0})
        CHECK(sphere::lp_norm(ones, p, rule) ==
              doctest::Approx(std::pow(4.0 * kPi, 1.0 / p)).epsilon(1e-13));

    sphere::SpectralCoeffs c(1);
    c.set({1, 1}, 1.0);
    const auto syn = sphere::synthesize(c, rule);
    CHECK(sphere::lp_norm(syn.values, 2.0, rule) ==
          doctest::Approx(1.0).epsilon(1e-13));
    // integral of Y^4 over a degree-1 harmonic: 9/(20 pi)
    CHECK(std::pow(sphere::lp_norm(syn.values, 4.0, rule), 4.0) ==
          doctest::Approx(9.0 / (20.0 * kPi)).epsilon(1e-12));

    CHECK_THROWS_AS(sphere::lp_norm({1.0, 2.0}, 2.0, rule), std::invalid_argument);
    CHECK_THROWS_AS(sphere::lp_norm(ones, 0.5, rule), std::domain_error);
}

TEST_CASE("projection recovers band-limited coefficients") {
    const sphere::QuadratureRule rule = sphere::build_rule(12);
    lab::Rng rng(23);
    sphere::SpectralCoeffs c(4);
    for (int i = 0; i < c.dim(); ++i) c.flat()[i] = rng.symmetric();
    const auto values = sphere::synthesize(c, rule).values;
    const sphere::SpectralCoeffs back = sphere::project(values, rule, 4);
    for (int i = 0; i < c.dim(); ++i)
        CHECK(back.flat()[i] == doctest::Approx(c.flat()[i]).epsilon(1e-12));
}

TEST_CASE("spectral norms and H1(m) inner product") {
    sphere::SpectralCoeffs c(2);
    c.set({1, 2}, 3.0);
    c.set({2, 5}, -2.0);
    CHECK(c.norm_sq() == doctest::Approx(13.0).epsilon(1e-15));
    CHECK(c.grad_norm_sq() == doctest::Approx(9.0 * 2.0 + 4.0 * 6.0).epsilon(1e-15));
    CHECK(c.zero_mean());
    CHECK(sphere::h1m_inner(c, c, 2.0) ==
          doctest::Approx(9.0 * 6.0 + 4.0 * 10.0).epsilon(1e-15));
    c.set({0, 1}, 0.5);
    CHECK_FALSE(c.zero_mean());
}

TEST_CASE("coefficient text format round trip") {
    lab::Rng rng(77);
    sphere::SpectralCoeffs c(5);
    for (int i = 0; i < c.dim(); ++i)
        c.flat()[i] = rng.uniform() < 0.4 ? rng.symmetric() : 0.0;
    const sphere::SpectralCoeffs back = sphere::parse_coeffs(sphere::serialize(c));
    for (int i = 0; i < c.dim(); ++i) {
        const double restored = i < back.dim() ? back.flat()[i] : 0.0;
        CHECK(restored == c.flat()[i]); // exact round trip
    }
    CHECK_THROWS_AS(sphere::parse_coeffs("1 1 not_a_number"), std::invalid_argument);
}

TEST_CASE("recurrences stay stable at the degree cap") {
    // Addition theorem at n = 256.
    lab::Rng rng(512);
    for (int trial = 0; trial < 3; ++trial) {
        const SpherePoint s = random_point(rng);
        double sum = 0.0;
        for (int k = 1; k <= 513; ++k) {
            const double y = sphere::sph_harmonic({256, k}, s);
            sum += y * y;
        }
        const double expect = 513.0 / (4.0 * kPi);
        CHECK(std::fabs(sum - expect) <= 1e-10 * expect);
    }

    // Diagonal closed form in the log domain:
    // Pbar_n^n(x) = sqrt((2n+1)/(4 pi (2n)!)) (2n-1)!! (1-x^2)^(n/2).
    const int n = 256;
    const double x = 0.3;
    const double log_ref = 0.5 * (std::log(2.0 * n + 1.0) - std::log(4.0 * kPi) -
                                  std::lgamma(2.0 * n + 1.0)) +
                           (std::lgamma(2.0 * n + 1.0) - n * std::log(2.0) -
                            std::lgamma(n + 1.0)) +
                           0.5 * n * std::log1p(-x * x);
    const double got = sphere::assoc_legendre(n, n, x);
    CHECK(std::fabs(std::log(got) - log_ref) <= 1e-12 * std::fabs(log_ref));
}
