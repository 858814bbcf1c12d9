#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sphereineq {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // conservative estimate of the absolute error
    std::size_t evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Splits the worst segment until the summed error estimate drops below
/// max(abs_tol, rel_tol * |value|); throws quadrature_error at the segment cap.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-13, double abs_tol = 0.0,
                     int max_segments = 4000);

/// Integral of f over [a, inf), mapped to [0,1) through x = a + t/(1-t).
/// The integrand must decay fast enough that f(x) * x^2 -> 0.
QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double rel_tol = 1e-13, double abs_tol = 0.0,
                            int max_segments = 4000);

struct GaussLegendre {
    std::vector<double> nodes;   // ascending in (-1, 1)
    std::vector<double> weights; // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n-1.
GaussLegendre gauss_legendre(int n);

} // namespace sphereineq
