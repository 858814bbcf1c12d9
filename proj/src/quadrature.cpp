#include "sphereineq/quadrature.hpp"

#include "sphereineq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

namespace sphereineq {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (positive half).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    double value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    double resabs = kWgk[7] * std::fabs(fc);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kronrod += kWgk[i] * (f1 + f2);
        resabs += kWgk[i] * (std::fabs(f1) + std::fabs(f2));
        if (i % 2 == 1) gauss += kWg[i / 2] * (f1 + f2);
    }
    Segment s;
    s.a = a;
    s.b = b;
    s.value = kronrod * h;
    const double diff = std::fabs((kronrod - gauss) * h);
    // QUADPACK-style sharpened estimate, floored at a few ulp of |int |f||.
    double err = diff;
    const double scale = resabs * std::fabs(h);
    if (scale > 0.0 && diff < scale)
        err = scale * std::min(1.0, std::pow(200.0 * diff / scale, 1.5));
    s.error = std::max(err, 50.0 * 2.220446049250313e-16 * scale);
    return s;
}

} // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int max_segments) {
    if (!(b > a)) return {0.0, 0.0, 0};
    std::priority_queue<Segment> queue;
    queue.push(gk15(f, a, b));
    double total = queue.top().value;
    double total_err = queue.top().error;
    std::size_t evals = 15;
    int segments = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (segments >= max_segments)
            throw quadrature_error("adaptive quadrature: segment cap reached");
        Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw quadrature_error("adaptive quadrature: interval too small to split");
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        evals += 30;
        ++segments;
    }
    return {total, total_err, evals};
}

QuadResult integrate_to_inf(const std::function<double(double)>& f, double a,
                            double rel_tol, double abs_tol, int max_segments) {
    auto mapped = [&f, a](double t) {
        const double den = 1.0 - t;
        const double x = a + t / den;
        return f(x) / (den * den);
    };
    // Stop a hair short of t = 1; the integrand must vanish there anyway.
    return integrate(mapped, 0.0, 1.0 - 1e-14, rel_tol, abs_tol, max_segments);
}

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi-type initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

} // namespace sphereineq
