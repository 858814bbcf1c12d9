#include "sphereineq/symmetric_eigen.hpp"

#include "sphereineq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sphereineq::linalg {

SymmetricEigen jacobi_eigen(std::vector<double> a, int dim, int max_sweeps) {
    if (dim < 0 || a.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("jacobi_eigen: matrix size mismatch");

    SymmetricEigen result;
    result.dim = dim;
    result.eigenvalues.resize(dim);
    result.eigenvectors.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    if (dim == 0) return result;

    std::vector<double>& v = result.eigenvectors;
    for (int i = 0; i < dim; ++i) v[i + static_cast<std::size_t>(dim) * i] = 1.0;

    auto at = [&a, dim](int r, int c) -> double& {
        return a[static_cast<std::size_t>(r) * dim + c];
    };

    double frob = 0.0;
    for (double x : a) frob += x * x;
    frob = std::sqrt(frob);
    const double stop = std::max(1e-300, 1e-15 * frob);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < dim; ++p)
            for (int q = p + 1; q < dim; ++q) off += 2.0 * at(p, q) * at(p, q);
        if (std::sqrt(off) <= stop) {
            for (int i = 0; i < dim; ++i) result.eigenvalues[i] = at(i, i);
            // Sort descending, permuting eigenvector columns alongside.
            std::vector<int> order(dim);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int x, int y) {
                return result.eigenvalues[x] > result.eigenvalues[y];
            });
            SymmetricEigen sorted;
            sorted.dim = dim;
            sorted.eigenvalues.resize(dim);
            sorted.eigenvectors.resize(static_cast<std::size_t>(dim) * dim);
            for (int j = 0; j < dim; ++j) {
                sorted.eigenvalues[j] = result.eigenvalues[order[j]];
                for (int i = 0; i < dim; ++i)
                    sorted.eigenvectors[i + static_cast<std::size_t>(dim) * j] =
                        v[i + static_cast<std::size_t>(dim) * order[j]];
            }
            return sorted;
        }

        for (int p = 0; p < dim - 1; ++p) {
            for (int q = p + 1; q < dim; ++q) {
                const double apq = at(p, q);
                if (std::fabs(apq) <= 1e-30 * frob) continue;
                const double app = at(p, p), aqq = at(q, q);
                const double phi = 0.5 * std::atan2(2.0 * apq, aqq - app);
                const double c = std::cos(phi), s = std::sin(phi);

                const double new_pp = c * c * app + s * s * aqq - 2.0 * s * c * apq;
                const double new_qq = s * s * app + c * c * aqq + 2.0 * s * c * apq;
                at(p, p) = new_pp;
                at(q, q) = new_qq;
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                for (int r = 0; r < dim; ++r) {
                    if (r != p && r != q) {
                        const double arp = at(r, p), arq = at(r, q);
                        at(r, p) = c * arp - s * arq;
                        at(p, r) = at(r, p);
                        at(r, q) = s * arp + c * arq;
                        at(q, r) = at(r, q);
                    }
                    const double vrp = v[r + static_cast<std::size_t>(dim) * p];
                    const double vrq = v[r + static_cast<std::size_t>(dim) * q];
                    v[r + static_cast<std::size_t>(dim) * p] = c * vrp - s * vrq;
                    v[r + static_cast<std::size_t>(dim) * q] = s * vrp + c * vrq;
                }
            }
        }
    }
    throw eigensolver_error("jacobi_eigen: no convergence within sweep cap");
}

} // namespace sphereineq::linalg
