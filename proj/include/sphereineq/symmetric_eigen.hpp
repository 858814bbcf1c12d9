#pragma once

#include <vector>

namespace sphereineq::linalg {

struct SymmetricEigen {
    int dim = 0;
    std::vector<double> eigenvalues;  // descending
    std::vector<double> eigenvectors; // column-major: vec j at [i + dim*j]
};

/// Cyclic Jacobi eigendecomposition of a dense symmetric matrix (row-major).
/// Throws eigensolver_error if the off-diagonal mass fails to vanish.
SymmetricEigen jacobi_eigen(std::vector<double> a, int dim, int max_sweeps = 64);

} // namespace sphereineq::linalg
