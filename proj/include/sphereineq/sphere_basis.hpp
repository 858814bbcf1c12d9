#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace sphereineq::sphere {

/// Hard cap on harmonic degree; the recurrences are validated up to here.
constexpr int kDegreeCap = 256;

struct SpherePoint {
    double theta; // colatitude in [0, pi]
    double phi;   // longitude in [0, 2 pi)
};

/// Degree n >= 0 and order slot k in 1..2n+1.  The slot encodes the azimuthal
/// order m' = k - n - 1 in -n..n: negative m' are sine harmonics, m' = 0 the
/// zonal one, positive m' cosine harmonics.
struct HarmonicIndex {
    int n;
    int k;
};

inline double eigenvalue(int n) { return static_cast<double>(n) * (n + 1); }

inline int flat_index(HarmonicIndex idx) { return idx.n * idx.n + idx.k - 1; }
inline int basis_dimension(int max_degree) {
    return (max_degree + 1) * (max_degree + 1);
}
HarmonicIndex index_from_flat(int flat);

struct TangentVector {
    double v_theta = 0.0;
    double v_phi = 0.0;
    double norm_sq() const { return v_theta * v_theta + v_phi * v_phi; }
};

/// Real coefficients over the orthonormal basis Y_n^k, stored densely.
class SpectralCoeffs {
  public:
    explicit SpectralCoeffs(int max_degree);

    int max_degree() const { return max_degree_; }
    int dim() const { return static_cast<int>(c_.size()); }

    double get(HarmonicIndex idx) const;
    void set(HarmonicIndex idx, double value);

    const std::vector<double>& flat() const { return c_; }
    std::vector<double>& flat() { return c_; }

    double norm_sq() const;      // sum c^2            (L^2 norm squared)
    double grad_norm_sq() const; // sum Lambda_n c^2   (gradient norm squared)
    bool zero_mean() const { return c_.empty() || c_[0] == 0.0; }

  private:
    int max_degree_;
    std::vector<double> c_;
};

/// m^2 (a, b) + (grad a, grad b), computed spectrally.
double h1m_inner(const SpectralCoeffs& a, const SpectralCoeffs& b, double m);

/// Tensor quadrature rule: Gauss nodes in cos(theta), uniform longitudes.
/// Exact for spherical polynomials up to exact_degree; weights sum to 4 pi.
struct QuadratureRule {
    std::vector<SpherePoint> nodes;
    std::vector<double> weights;
    int exact_degree = 0;
};

QuadratureRule build_rule(int exact_degree);

/// Orthonormal-scaled associated Legendre value: the colatitude factor of
/// Y_n^k, normalized so that the resulting harmonics are orthonormal w.r.t.
/// the surface measure (total mass 4 pi).
double assoc_legendre(int n, int k_abs, double x);

double sph_harmonic(HarmonicIndex idx, SpherePoint s);

/// (d_theta Y, (1/sin theta) d_phi Y) in the local orthonormal frame.
TangentVector sph_harmonic_gradient(HarmonicIndex idx, SpherePoint s);

/// Divergence-free vector eigenfunction w_n^k = (n(n+1))^(-1/2) rot Y_n^k,
/// where rot is the pi/2 clockwise rotation of the gradient.
TangentVector vector_eigenfunction(HarmonicIndex idx, SpherePoint s);

/// Row-major [node][flat harmonic] table of Y values for n <= max_degree.
std::vector<double> basis_matrix(int max_degree, const QuadratureRule& rule);

/// Memoized variant shared across synthesis/projection/Gram assembly; the
/// returned table is immutable and safe to hold across further calls.
std::shared_ptr<const std::vector<double>> basis_matrix_cached(
    int max_degree, const QuadratureRule& rule);

/// Per-node components of the w_n^k family (the n = 0 slot stays zero).
struct VectorBasis {
    std::vector<double> theta; // row-major [node][flat harmonic]
    std::vector<double> phi;
    int dim = 0;
};

VectorBasis vector_basis_matrix(int max_degree, const QuadratureRule& rule);

std::shared_ptr<const VectorBasis> vector_basis_matrix_cached(
    int max_degree, const QuadratureRule& rule);

struct Synthesis {
    std::vector<double> values; // field values at the rule's nodes
    bool degree_sufficient;     // rule.exact_degree >= 2 * max coefficient degree
};

Synthesis synthesize(const SpectralCoeffs& coeffs, const QuadratureRule& rule);

/// (sum_i w_i |v_i|^p)^(1/p) against the surface measure.
double lp_norm(const std::vector<double>& values, double p_exp,
               const QuadratureRule& rule);

/// Quadrature projection of nodal values onto the basis up to max_degree;
/// exact when the values sample a polynomial the rule resolves.
SpectralCoeffs project(const std::vector<double>& values,
                       const QuadratureRule& rule, int max_degree);

/// Text format: one "n k value" line per nonzero coefficient.
std::string serialize(const SpectralCoeffs& coeffs);
SpectralCoeffs parse_coeffs(const std::string& text);

} // namespace sphereineq::sphere
