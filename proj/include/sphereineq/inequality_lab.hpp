#pragma once

#include "sphereineq/sphere_basis.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sphereineq::lab {

enum class Flavor { Scalar, VectorDivFree };

std::string to_string(Flavor flavor);

/// An H1(m)-orthonormal system of zero-mean fields.  Scalar members hold
/// coefficients in the Y basis; vector members hold stream coefficients,
/// realized through the divergence-free eigenfunctions w_n^k.
struct Family {
    double m = 1.0;
    Flavor flavor = Flavor::Scalar;
    std::vector<sphere::SpectralCoeffs> members;

    int max_degree() const;
    /// max_{i,j} |m^2 (f_i, f_j) + (grad f_i, grad f_j) - delta_ij|
    double gram_residual() const;
};

/// ((p-1)/(4 pi))^((p-1)/p); the limit value 1 at p = 1.
double b_p(double p);

/// Picks L2-orthonormal zero-mean combinations of the first `size`
/// non-constant harmonics (rows of a seeded random orthogonal matrix;
/// seed 0 gives the identity mixing) and rescales each coefficient by
/// 1/sqrt(m^2 + Lambda_n), so the Gram condition holds by construction.
Family build_family(double m, int size, Flavor flavor, std::uint64_t mixing_seed,
                    int max_degree);

struct DensityField {
    std::vector<double> values; // rho at the rule's nodes, >= 0
    int n_members = 0;
    bool degree_sufficient = true;
};

/// rho(x) = sum_j |f_j(x)|^2 at the rule's nodes.
DensityField density(const Family& fam, const sphere::QuadratureRule& rule);

struct RatioResult {
    double value = 0.0;
    double quad_error = 0.0; // residual against a 2x finer rule
};

/// ||rho||_{L^p} / (b_p(p) m^(-2/p) n^(1/p)); at most 1 for every family
/// satisfying the Gram condition.
RatioResult theorem1_ratio(const Family& fam, double p,
                           const sphere::QuadratureRule& rule);

/// ||f||_{L^q} / ((1/4pi)^((q-2)/(2q)) (q/2)^(1/2) ||f||^(2/q) ||grad f||^(1-2/q))
/// with spectral norms on the right; at most 1 for zero-mean fields.
RatioResult gn_ratio(const sphere::SpectralCoeffs& coeffs, double q,
                     const sphere::QuadratureRule& rule);

/// Galerkin matrix of K = Pi (m^2 - Delta)^(-1/2) V (m^2 - Delta)^(-1/2) Pi
/// over the zero-mean harmonics of degree <= max_degree.
struct GalerkinOperator {
    int dim = 0;
    std::vector<double> entries;  // row-major symmetric
    std::vector<double> spectrum; // descending
};

GalerkinOperator build_k_operator(double m, const sphere::SpectralCoeffs& V,
                                  int max_degree,
                                  const sphere::QuadratureRule& rule);

struct TracePair {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// lhs = Tr K^r, rhs = Tr(V^r (m^2 - Delta)^(-r) Pi) at finite rank, with
/// r = p/(p-1) (pass p = inf for the r = 1 case); contract lhs <= rhs.
TracePair alt_trace_check(double m, double p, const sphere::SpectralCoeffs& V,
                          int max_degree, const sphere::QuadratureRule& rule);

/// lhs = integral of rho V, rhs = sum of the n largest eigenvalues of K;
/// contract lhs <= rhs by the variational principle.
TracePair variational_step_check(const Family& fam,
                                 const sphere::SpectralCoeffs& V,
                                 const sphere::QuadratureRule& rule,
                                 int max_degree);

struct ConstantsTable {
    double q = 2.0;
    double gn_sphere = 0.0;          // (1/4pi)^((q-2)/(2q)) (q/2)^(1/2)
    double beckner_route = 0.0;      // (1/4pi)^((q-2)/(2q)) ((q-1)/2)^(1/2)
    double zero_mean_gn_route = 0.0; // gn_sphere * 2^(-1/q)
    double plane = 0.0;              // best closed-form plane constant
    double conjectured_asymptote = 0.0; // sqrt(q/(8 pi))
    double ladyzhenskaya_q4 = 0.0;   // 1/pi (fourth-power form, q = 4)
    bool comparison_holds = false;   // 2^(-2/q) <= 1 - 1/q
};

ConstantsTable compare_constants(double q);

/// Deterministic generator: the layout of draws is fixed, so identical seeds
/// reproduce identical families and fields on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double symmetric() { return 2.0 * uniform() - 1.0; }

  private:
    std::mt19937_64 gen_;
};

/// Random band-limited field with no constant component.
sphere::SpectralCoeffs random_zero_mean_field(Rng& rng, int max_degree);

/// (band-limited field)^2 + 1e-6, projected exactly onto degree 2*half_degree.
sphere::SpectralCoeffs random_nonneg_potential(Rng& rng, int half_degree);

/// Rule degree used by the harness for L^q work at a given band limit:
/// 2 * max_degree * ceil(q/2), oversampled by 2.
int harness_rule_degree(int max_degree, double q);

std::string serialize(const Family& fam);
Family parse_family(const std::string& text);

} // namespace sphereineq::lab
