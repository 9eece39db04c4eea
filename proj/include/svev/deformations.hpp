#pragma once

#include <functional>
#include <span>
#include <string>

#include "svev/analytic.hpp"
#include "svev/estimate.hpp"
#include "svev/matlin.hpp"
#include "svev/rng.hpp"

namespace svev {

enum class DeformKind { exp_trace, det_power };

// Multiplies the matrix density by exp(Re(alpha tr g)) or |det(alpha - g)|^gamma.
struct Deformation {
    DeformKind kind = DeformKind::exp_trace;
    cplx alpha = 0.0;
    int gamma = 0;

    static Deformation exp_trace(cplx alpha);
    static Deformation det_power(cplx alpha, int gamma);

    bool is_identity() const noexcept;
    // per-eigenvalue factor h(z)
    double factor(cplx z) const;
    // D(g) for a full matrix
    double matrix_factor(const ComplexMatrix& g) const;
    std::string describe() const;
};

DeformKind deform_kind_from_name(const std::string& name);

// ConfigError unless the deformed density is integrable for this weight.
void check_admissible(const EnsembleSpec& spec, const Deformation& d);

// The Bessel entries of the Leutwyler-Smilga determinant are read with
// argument 2 beta sqrt(a), beta = kLsArgumentScale |alpha|. The value is fixed
// by the n = 1 phase integral, which equals I_0(|alpha| sqrt(a)).
inline constexpr double kLsArgumentScale = 0.5;

// int_K exp(Re tr(alpha sqrt(a) k)) d*k, as prod j! det[f_c(a_b)] / Delta(a)
// with f_c(a) = sum_k beta^{2k} a^{k+c-1} / (k! (k+c-1)!). Confluent-safe.
double ls_integral(cplx alpha, std::span<const double> a);
// Same through boost's I_nu: prod j! det[(beta sqrt a_b)^{c-1} I_{c-1}(2 beta sqrt a_b)] / (beta^{n(n-1)} Delta(a)).
// Distinct arguments only.
double ls_integral_bessel(cplx alpha, std::span<const double> a);
// (1/2pi) int exp(Re(alpha sqrt(a) e^{i phi})) d phi by adaptive quadrature.
double ls_phase_quadrature(cplx alpha, double a);

// int_K |det(alpha - sqrt(a) k)|^gamma d*k. Even gamma: finite hypergeometric
// determinant (any n). Odd gamma: quadrature, n <= 2.
double group_integral_J(cplx alpha, int gamma, std::span<const double> a);

using MatrixFunction = std::function<double(const ComplexMatrix&)>;

// Monte Carlo of int_K D(diag(sqrt a) k) d*k with Haar k.
Estimate unitary_average_mc(const MatrixFunction& d, std::span<const double> a, long samples, Rng& rng);
// Tensor quadrature over U(n) for n <= 2 (Euler angles); for smooth D.
double unitary_average_quadrature(const MatrixFunction& d, std::span<const double> a, int nodes = 16);

// E[prod h(z_j)] under the undeformed eigenvalue law, via the Andreief
// identity: C_ev n! det[int z^i conj(z)^j omega(|z|^2) h(z) d^2z].
struct Normalization {
    double value = 1.0;
    double error = 0.0;
    std::string method;
};
Normalization deformation_normalization(const EnsembleSpec& spec, const Deformation& d);

double deformed_density_ev(const EnsembleSpec& spec, const Deformation& d, std::span<const cplx> z);
double deformed_density_sv(const EnsembleSpec& spec, const Deformation& d, std::span<const double> a);
// Density of |z|^2 for an eigenvalue picked uniformly from the deformed spectrum.
double deformed_radial_density_sq(const EnsembleSpec& spec, const Deformation& d, double t);

}  // namespace svev
