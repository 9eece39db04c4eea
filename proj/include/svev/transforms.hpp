#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "svev/analytic.hpp"
#include "svev/estimate.hpp"
#include "svev/matlin.hpp"
#include "svev/rng.hpp"

namespace svev {

// zeta_l(eps s) = pi^{2l} cos(eps s) / prod_{k=1}^l (pi^2 - 4 eps^2 s^2/(2k-1)^2), per coordinate.
// epsilon = 0 asks for the limit eps -> 0 by extrapolation over a geometric sequence.
struct Regularizer {
    int l = 1;
    double epsilon = 0.0;
};

double zeta(int l, double x);

// Inverse transform of zeta_l(eps s) in the log variable: a kernel supported
// on |u| <= eps with unit mass (l = 1, 2 are tabulated in closed form).
double zeta_kernel(int l, double eps, double u);
double zeta_kernel_derivative(int l, double eps, double u);

// Extrapolation sequence used when Regularizer::epsilon == 0.
inline constexpr double kEpsilonStart = 0.2;
inline constexpr int kEpsilonLevels = 3;

using MellinEvaluator = std::function<cplx(cplx)>;

struct MellinInverseOptions {
    std::optional<Regularizer> reg;
    double tol = 1e-8;  // relative to the peak of the integrand
};

// f(x) = (1/2pi) int F(d + i t) x^{-d - i t} dt for F with F(conj s) = conj F(s).
// Without a regularizer the integrand must fall below 1e-16 of its peak;
// otherwise NumericError.
Estimate mellin_inverse(const MellinEvaluator& f, double d, double x, const MellinInverseOptions& opt = {});

// (det y)^{s_n + (n-1)/2} prod_{j<n} (j-th leading minor)^{s_j - s_{j+1} - 1}.
// y must be positive definite.
cplx power_function(const ComplexMatrix& y, std::span<const cplx> s);

// prod_{j<n} j! det[a_j^{s_k + (n-1)/2}] / (Delta(s) Delta(a)), confluent-safe.
cplx spherical_closed(std::span<const double> a, std::span<const cplx> s);

// Haar average of power_function(k* y k, s).
ComplexEstimate spherical_mc(const ComplexMatrix& y, std::span<const cplx> s, long samples, Rng& rng);

// A K-invariant density on positive matrices given through its eigenvalues.
using OmegaDensity = std::function<double(std::span<const double>)>;

// f_Omega(y) = n! prod_j j!/pi^j F_SV(lambda) / Delta(lambda)^2 for a derivative-type spec.
OmegaDensity omega_density(const EnsembleSpec& spec);

// prod_j a_j^{(n-2j+1)/2} int_T f(t* a t) dt over upper unitriangular t; n <= 3.
Estimate harish_transform(const OmegaDensity& f, std::span<const double> a);
// Closed form for derivative-type specs: prod omega(a_j) / (prod_j M omega(j) (det a)^{(n-1)/2}).
double harish_closed(const EnsembleSpec& spec, std::span<const double> a);

// int_A F_SV(a) phi(a, s) (det a)^{-n} da by nested quadrature; n <= 2.
cplx spherical_transform(const EnsembleSpec& spec, std::span<const cplx> s);
// prod_j M omega(s_j - (n-1)/2) / prod_j M omega(j).
cplx spherical_transform_closed(const EnsembleSpec& spec, std::span<const cplx> s);
// (1/n!) int_A H f(a) Perm[a_b^{s_c - 1}] da with H evaluated by quadrature; n <= 2.
cplx mellin_of_harish(const EnsembleSpec& spec, std::span<const cplx> s);

enum class SevMode { closed, numeric };

// Eigenvalue density from a derivative-type spec. Numeric mode evaluates the
// contour representation (n <= 2); closed mode is density_ev.
double sev_forward(const EnsembleSpec& spec, std::span<const cplx> z, SevMode mode);
// Squared singular value density recovered from the contour representation of
// the inverse map (n <= 2).
double sev_inverse(const EnsembleSpec& spec, std::span<const double> a);

using SvDensity = std::function<double(std::span<const double>)>;
using EvDensity = std::function<double(std::span<const cplx>)>;

// Forward map for an arbitrary symmetric density on A, n <= 2. Without a
// regularizer the s-integrals are carried out in the eps -> 0 limit, leaving a
// one-dimensional integral; with one, the smoothed value is extrapolated.
Estimate sev_forward(const SvDensity& f_sv, int n, std::span<const cplx> z, std::optional<Regularizer> reg = {});
// Inverse map for an arbitrary eigenvalue density, n <= 2, zeta_n regularized.
// For n = 2 the points a_1, a_2 must differ by more than 2 eps in log scale.
Estimate sev_inverse(const EvDensity& f_ev, int n, std::span<const double> a, std::optional<Regularizer> reg = {});

// int |Delta(sqrt(a) Phi)|^2 d*Phi by the product trapezoid rule.
double phase_average_vandermonde(std::span<const double> a, int nodes = 0);

}  // namespace svev
