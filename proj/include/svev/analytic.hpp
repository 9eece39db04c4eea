#pragma once

#include <span>
#include <vector>

#include "svev/matlin.hpp"
#include "svev/weights.hpp"

namespace svev {

// A weight paired with a matrix dimension. Mellin values at the integers
// 1..n+1 are cached on construction.
class EnsembleSpec {
public:
    // Uses the family's own strip; for custom weights the declared strip.
    EnsembleSpec(WeightFamily family, int n);
    EnsembleSpec(WeightFamily family, int n, MellinStrip strip);

    const WeightFamily& family() const noexcept { return family_; }
    int n() const noexcept { return n_; }
    const MellinStrip& strip() const noexcept { return strip_; }

    // True if the strip contains [1, n+1], needed by q_n and the kernel
    // representations that use it.
    bool has_extended_strip() const noexcept { return extended_; }
    void require_extended_strip(const char* what) const;

    // M omega(j) for j = 1..n (and n+1 when the strip allows).
    double mellin_int(int j) const;

    double weight(double a) const { return eval_weight(family_, a); }

private:
    WeightFamily family_;
    int n_;
    MellinStrip strip_;
    bool extended_ = false;
    std::vector<double> mellin_;  // index j
};

struct SpectralShift {
    std::vector<double> rho;        // (2j - n - 1)/2
    std::vector<double> rho_prime;  // (2j + n - 1)/2

    static SpectralShift of(int n);
};

enum class Space { ev, sv };
enum class KernelForm { symmetric, asymmetric };
enum class KernelRep { direct, integral, from_ev };

double norm_const_ev(const EnsembleSpec& spec);
double norm_const_sv(const EnsembleSpec& spec);

// C_sv Delta(a) det[(-a_k d)^{j-1} omega(a_k)]; the sign is kept.
double density_sv(const EnsembleSpec& spec, std::span<const double> a);
// det[(-a_k d)^{j-1} omega(a_k)] / Delta(a), finite at coincident a.
double derivative_det_ratio(const EnsembleSpec& spec, std::span<const double> a);
double density_ev(const EnsembleSpec& spec, std::span<const cplx> z);

// Matrix density from the squared singular values of g.
double density_matrix(const EnsembleSpec& spec, const ComplexMatrix& g);
// Same density from trace determinants of g*g (undefined at degenerate spectra).
double density_matrix_trace_ratio(const EnsembleSpec& spec, const ComplexMatrix& g);

cplx kernel_ev(const EnsembleSpec& spec, cplx z1, cplx z2, KernelForm form = KernelForm::symmetric);

std::vector<double> poly_p_coefficients(const EnsembleSpec& spec, int l);
double poly_p(const EnsembleSpec& spec, int l, double a);
// q_l(a) = (1/(l! M(l+1))) d^l/da^l [(-a)^l omega(a)]
double func_q(const EnsembleSpec& spec, int l, double a);
// q_0(a)..q_lmax(a) sharing one derivative evaluation.
std::vector<double> func_q_all(const EnsembleSpec& spec, int lmax, double a);

// Point masses of q_l at the upper edge of a compact support: q_l equals its
// pointwise values plus sum_r coeff[r] * delta^{(r)}(a - edge).
struct EdgeAtoms {
    double edge = 0.0;
    std::vector<double> coeff;
};
EdgeAtoms func_q_edge_atoms(const EnsembleSpec& spec, int l);
// int p_i q_j including edge atoms of q_j.
double edge_pairing(const EnsembleSpec& spec, int i, const EdgeAtoms& atoms);

double kernel_sv(const EnsembleSpec& spec, double a, double b, KernelRep rep = KernelRep::direct);

double level_density_ev(const EnsembleSpec& spec, cplx z);
double level_density_sv(const EnsembleSpec& spec, double a);
// density of |z|^2 for one eigenvalue drawn uniformly from the spectrum
double radial_density_sq(const EnsembleSpec& spec, double t);

double correlation_ev(const EnsembleSpec& spec, std::span<const cplx> points);
double correlation_sv(const EnsembleSpec& spec, std::span<const double> points);

// sum_{j=jmin}^{jmax} (r0 z)^j / M omega(j+1), with 1/M = 0 off the strip.
cplx q_series(const EnsembleSpec& spec, cplx z, double r0, int j_min, int j_max);
// Summation range whose omitted tail is below 1e-18 of the largest term.
std::pair<int, int> q_series_range(const EnsembleSpec& spec, double r0);
// Closed form for Laguerre/Jacobi/Cauchy-Lorentz with integer nu.
cplx q_series_closed(const EnsembleSpec& spec, cplx z, double r0);

double poly_p_via_series(const EnsembleSpec& spec, int l, double a, double r0 = 1.0);
double poly_p_from_kernel(const EnsembleSpec& spec, int l, double a);
double func_q_from_kernel(const EnsembleSpec& spec, int l, double a);

// Taylor coefficient d^m/da^m [(-a d)^k omega](a) / m!, from exact expansions.
double weight_derivative_taylor(const WeightFamily& w, int k, double a, int m);

}  // namespace svev
