#include "svev/analytic.hpp"

#include <cmath>
#include <map>
#include <string>

#include "svev/confluent.hpp"
#include "svev/errors.hpp"
#include "svev/quadrature.hpp"

namespace svev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficients of the falling factorial x(x-1)...(x-m+1) in powers of x.
std::vector<double> falling_factorial_coeffs(int m) {
    std::vector<double> c{1.0};
    for (int i = 0; i < m; ++i) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t q = 0; q < c.size(); ++q) {
            next[q + 1] += c[q];
            next[q] -= i * c[q];
        }
        c = std::move(next);
    }
    return c;
}

// Coefficients e_k of prod_{j=1}^l (D - j) = sum_k e_k D^k.
std::vector<double> shifted_product_coeffs(int l) {
    std::vector<double> c{1.0};
    for (int j = 1; j <= l; ++j) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= j * c[k];
        }
        c = std::move(next);
    }
    return c;
}

void check_positive(std::span<const double> a) {
    for (double x : a)
        if (!(x > 0.0)) throw DomainError("squared singular values must be positive");
}

double trapezoid_nodes_for(int degree) { return 2.0 * degree + 4.0; }

}  // namespace

EnsembleSpec::EnsembleSpec(WeightFamily family, int n) : EnsembleSpec(family, n, family.strip()) {}

EnsembleSpec::EnsembleSpec(WeightFamily family, int n, MellinStrip strip)
    : family_(std::move(family)), n_(n), strip_(strip) {
    family_.validate();
    if (n_ < 1) throw ConfigError("matrix dimension must be at least 1");
    const MellinStrip own = family_.strip();
    if (strip_.s_min < own.s_min || strip_.s_max > own.s_max) {
        throw ConfigError("declared Mellin strip exceeds the convergence strip of " + family_.name());
    }
    if (!strip_.covers(1.0, double(n_))) {
        throw ConfigError("Mellin strip (" + std::to_string(strip_.s_min) + ", " + std::to_string(strip_.s_max) +
                          ") must contain [1, n] for n=" + std::to_string(n_));
    }
    extended_ = strip_.covers(1.0, double(n_) + 1.0);
    mellin_.assign(n_ + 2, std::numeric_limits<double>::quiet_NaN());
    for (int j = 1; j <= n_ + (extended_ ? 1 : 0); ++j) {
        const double m = mellin_weight(family_, cplx(j, 0.0)).real();
        if (!std::isfinite(m) || m == 0.0) throw DomainError("Mellin transform not finite at s=" + std::to_string(j));
        mellin_[j] = m;
    }
}

void EnsembleSpec::require_extended_strip(const char* what) const {
    if (!extended_) {
        throw ConfigError(std::string(what) + " needs a Mellin strip containing [1, n+1]");
    }
}

double EnsembleSpec::mellin_int(int j) const {
    if (j < 1 || j > n_ + 1 || std::isnan(mellin_[j])) {
        throw DomainError("Mellin value at s=" + std::to_string(j) + " not available for this ensemble");
    }
    return mellin_[j];
}

SpectralShift SpectralShift::of(int n) {
    SpectralShift s;
    for (int j = 1; j <= n; ++j) {
        s.rho.push_back((2.0 * j - n - 1.0) / 2.0);
        s.rho_prime.push_back((2.0 * j + n - 1.0) / 2.0);
    }
    return s;
}

double norm_const_ev(const EnsembleSpec& spec) {
    const int n = spec.n();
    double p = factorial(n) * std::pow(kPi, n);
    for (int j = 1; j <= n; ++j) p *= spec.mellin_int(j);
    return 1.0 / p;
}

double norm_const_sv(const EnsembleSpec& spec) {
    const int n = spec.n();
    double p = 1.0;
    for (int j = 1; j <= n; ++j) p *= factorial(j) * spec.mellin_int(j);
    return 1.0 / p;
}

double weight_derivative_taylor(const WeightFamily& w, int k, double a, int m) {
    if (m == 0) return weight_derivative(w, a, k);
    // a^m d^m/da^m = theta(theta-1)...(theta-m+1) with theta = a d/da = -D
    const auto s = falling_factorial_coeffs(m);
    const auto d = weight_derivatives(w, a, k + m);
    double v = 0.0;
    for (int q = 0; q <= m; ++q) v += s[q] * ((q % 2) ? -1.0 : 1.0) * d[k + q];
    return v / (factorial(m) * std::pow(a, m));
}

double derivative_det_ratio(const EnsembleSpec& spec, std::span<const double> a) {
    check_positive(a);
    const int n = spec.n();
    if (int(a.size()) != n) throw DomainError("expected " + std::to_string(n) + " points");
    // Work in y = ln a: the Taylor coefficients of (-a d)^c omega(e^y) are
    // (-1)^m (-a d)^{c+m} omega / m!, free of the cancellation that the
    // expansion in a suffers at small a.
    std::map<double, std::vector<double>> cache;
    auto taylor = [&](int c, double y0, int m) -> double {
        auto it = cache.find(y0);
        if (it == cache.end() || int(it->second.size()) < c + m + 1) {
            it = cache.insert_or_assign(y0, weight_derivatives(spec.family(), std::exp(y0), std::max(n - 1, c + m)))
                     .first;
        }
        return ((m % 2) ? -1.0 : 1.0) * it->second[c + m] / factorial(m);
    };
    std::vector<double> y(n);
    for (int b = 0; b < n; ++b) y[b] = std::log(a[b]);
    double v = confluent::det_over_vandermonde<double>(y, taylor, 1.0);
    // Delta(ln a) / Delta(a)
    for (int c = 0; c < n; ++c)
        for (int b = 0; b < c; ++b) {
            const double r = a[c] / a[b] - 1.0;
            if (r == 0.0) v /= a[b];
            else if (std::abs(r) < 0.5) v *= std::log1p(r) / (r * a[b]);
            else v *= (y[c] - y[b]) / (a[c] - a[b]);
        }
    return v;
}

double density_sv(const EnsembleSpec& spec, std::span<const double> a) {
    check_positive(a);
    const int n = spec.n();
    if (int(a.size()) != n) throw DomainError("expected " + std::to_string(n) + " points");
    Eigen::MatrixXd m(n, n);
    for (int k = 0; k < n; ++k) {
        const auto d = weight_derivatives(spec.family(), a[k], n - 1);
        for (int j = 0; j < n; ++j) m(j, k) = d[j];
    }
    return norm_const_sv(spec) * vandermonde(a) * m.determinant();
}

double density_ev(const EnsembleSpec& spec, std::span<const cplx> z) {
    const int n = spec.n();
    if (int(z.size()) != n) throw DomainError("expected " + std::to_string(n) + " points");
    double prod = 1.0;
    for (const cplx& zj : z) {
        const double r2 = std::norm(zj);
        if (r2 == 0.0) {
            // omega(0+) by continuity
            prod *= (spec.family().kind == WeightKind::Custom) ? 0.0 : (spec.family().nu == 0.0 ? 1.0 : 0.0);
            if (spec.family().nu < 0.0 && spec.family().kind != WeightKind::Custom)
                throw DomainError("weight diverges at z = 0");
            continue;
        }
        prod *= eval_weight(spec.family(), r2);
    }
    return norm_const_ev(spec) * std::norm(vandermonde(z)) * prod;
}

double density_matrix(const EnsembleSpec& spec, const ComplexMatrix& g) {
    const int n = spec.n();
    if (g.rows() != n || g.cols() != n) throw DomainError("matrix dimension does not match the ensemble");
    const auto a = squared_singular_values(g).real_values();
    double c = factorial(n) * norm_const_sv(spec);
    for (int j = 0; j < n; ++j) c *= factorial(j) * factorial(j) / std::pow(kPi, 2 * j + 1);
    return c * derivative_det_ratio(spec, a);
}

double density_matrix_trace_ratio(const EnsembleSpec& spec, const ComplexMatrix& g) {
    const int n = spec.n();
    if (g.rows() != n || g.cols() != n) throw DomainError("matrix dimension does not match the ensemble");
    const ComplexMatrix y = g.adjoint() * g;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(y);
    const auto& lam = es.eigenvalues();
    const ComplexMatrix& u = es.eigenvectors();
    std::vector<ComplexMatrix> powers(2 * n - 1);
    powers[0] = ComplexMatrix::Identity(n, n);
    for (int p = 1; p < 2 * n - 1; ++p) powers[p] = powers[p - 1] * y;
    std::vector<std::vector<double>> d(n);
    for (int k = 0; k < n; ++k) d[k] = weight_derivatives(spec.family(), lam(k), n - 1);
    Eigen::MatrixXcd num(n, n), den(n, n);
    for (int c = 0; c < n; ++c) {
        Eigen::VectorXcd diag(n);
        for (int k = 0; k < n; ++k) diag(k) = d[k][c];
        const ComplexMatrix wc = u * diag.asDiagonal() * u.adjoint();
        for (int b = 0; b < n; ++b) num(b, c) = (powers[b] * wc).trace();
    }
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) den(b, c) = powers[b + c].trace();
    double cst = factorial(n) * norm_const_sv(spec);
    for (int j = 0; j < n; ++j) cst *= factorial(j) * factorial(j) / std::pow(kPi, 2 * j + 1);
    return cst * (num.determinant() / den.determinant()).real();
}

cplx kernel_ev(const EnsembleSpec& spec, cplx z1, cplx z2, KernelForm form) {
    const int n = spec.n();
    const cplx w = z1 * std::conj(z2);
    cplx sum = 0.0, p = 1.0;
    for (int j = 0; j < n; ++j) {
        sum += p / (kPi * spec.mellin_int(j + 1));
        p *= w;
    }
    auto om = [&](cplx z) {
        const double r2 = std::norm(z);
        if (r2 == 0.0) return spec.family().kind != WeightKind::Custom && spec.family().nu == 0.0 ? 1.0 : 0.0;
        return eval_weight(spec.family(), r2);
    };
    if (form == KernelForm::asymmetric) return om(z1) * sum;
    const double w1 = om(z1), w2 = om(z2);
    if (w1 == 0.0 || w2 == 0.0) return 0.0;
    return std::sqrt(w1 * w2) * sum;
}

std::vector<double> poly_p_coefficients(const EnsembleSpec& spec, int l) {
    if (l < 0 || l > spec.n() - 1) throw DomainError("polynomial index outside [0, n-1]");
    std::vector<double> c(l + 1);
    const double ml = spec.mellin_int(l + 1);
    for (int j = 0; j <= l; ++j) {
        const double sign = ((l - j) % 2) ? -1.0 : 1.0;
        c[j] = sign * binomial(l, j) * ml / spec.mellin_int(j + 1);
    }
    return c;
}

double poly_p(const EnsembleSpec& spec, int l, double a) {
    const auto c = poly_p_coefficients(spec, l);
    double v = 0.0;
    for (int j = l; j >= 0; --j) v = v * a + c[j];
    return v;
}

std::vector<double> func_q_all(const EnsembleSpec& spec, int lmax, double a) {
    if (lmax < 0 || lmax > spec.n()) throw DomainError("function index outside [0, n]");
    if (lmax == spec.n()) spec.require_extended_strip("q_n");
    if (!(a > 0.0)) throw DomainError("q_l evaluated at a <= 0");
    const auto d = weight_derivatives(spec.family(), a, lmax);
    std::vector<double> out(lmax + 1);
    for (int l = 0; l <= lmax; ++l) {
        const auto e = shifted_product_coeffs(l);
        double v = 0.0;
        for (int k = 0; k <= l; ++k) v += e[k] * d[k];
        out[l] = v / (factorial(l) * spec.mellin_int(l + 1));
    }
    return out;
}

double func_q(const EnsembleSpec& spec, int l, double a) { return func_q_all(spec, l, a)[l]; }

EdgeAtoms func_q_edge_atoms(const EnsembleSpec& spec, int l) {
    EdgeAtoms atoms;
    const WeightFamily& w = spec.family();
    atoms.edge = w.support_upper();
    if (!std::isfinite(atoms.edge) || l == 0) return atoms;
    if (w.kind != WeightKind::Jacobi) throw CapabilityError("edge atoms only known for the Jacobi weight");
    // g = (-a)^l a^nu (1-a)^beta on (0,1); d^l/da^l of g*step(1-a) carries
    // -sum_m g^{(m)}(1-) delta^{(l-1-m)}(a-1).
    const double beta = w.mu - 1.0;
    const double norm = factorial(l) * spec.mellin_int(l + 1);
    atoms.coeff.assign(l, 0.0);
    for (int m = 0; m <= l - 1; ++m) {
        if (beta > m) continue;
        if (beta != std::floor(beta)) {
            throw CapabilityError("q_l has a non-integrable edge singularity for this mu");
        }
        const int b = int(beta);
        double falling = 1.0;  // d^{m-b}/da^{m-b} a^{l+nu} at a = 1
        for (int i = 0; i < m - b; ++i) falling *= (l + w.nu - i);
        double gm = ((l % 2) ? -1.0 : 1.0) * binomial(m, b) * falling * ((b % 2) ? -1.0 : 1.0) * factorial(b);
        atoms.coeff[l - 1 - m] = -gm / norm;
    }
    return atoms;
}

double edge_pairing(const EnsembleSpec& spec, int i, const EdgeAtoms& atoms) {
    if (atoms.coeff.empty()) return 0.0;
    auto c = poly_p_coefficients(spec, i);
    double total = 0.0;
    for (std::size_t r = 0; r < atoms.coeff.size(); ++r) {
        // r-th derivative of p_i at the edge
        double dv = 0.0;
        for (int j = int(r); j <= i; ++j) {
            double f = 1.0;
            for (int t = 0; t < int(r); ++t) f *= (j - t);
            dv += c[j] * f * std::pow(atoms.edge, j - int(r));
        }
        total += atoms.coeff[r] * ((r % 2) ? -1.0 : 1.0) * dv;
    }
    return total;
}

namespace {

double kernel_sv_direct(const EnsembleSpec& spec, double a, double b) {
    const int n = spec.n();
    const auto q = func_q_all(spec, n - 1, b);
    double v = 0.0;
    for (int j = 0; j < n; ++j)
        if (q[j] != 0.0) v += poly_p(spec, j, a) * q[j];  // q underflows before p overflows
    return v;
}

double kernel_sv_integral(const EnsembleSpec& spec, double a, double b) {
    spec.require_extended_strip("integral kernel representation");
    const int n = spec.n();
    const double pre = -n * spec.mellin_int(n + 1) / spec.mellin_int(n);
    const double top = std::min(1.0, spec.family().support_upper() / b);
    auto f = [&](double x) { return poly_p(spec, n - 1, x * a) * func_q(spec, n, x * b); };
    return pre * quad::tanh_sinh(f, 0.0, top, 1e-12);
}

// Plain derivatives d^r/dx^r [x^k omega(x)] at x for r = 0..rmax.
std::vector<double> monomial_weight_derivs(const WeightFamily& w, int k, double x, int rmax) {
    std::vector<double> plain(rmax + 1);
    for (int i = 0; i <= rmax; ++i) plain[i] = weight_derivative_taylor(w, 0, x, i) * factorial(i);
    std::vector<double> out(rmax + 1, 0.0);
    for (int r = 0; r <= rmax; ++r) {
        for (int i = 0; i <= r; ++i) {
            const int p = r - i;  // derivatives on x^k
            if (p > k) continue;
            double f = 1.0;
            for (int t = 0; t < p; ++t) f *= (k - t);
            out[r] += binomial(r, i) * f * std::pow(x, k - p) * plain[i];
        }
    }
    return out;
}

double kernel_sv_from_ev(const EnsembleSpec& spec, double a, double b) {
    spec.require_extended_strip("kernel from the eigenvalue kernel");
    const int n = spec.n();
    // Angular integral of K_ev(sqrt x, sqrt x e^{-i phi}) against (b - a e^{i phi})^{n-1}
    // leaves G(x) = sum_k g_k(x) b^{n-1-k} with
    // g_k(x) = 2 C(n-1,k) (-a)^k x^k omega(x) / M(k+1).
    // K = (1/(2 (n-1)!)) d^n/db^n int_0^b G(x; b) dx.
    double total = 0.0;
    for (int k = 0; k <= n - 1; ++k) {
        const int m = n - 1 - k;
        const double ck = 2.0 * binomial(n - 1, k) * std::pow(-a, k) / spec.mellin_int(k + 1);
        const auto gd = monomial_weight_derivs(spec.family(), k, b, n - 1);
        for (int i = 0; i <= m; ++i) {
            double f = 1.0;
            for (int t = 0; t < i; ++t) f *= (m - t);
            total += binomial(n, i) * f * std::pow(b, m - i) * ck * gd[n - i - 1];
        }
    }
    return total / (2.0 * factorial(n - 1));
}

}  // namespace

double kernel_sv(const EnsembleSpec& spec, double a, double b, KernelRep rep) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("kernel arguments must be positive");
    switch (rep) {
        case KernelRep::direct: return kernel_sv_direct(spec, a, b);
        case KernelRep::integral: return kernel_sv_integral(spec, a, b);
        case KernelRep::from_ev: return kernel_sv_from_ev(spec, a, b);
    }
    return 0.0;
}

double level_density_ev(const EnsembleSpec& spec, cplx z) { return kernel_ev(spec, z, z).real() / spec.n(); }

double level_density_sv(const EnsembleSpec& spec, double a) { return kernel_sv(spec, a, a) / spec.n(); }

double radial_density_sq(const EnsembleSpec& spec, double t) {
    if (t < 0.0) throw DomainError("squared radius must be nonnegative");
    const int n = spec.n();
    double sum = 0.0, p = 1.0;
    for (int j = 0; j < n; ++j) {
        sum += p / spec.mellin_int(j + 1);
        p *= t;
    }
    double w;
    if (t == 0.0) {
        w = (spec.family().kind != WeightKind::Custom && spec.family().nu == 0.0) ? 1.0 : 0.0;
    } else {
        w = eval_weight(spec.family(), t);
    }
    return w * sum / n;
}

double correlation_ev(const EnsembleSpec& spec, std::span<const cplx> points) {
    const int k = int(points.size());
    Eigen::MatrixXcd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = kernel_ev(spec, points[i], points[j]);
    return m.determinant().real();
}

double correlation_sv(const EnsembleSpec& spec, std::span<const double> points) {
    const int k = int(points.size());
    Eigen::MatrixXd m(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) m(i, j) = kernel_sv(spec, points[i], points[j]);
    return m.determinant();
}

cplx q_series(const EnsembleSpec& spec, cplx z, double r0, int j_min, int j_max) {
    if (!(r0 > 0.0)) throw DomainError("q-series radius must be positive");
    const cplx w = r0 * z;
    cplx sum = 0.0;
    for (int j = j_max; j >= j_min; --j) {
        const cplx inv = mellin_reciprocal(spec.family(), cplx(j + 1.0, 0.0));
        if (inv == 0.0) continue;
        sum += std::pow(w, j) * inv;
    }
    return sum;
}

std::pair<int, int> q_series_range(const EnsembleSpec& spec, double r0) {
    const double s_min = spec.family().strip().s_min;
    int j_min = std::isfinite(s_min) ? int(std::floor(s_min)) : -60;
    if (j_min + 1.0 <= s_min) ++j_min;
    while (j_min + 1.0 <= s_min) ++j_min;
    double peak = 0.0;
    int quiet = 0, j = j_min;
    for (; j < 5000; ++j) {
        const double t = std::abs(mellin_reciprocal(spec.family(), cplx(j + 1.0, 0.0))) * std::pow(r0, j);
        peak = std::max(peak, t);
        if (j > 0 && t < 1e-18 * peak) {
            if (++quiet >= 5) break;
        } else {
            quiet = 0;
        }
    }
    if (j >= 5000) throw NumericError("q-series does not converge for this radius");
    return {j_min, j};
}

cplx q_series_closed(const EnsembleSpec& spec, cplx z, double r0) {
    const WeightFamily& w = spec.family();
    if (w.nu != std::floor(w.nu)) throw CapabilityError("closed q-series needs integer nu");
    const cplx x = r0 * z;
    switch (w.kind) {
        case WeightKind::Laguerre:
            return std::exp(x) / std::pow(x, w.nu);
        case WeightKind::Jacobi:
            return w.mu / (std::pow(1.0 - x, w.mu + 1.0) * std::pow(x, w.nu));
        case WeightKind::CauchyLorentz:
            return (w.nu + w.mu) * std::pow(1.0 + x, w.mu + w.nu - 1.0) / std::pow(x, w.nu);
        default:
            throw CapabilityError("no closed q-series for " + w.name());
    }
}

double poly_p_via_series(const EnsembleSpec& spec, int l, double a, double r0) {
    if (l < 0 || l > spec.n() - 1) throw DomainError("polynomial index outside [0, n-1]");
    const auto [j_min, j_max] = q_series_range(spec, r0);
    int nodes = 64;
    while (nodes < 2 * (j_max - j_min + l + 2)) nodes *= 2;
    std::vector<cplx> coef(j_max - j_min + 1);
    for (int j = j_min; j <= j_max; ++j)
        coef[j - j_min] = mellin_reciprocal(spec.family(), cplx(j + 1.0, 0.0)) * std::pow(r0, j);
    cplx num = 0.0, den = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double phi = -kPi + 2.0 * kPi * k / nodes;
        const cplx e = std::polar(1.0, phi);
        // Q(e^{-i phi})
        cplx q = 0.0;
        const cplx em = std::conj(e);
        for (int j = j_max; j >= j_min; --j) q += coef[j - j_min] * std::pow(em, j);
        num += std::pow(a * e - r0, l) * q;
        den += std::pow(e, l) * q;
    }
    return (num / den).real();
}

double poly_p_from_kernel(const EnsembleSpec& spec, int l, double a) {
    if (l < 0 || l > spec.n() - 1) throw DomainError("polynomial index outside [0, n-1]");
    const int nodes = int(trapezoid_nodes_for(spec.n() + l));
    auto radial = [&](double r) {
        cplx s = 0.0;
        for (int k = 0; k < nodes; ++k) {
            const double phi = -kPi + 2.0 * kPi * k / nodes;
            const cplx e = std::polar(1.0, phi);
            const cplx kv = kernel_ev(spec, cplx(r, 0.0), r * e);
            if (kv != 0.0) s += std::pow(a * e - r * r, l) * kv;
        }
        return (s * (2.0 * kPi / nodes)).real() * r;
    };
    return quad::half_line(radial, std::sqrt(spec.family().support_upper()), 1e-12);
}

double func_q_from_kernel(const EnsembleSpec& spec, int l, double a) {
    if (l < 0 || l > spec.n()) throw DomainError("function index outside [0, n]");
    if (!(a > 0.0) || !(a < spec.family().support_upper())) throw DomainError("q_l from kernel needs a inside the support");
    const int nodes = int(trapezoid_nodes_for(spec.n() + l));
    auto angular = [&](double x) {
        const double r = std::sqrt(x);
        cplx s = 0.0;
        for (int k = 0; k < nodes; ++k) {
            const double phi = -kPi + 2.0 * kPi * k / nodes;
            const cplx e = std::polar(1.0, phi);
            s += std::pow(e, l) * kernel_ev(spec, cplx(r, 0.0), r * e);
        }
        return (s * (2.0 * kPi / nodes)).real();
    };
    if (l > spec.n() - 1) {
        throw CapabilityError("angular moment vanishes for l >= n; q_l from the kernel needs l < n");
    }
    double h0 = 0.2 * a;
    if (std::isfinite(spec.family().support_upper())) h0 = std::min(h0, 0.2 * (spec.family().support_upper() - a));
    h0 = h0 / std::max(1, l);
    const double d = quad::derivative(angular, a, l, h0);
    return ((l % 2) ? -1.0 : 1.0) * d / (2.0 * factorial(l));
}

}  // namespace svev
