#include "svev/transforms.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "svev/confluent.hpp"
#include "svev/errors.hpp"
#include "svev/quadrature.hpp"

namespace svev {

namespace {

const quad::Rule& gl_rule(int n) {
    static const quad::Rule r10 = quad::gauss_legendre(10);
    static const quad::Rule r16 = quad::gauss_legendre(16);
    static const quad::Rule r24 = quad::gauss_legendre(24);
    static const quad::Rule r32 = quad::gauss_legendre(32);
    switch (n) {
        case 10: return r10;
        case 16: return r16;
        case 24: return r24;
        case 32: return r32;
    }
    throw CapabilityError("no cached Gauss-Legendre rule with " + std::to_string(n) + " nodes");
}

template <class G>
auto gl_panel(const G& g, double a, double b, int n = 16) {
    const auto& r = gl_rule(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    decltype(g(a)) s{};
    for (int i = 0; i < n; ++i) s += r.weights[i] * g(mid + half * r.nodes[i]);
    return s * half;
}

double richardson_sq(std::vector<double> v, double* err) {
    // v[k] computed at eps_0 / 2^k; error expansion in even powers of eps.
    const int m = int(v.size());
    std::vector<double> prev_diag;
    double best = v.back(), last = v.back();
    std::vector<std::vector<double>> t(m);
    for (int k = 0; k < m; ++k) {
        t[k].push_back(v[k]);
        for (int j = 1; j <= k; ++j) {
            const double f = std::pow(4.0, j);
            t[k].push_back((f * t[k][j - 1] - t[k - 1][j - 1]) / (f - 1.0));
        }
    }
    best = t[m - 1][m - 1];
    last = (m >= 2) ? t[m - 2][m - 2] : v[0];
    if (err) *err = (m >= 2) ? std::abs(best - last) : std::abs(v[0]);
    return best;
}

std::vector<double> epsilon_sequence(const Regularizer& r, double start, int levels) {
    if (r.epsilon > 0.0) return {r.epsilon};
    std::vector<double> e;
    for (int k = 0; k < levels; ++k) e.push_back(start / std::pow(2.0, k));
    return e;
}

// pi^{2l} / prod |pi^2 - 4x^2/(2k-1)^2|, bound for |zeta_l(x)| past its last zero
double zeta_envelope(int l, double x) {
    if (std::abs(x) <= l * kPi) return 1.0;
    double d = 1.0;
    for (int k = 1; k <= l; ++k) {
        const double m = 2.0 * k - 1.0;
        d *= std::abs(kPi * kPi - 4.0 * x * x / (m * m)) / (kPi * kPi);
    }
    return 1.0 / d;
}

double base_bump(double w) {
    return (std::abs(w) < 1.0) ? std::cos(kPi * w / 2.0) / (4.0 * kPi) : 0.0;
}
double base_bump_d(double w) {
    return (std::abs(w) < 1.0) ? -std::sin(kPi * w / 2.0) / 8.0 : 0.0;
}

}  // namespace

double zeta(int l, double x) {
    if (l < 1) throw ConfigError("regularizer order must be positive");
    double v = std::pow(kPi, 2 * l);
    bool cos_used = false;
    for (int k = 1; k <= l; ++k) {
        const double m = 2.0 * k - 1.0;
        const double x0 = m * kPi / 2.0;
        const double delta = x0 - std::abs(x);
        if (!cos_used && std::abs(delta) < 0.1) {
            // cos x / (pi^2 - 4x^2/m^2) = m^2 sin(x0) (sin d / d) / (4 (x0 + |x|))
            const double sinc = (delta == 0.0) ? 1.0 : std::sin(delta) / delta;
            v *= m * m * std::sin(x0) * sinc / (4.0 * (x0 + std::abs(x)));
            cos_used = true;
        } else {
            v /= (kPi * kPi - 4.0 * x * x / (m * m));
        }
    }
    if (!cos_used) v *= std::cos(x);
    return v;
}

double zeta_kernel(int l, double eps, double u) {
    const double v = u / eps;
    switch (l) {
        case 1:
            return (std::abs(v) < 1.0) ? kPi / 4.0 * std::cos(kPi * v / 2.0) / eps : 0.0;
        case 2: {
            const double main = (std::abs(v) < 1.0) ? 9.0 / 8.0 * kPi / 4.0 * std::cos(kPi * v / 2.0) : 0.0;
            const double side = 3.0 * kPi * kPi / 8.0 *
                                (base_bump(3.0 * v + 2.0) + base_bump(3.0 * v - 2.0) - base_bump(3.0 * v));
            return (main - side) / eps;
        }
    }
    throw CapabilityError("smoothing kernel tabulated for l <= 2");
}

double zeta_kernel_derivative(int l, double eps, double u) {
    const double v = u / eps;
    switch (l) {
        case 1:
            return (std::abs(v) < 1.0) ? -kPi * kPi / 8.0 * std::sin(kPi * v / 2.0) / (eps * eps) : 0.0;
        case 2: {
            const double main =
                (std::abs(v) < 1.0) ? -9.0 / 8.0 * kPi * kPi / 8.0 * std::sin(kPi * v / 2.0) : 0.0;
            const double side = 3.0 * kPi * kPi / 8.0 * 3.0 *
                                (base_bump_d(3.0 * v + 2.0) + base_bump_d(3.0 * v - 2.0) - base_bump_d(3.0 * v));
            return (main - side) / (eps * eps);
        }
    }
    throw CapabilityError("smoothing kernel tabulated for l <= 2");
}

Estimate mellin_inverse(const MellinEvaluator& f, double d, double x, const MellinInverseOptions& opt) {
    if (!(x > 0.0)) throw DomainError("Mellin inversion needs x > 0");
    const double lx = std::log(x);
    const double pre = std::exp(-d * lx) / kPi;
    auto mag = [&](double t) { return std::abs(f(cplx(d, t))); };
    double peak = mag(0.0);
    double fast_T = -1.0;
    for (double t = 0.5; t <= 16384.0; t *= 2.0) {
        const double m = mag(t);
        peak = std::max(peak, m);
        if (t >= 8.0 && m < 1e-16 * peak && mag(1.5 * t) < 1e-16 * peak) {
            fast_T = 1.5 * t;
            break;
        }
    }
    if (!(peak > 0.0) || !std::isfinite(peak)) throw NumericError("Mellin integrand has no finite peak");

    auto line = [&](double t, double eps, int l) {
        const cplx s(d, t);
        const double z = (eps > 0.0) ? zeta(l, eps * t) : 1.0;
        if (z == 0.0) return 0.0;
        return z * (f(s) * std::exp(cplx(0.0, -t * lx))).real();
    };
    auto integrate = [&](double T, double eps, int l) {
        double sum = 0.0, t = 0.0;
        while (t < T) {
            const double freq = std::abs(lx) + std::log(2.0 + t) + eps + 1.0;
            const double b = std::min(T, t + std::min(4.0, 12.0 / freq));
            sum += gl_panel([&](double u) { return line(u, eps, l); }, t, b);
            t = b;
        }
        return pre * sum;
    };

    if (fast_T > 0.0) return {integrate(fast_T, 0.0, 1), 1e-15 * peak * pre * fast_T};
    if (!opt.reg) {
        throw NumericError("Mellin integrand does not decay along the line; a regularizer is required");
    }
    const Regularizer reg = *opt.reg;
    const double tol_abs = opt.tol * peak;
    std::vector<double> values;
    double err = 0.0, value = 0.0;
    const int max_levels = reg.epsilon > 0.0 ? 1 : kEpsilonLevels + 2;
    for (int k = 0; k < max_levels; ++k) {
        const double eps = reg.epsilon > 0.0 ? reg.epsilon : kEpsilonStart / std::pow(2.0, k);
        auto env = [&](double t) { return mag(t) * zeta_envelope(reg.l, eps * t); };
        double T = std::max(16.0, 2.0 * reg.l * kPi / eps);
        for (;;) {
            const double e1 = env(T), e2 = env(2.0 * T);
            const double p = (e2 > 0.0) ? std::log2(e1 / e2) : 60.0;
            const double tail = (p > 1.05) ? e1 * T / (p - 1.0) : std::numeric_limits<double>::infinity();
            if (tail < tol_abs) break;
            // jump straight to the power-law prediction when the decay looks clean
            T *= (p > 1.05 && std::isfinite(tail)) ? std::clamp(1.1 * std::pow(tail / tol_abs, 1.0 / (p - 1.0)), 1.2, 8.0)
                                                  : 2.0;
            if (T > 1e6) throw NumericError("regularized Mellin integrand decays too slowly");
        }
        values.push_back(integrate(T, eps, reg.l));
        if (reg.epsilon > 0.0) return {values.back(), tol_abs * pre};
        if (int(values.size()) >= kEpsilonLevels) {
            value = richardson_sq(values, &err);
            if (err < 10.0 * tol_abs * pre) break;
        }
    }
    return {value, err};
}

cplx power_function(const ComplexMatrix& y, std::span<const cplx> s) {
    const int n = int(y.rows());
    if (y.cols() != n || int(s.size()) != n) throw DomainError("power function dimension mismatch");
    Eigen::LLT<ComplexMatrix> llt(y);
    if (llt.info() != Eigen::Success) throw DomainError("power function needs a positive definite matrix");
    const ComplexMatrix& l = llt.matrixLLT();
    std::vector<double> log_minor(n);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        acc += 2.0 * std::log(l(j, j).real());
        log_minor[j] = acc;
    }
    cplx e = (s[n - 1] + (n - 1) / 2.0) * log_minor[n - 1];
    for (int j = 0; j + 1 < n; ++j) e += (s[j] - s[j + 1] - 1.0) * log_minor[j];
    return std::exp(e);
}

cplx spherical_closed(std::span<const double> a, std::span<const cplx> s) {
    const int n = int(a.size());
    if (int(s.size()) != n) throw DomainError("spherical function dimension mismatch");
    for (double v : a)
        if (!(v > 0.0)) throw DomainError("spherical function needs positive arguments");
    std::vector<cplx> x(n), t(n);
    for (int j = 0; j < n; ++j) {
        x[j] = std::log(a[j]);
        t[j] = s[j] + (n - 1) / 2.0;
    }
    auto taylor = [](cplx x0, cplx t0, int m, int r) {
        cplx sum = 0.0;
        for (int i = 0; i <= std::min(m, r); ++i) {
            sum += std::pow(t0, m - i) / factorial(m - i) * std::pow(x0, r - i) / factorial(r - i) / factorial(i);
        }
        return std::exp(x0 * t0) * sum;
    };
    cplx v = confluent::det_over_two_vandermonde<cplx>(x, t, taylor);
    for (int c = 0; c < n; ++c)
        for (int b = 0; b < c; ++b) {
            const double r = a[c] / a[b] - 1.0;
            if (r == 0.0) v /= a[b];
            else if (std::abs(r) < 0.5) v *= std::log1p(r) / (r * a[b]);
            else v *= (x[c] - x[b]) / (a[c] - a[b]);
        }
    return v * superfactorial(n);
}

ComplexEstimate spherical_mc(const ComplexMatrix& y, std::span<const cplx> s, long samples, Rng& rng) {
    if (samples < 2) throw ConfigError("spherical Monte Carlo needs at least two samples");
    const int n = int(y.rows());
    double m_re = 0.0, m_im = 0.0, q_re = 0.0, q_im = 0.0;
    for (long i = 0; i < samples; ++i) {
        const ComplexMatrix k = sample_haar_unitary(n, rng);
        const ComplexMatrix yk = k.adjoint() * y * k;
        const cplx v = power_function(0.5 * (yk + yk.adjoint()), s);
        // Welford
        const double dr = v.real() - m_re, di = v.imag() - m_im;
        m_re += dr / (i + 1);
        m_im += di / (i + 1);
        q_re += dr * (v.real() - m_re);
        q_im += di * (v.imag() - m_im);
    }
    const double ns = double(samples);
    return {cplx(m_re, m_im), std::sqrt(q_re / (ns - 1.0) / ns), std::sqrt(q_im / (ns - 1.0) / ns)};
}

OmegaDensity omega_density(const EnsembleSpec& spec) {
    const int n = spec.n();
    double c = factorial(n) * norm_const_sv(spec);
    for (int j = 0; j < n; ++j) c *= factorial(j) / std::pow(kPi, j);
    return [spec, c](std::span<const double> lambda) { return c * derivative_det_ratio(spec, lambda); };
}

double harish_closed(const EnsembleSpec& spec, std::span<const double> a) {
    const int n = spec.n();
    double v = 1.0, det = 1.0;
    for (int j = 0; j < n; ++j) {
        v *= spec.weight(a[j]) / spec.mellin_int(j + 1);
        det *= a[j];
    }
    return v / std::pow(det, (n - 1) / 2.0);
}

namespace {

// eigenvalues of [[p, q], [q, r]] with determinant d1 d2, without cancellation
std::array<double, 2> eig2(double p, double q, double r, double d1, double d2) {
    const double big = 0.5 * (p + r) + std::hypot(0.5 * (p - r), q);
    return {d1 * (d2 / big), big};
}

}  // namespace

Estimate harish_transform(const OmegaDensity& f, std::span<const double> a) {
    const int n = int(a.size());
    for (double v : a)
        if (!(v > 0.0)) throw DomainError("Harish transform needs positive arguments");
    if (n == 1) return {f(a), 0.0};
    if (n == 2) {
        // substitute L = a1 r^2, the (2,2) entry of t* a t minus a2
        const double pre = kPi / (std::sqrt(a[0]) * std::sqrt(a[1]));
        auto g = [&](double L) {
            const auto lam = eig2(a[0], std::sqrt(a[0] * L), L + a[1], a[0], a[1]);
            if (!(lam[0] > 0.0) || !std::isfinite(lam[1])) return 0.0;
            const double v = f(lam);
            return v;
        };
        const double v = quad::half_line(g, std::numeric_limits<double>::infinity(), 1e-11);
        if (v == 0.0) return {0.0, 0.0};
        return {pre * v, 1e-9 * std::abs(pre * v)};
    }
    if (n == 3) {
        // Phases of t12 and t23 are removed by conjugation with diagonal unitaries.
        const double pre = a[0] / a[2] * 4.0 * kPi * kPi;
        auto level = [&](int nodes) {
            const auto& r = gl_rule(nodes);
            std::vector<double> u(nodes), w(nodes);
            for (int i = 0; i < nodes; ++i) {
                const double s = 0.5 * (r.nodes[i] + 1.0);
                u[i] = s / (1.0 - s);
                w[i] = 0.5 * r.weights[i] / ((1.0 - s) * (1.0 - s));
            }
            double sum = 0.0;
            Eigen::Matrix3cd t = Eigen::Matrix3cd::Identity();
            Eigen::Matrix3cd am = Eigen::Matrix3cd::Zero();
            for (int j = 0; j < 3; ++j) am(j, j) = a[j];
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es;
            for (int i1 = 0; i1 < nodes; ++i1)
                for (int i2 = 0; i2 < nodes; ++i2)
                    for (int i3 = 0; i3 < nodes; ++i3)
                        for (int k = 0; k < nodes; ++k) {
                            const double phi = 2.0 * kPi * k / nodes;
                            t(0, 1) = u[i1];
                            t(1, 2) = u[i2];
                            t(0, 2) = std::polar(u[i3], phi);
                            const Eigen::Matrix3cd y = t.adjoint() * am * t;
                            es.computeDirect(y, Eigen::EigenvaluesOnly);
                            const auto ev = es.eigenvalues();
                            const std::array<double, 3> lam{ev(0), ev(1), ev(2)};
                            if (!(lam[0] > 0.0) || !std::isfinite(lam[2])) continue;
                            const double v = f(lam);
                            sum += w[i1] * w[i2] * w[i3] * (2.0 * kPi / nodes) * u[i1] * u[i2] * u[i3] * v;
                        }
            return pre * sum;
        };
        const double coarse = level(16);
        const double mid = level(24);
        const double fine = level(32);
        return {fine, std::max(std::abs(fine - mid), std::abs(mid - coarse) * 0.1)};
    }
    throw CapabilityError("Harish transform implemented for n <= 3");
}

cplx spherical_transform_closed(const EnsembleSpec& spec, std::span<const cplx> s) {
    const int n = spec.n();
    cplx v = 1.0;
    for (int j = 0; j < n; ++j) v *= mellin_weight(spec.family(), s[j] - (n - 1) / 2.0) / spec.mellin_int(j + 1);
    return v;
}

cplx spherical_transform(const EnsembleSpec& spec, std::span<const cplx> s) {
    const int n = spec.n();
    if (int(s.size()) != n) throw DomainError("spherical transform dimension mismatch");
    const double top = spec.family().support_upper();
    if (n == 1) {
        auto g = [&](double a) -> cplx {
            const double f = density_sv(spec, std::span<const double>(&a, 1));
            return f == 0.0 ? cplx(0.0) : f * std::exp((s[0] - 1.0) * std::log(a));
        };
        return quad::half_line(g, top, 1e-12);
    }
    if (n == 2) {
        // phi(a, s) / (det a)^2 = phi(a, s - 2)
        const std::array<cplx, 2> shifted{s[0] - 2.0, s[1] - 2.0};
        auto outer = [&](double a1) -> cplx {
            auto inner = [&](double a2) -> cplx {
                const std::array<double, 2> a{a1, a2};
                const double f = density_sv(spec, a);
                if (f == 0.0) return 0.0;
                return f * spherical_closed(a, shifted);
            };
            return quad::half_line(inner, top, 1e-12);
        };
        return quad::half_line(outer, top, 1e-11);
    }
    throw CapabilityError("numeric spherical transform implemented for n <= 2");
}

cplx mellin_of_harish(const EnsembleSpec& spec, std::span<const cplx> s) {
    const int n = spec.n();
    if (int(s.size()) != n) throw DomainError("Mellin transform dimension mismatch");
    const OmegaDensity f = omega_density(spec);
    const double top = spec.family().support_upper();
    if (n == 1) {
        auto g = [&](double a) -> cplx {
            const double h = harish_transform(f, std::span<const double>(&a, 1)).value;
            return h == 0.0 ? cplx(0.0) : h * std::exp((s[0] - 1.0) * std::log(a));
        };
        return quad::half_line(g, top, 1e-12);
    }
    if (n == 2) {
        auto outer = [&](double a1) -> cplx {
            auto inner = [&](double a2) -> cplx {
                // det a below this underflows inside H; the region carries no mass for admissible s
                if (a1 * a2 < 1e-280) return 0.0;
                const std::array<double, 2> a{a1, a2};
                const double h = harish_transform(f, a).value;
                if (h == 0.0) return 0.0;
                const double l1 = std::log(a1), l2 = std::log(a2), lh = std::log(std::abs(h));
                const cplx perm = std::exp(lh + (s[0] - 1.0) * l1 + (s[1] - 1.0) * l2) +
                                  std::exp(lh + (s[1] - 1.0) * l1 + (s[0] - 1.0) * l2);
                const cplx v = (h < 0.0 ? -0.5 : 0.5) * perm;
                return v;
            };
            return quad::half_line(inner, top, 1e-9);
        };
        return quad::half_line(outer, top, 1e-8);
    }
    throw CapabilityError("numeric Mellin of the Harish transform implemented for n <= 2");
}

namespace {

// omega(x) from the line integral at abscissa d; x = 0 by extrapolation from
// small x on a line close to the left edge of the strip.
double line_inverse(const EnsembleSpec& spec, const MellinEvaluator& f, double d, double x, int l) {
    MellinInverseOptions opt;
    opt.reg = Regularizer{l, 0.0};
    if (x > 0.0) return mellin_inverse(f, d, x, opt).value;
    const double s_min = spec.family().strip().s_min;
    const double d0 = std::isfinite(s_min) ? std::min(d, s_min + 0.25) : d;
    const double h = 1e-3;
    const double v1 = mellin_inverse(f, d0, h, opt).value;
    const double v2 = mellin_inverse(f, d0, 2.0 * h, opt).value;
    const double v3 = mellin_inverse(f, d0, 3.0 * h, opt).value;
    return 3.0 * v1 - 3.0 * v2 + v3;
}

}  // namespace

double sev_forward(const EnsembleSpec& spec, std::span<const cplx> z, SevMode mode) {
    const int n = spec.n();
    if (int(z.size()) != n) throw DomainError("expected " + std::to_string(n) + " eigenvalues");
    if (mode == SevMode::closed) return density_ev(spec, z);
    if (n > 2) throw CapabilityError("numeric SEV transform implemented for n <= 2");
    const WeightFamily& w = spec.family();
    const MellinEvaluator mw = [&w](cplx s) { return mellin_weight(w, s); };
    // L[c][b] = line integral at abscissa c evaluated at |z_b|^2
    std::vector<std::vector<double>> lv(n, std::vector<double>(n));
    for (int c = 0; c < n; ++c)
        for (int b = 0; b < n; ++b) lv[c][b] = line_inverse(spec, mw, c + 1.0, std::norm(z[b]), 1);
    double perm = 0.0;
    if (n == 1) perm = lv[0][0];
    else perm = lv[0][0] * lv[1][1] + lv[0][1] * lv[1][0];
    double m = 1.0;
    for (int c = 1; c <= n; ++c) m *= spec.mellin_int(c);
    const double nf = factorial(n);
    return std::norm(vandermonde(z)) * perm / (nf * nf * std::pow(kPi, n) * m);
}

double sev_inverse(const EnsembleSpec& spec, std::span<const double> a) {
    const int n = spec.n();
    if (int(a.size()) != n) throw DomainError("expected " + std::to_string(n) + " squared singular values");
    if (n > 2) throw CapabilityError("numeric inverse SEV transform implemented for n <= 2");
    for (double v : a)
        if (!(v > 0.0)) throw DomainError("squared singular values must be positive");
    const WeightFamily& w = spec.family();
    // lam[c][k][b]: line integral at abscissa c of s^k M omega(s), at a_b
    std::vector<std::vector<std::vector<double>>> lam(n, std::vector<std::vector<double>>(n, std::vector<double>(n)));
    for (int c = 0; c < n; ++c)
        for (int k = 0; k < n; ++k) {
            const MellinEvaluator f = [&w, k](cplx s) { return std::pow(s, k) * mellin_weight(w, s); };
            for (int b = 0; b < n; ++b) lam[c][k][b] = line_inverse(spec, f, c + 1.0, a[b], n);
        }
    double sum = 0.0;
    if (n == 1) {
        sum = lam[0][0][0];
    } else {
        // sum over tau, kappa of sgn * prod_c lam[c][kappa(c)][a_tau(c)]
        for (int tau = 0; tau < 2; ++tau)
            for (int kap = 0; kap < 2; ++kap) {
                const int t0 = tau ? 1 : 0, t1 = tau ? 0 : 1;
                const int k0 = kap ? 1 : 0, k1 = kap ? 0 : 1;
                const double sg = ((tau + kap) % 2) ? -1.0 : 1.0;
                sum += sg * lam[0][k0][t0] * lam[1][k1][t1];
            }
    }
    double m = 1.0;
    for (int c = 1; c <= n; ++c) m *= spec.mellin_int(c);
    const double nf = factorial(n);
    return vandermonde(a) * sum / (nf * nf * superfactorial(n) * m);
}

Estimate sev_forward(const SvDensity& f_sv, int n, std::span<const cplx> z, std::optional<Regularizer> reg) {
    if (int(z.size()) != n) throw DomainError("expected " + std::to_string(n) + " eigenvalues");
    if (n < 1 || n > 2) throw CapabilityError("numeric SEV transform implemented for n <= 2");
    std::vector<double> lx(n);
    for (int b = 0; b < n; ++b) {
        const double x = std::norm(z[b]);
        if (!(x > 0.0)) throw DomainError("generic SEV transform needs nonzero eigenvalues");
        lx[b] = std::log(x);
    }
    const int l = reg ? reg->l : 1;
    if (reg && l != 1) throw ConfigError("forward map uses the first-order regularizer");

    // smoothed (eps > 0) or exact (eps = 0) value
    auto at_eps = [&](double eps) -> double {
        if (n == 1) {
            if (eps == 0.0) {
                const double a = std::exp(lx[0]);
                return f_sv(std::span<const double>(&a, 1)) / kPi;
            }
            double sum = 0.0;
            for (int p = -1; p <= 1; p += 2) {
                const double lo = (p < 0) ? -eps : 0.0, hi = (p < 0) ? 0.0 : eps;
                sum += gl_panel(
                    [&](double v) {
                        const double a = std::exp(lx[0] + v);
                        return f_sv(std::span<const double>(&a, 1)) * std::exp(v) * zeta_kernel(1, eps, v);
                    },
                    lo, hi, 24);
            }
            return sum / kPi;
        }
        // n = 2
        auto f_over_delta = [&](double u1, double u2) {
            const std::array<double, 2> a{std::exp(u1), std::exp(u2)};
            if (!(a[0] > 0.0 && a[1] > 0.0 && std::isfinite(a[0] + a[1]))) return 0.0;
            const double d = a[1] - a[0];
            if (std::abs(d) < 1e-13 * (a[0] + a[1])) return 0.0;
            return f_sv(a) / d;
        };
        double total = 0.0;
        for (int p = 0; p < 2; ++p) {
            const double x1 = lx[p], x2 = lx[1 - p];
            auto g = [&](double t) {
                if (eps == 0.0) return f_over_delta(x1 - t, x2 + t);
                auto inner = [&](double v1) {
                    return gl_panel(
                        [&](double v2) {
                            return f_over_delta(x1 - t + v1, x2 + t + v2) * std::exp(v1 + 2.0 * v2) *
                                   zeta_kernel(1, eps, v1) * zeta_kernel(1, eps, v2);
                        },
                        -eps, eps, 24);
                };
                return gl_panel(inner, -eps, eps, 24);
            };
            // the diagonal a1 = a2 is crossed at t* when x1 > x2
            const double ts = 0.5 * (x1 - x2);
            if (ts > 0.0) {
                total += quad::tanh_sinh(g, 0.0, ts, 1e-10) + quad::exp_sinh(g, ts, 1e-10);
            } else {
                total += quad::exp_sinh(g, 0.0, 1e-10);
            }
        }
        const double dz = std::norm(z[1] - z[0]);
        return 2.0 * dz * total / (4.0 * kPi * kPi);
    };

    if (!reg) return {at_eps(0.0), 0.0};
    if (reg->epsilon > 0.0) return {at_eps(reg->epsilon), 0.0};
    std::vector<double> v;
    for (double e : epsilon_sequence(*reg, kEpsilonStart, kEpsilonLevels)) v.push_back(at_eps(e));
    Estimate out;
    out.value = richardson_sq(v, &out.error);
    return out;
}

Estimate sev_inverse(const EvDensity& f_ev, int n, std::span<const double> a, std::optional<Regularizer> reg_in) {
    if (int(a.size()) != n) throw DomainError("expected " + std::to_string(n) + " squared singular values");
    if (n < 1 || n > 2) throw CapabilityError("numeric inverse SEV transform implemented for n <= 2");
    for (double v : a)
        if (!(v > 0.0)) throw DomainError("squared singular values must be positive");
    const Regularizer reg = reg_in.value_or(Regularizer{n, 0.0});
    if (reg.l != n) throw ConfigError("inverse map uses the regularizer of order n");
    std::vector<double> la(n);
    for (int b = 0; b < n; ++b) la[b] = std::log(a[b]);
    double start = kEpsilonStart;
    if (n == 2) {
        const double gap = std::abs(la[1] - la[0]);
        start = std::min(start, gap / 2.5);
        if (reg.epsilon > 0.0 && 2.0 * reg.epsilon >= gap) {
            throw DomainError("smoothing window overlaps the diagonal; use a smaller epsilon");
        }
    }
    // kernel panels split where the l = 2 kernel changes its analytic form
    auto panels = [&](double eps) {
        if (reg.l == 1) return std::vector<std::pair<double, double>>{{-eps, 0.0}, {0.0, eps}};
        return std::vector<std::pair<double, double>>{{-eps, -eps / 3.0}, {-eps / 3.0, eps / 3.0}, {eps / 3.0, eps}};
    };
    auto q = [&](int c, int k, double eps, double v) {
        const double e = std::exp(c * v);
        const double phi = zeta_kernel(reg.l, eps, v);
        return k == 0 ? e * phi : e * (c * phi + zeta_kernel_derivative(reg.l, eps, v));
    };
    auto h = [&](double u1, double u2) {
        const std::array<cplx, 2> z{std::exp(0.5 * u1), std::exp(0.5 * u2)};
        const double d = std::norm(z[1] - z[0]);
        return f_ev(z) / d;
    };
    auto at_eps = [&](double eps) -> double {
        if (n == 1) {
            double sum = 0.0;
            for (const auto& [lo, hi] : panels(eps)) {
                sum += gl_panel(
                    [&](double v) {
                        const cplx z = std::exp(0.5 * (la[0] + v));
                        return f_ev(std::span<const cplx>(&z, 1)) * q(1, 0, eps, v);
                    },
                    lo, hi, 16);
            }
            return kPi * sum;
        }
        double total = 0.0;
        for (int tau = 0; tau < 2; ++tau) {
            const double c1 = la[tau ? 1 : 0], c2 = la[tau ? 0 : 1];
            for (int kap = 0; kap < 2; ++kap) {
                const int k1 = kap ? 1 : 0, k2 = kap ? 0 : 1;
                const double sg = ((tau + kap) % 2) ? -1.0 : 1.0;
                double box = 0.0;
                for (const auto& [lo1, hi1] : panels(eps))
                    for (const auto& [lo2, hi2] : panels(eps)) {
                        box += gl_panel(
                            [&](double v1) {
                                return gl_panel(
                                    [&](double v2) {
                                        return h(c1 + v1, c2 + v2) * q(1, k1, eps, v1) * q(2, k2, eps, v2);
                                    },
                                    lo2, hi2, 10);
                            },
                            lo1, hi1, 10);
                    }
                total += sg * box;
            }
        }
        return 2.0 * (kPi * kPi / 4.0) * vandermonde(a) * total;
    };
    if (reg.epsilon > 0.0) return {at_eps(reg.epsilon), 0.0};
    std::vector<double> v;
    for (double e : epsilon_sequence(reg, start, kEpsilonLevels)) v.push_back(at_eps(e));
    Estimate out;
    out.value = richardson_sq(v, &out.error);
    return out;
}

double phase_average_vandermonde(std::span<const double> a, int nodes) {
    const int n = int(a.size());
    if (n < 1) throw DomainError("empty argument list");
    if (n > 6) throw CapabilityError("phase average implemented for n <= 6");
    if (nodes <= 0) nodes = 2 * n + 1;
    std::vector<double> r(n);
    for (int j = 0; j < n; ++j) {
        if (!(a[j] > 0.0)) throw DomainError("phase average needs positive arguments");
        r[j] = std::sqrt(a[j]);
    }
    std::vector<int> idx(n, 0);
    std::vector<cplx> x(n);
    double sum = 0.0;
    long total = 1;
    for (int j = 0; j < n; ++j) total *= nodes;
    for (long k = 0; k < total; ++k) {
        long rem = k;
        for (int j = 0; j < n; ++j) {
            idx[j] = int(rem % nodes);
            rem /= nodes;
            x[j] = std::polar(r[j], 2.0 * kPi * idx[j] / nodes);
        }
        sum += std::norm(vandermonde(x));
    }
    return sum / double(total);
}

}  // namespace svev
