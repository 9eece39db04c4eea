#include "svev/deformations.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "svev/confluent.hpp"
#include "svev/errors.hpp"
#include "svev/quadrature.hpp"

namespace svev {

Deformation Deformation::exp_trace(cplx alpha) { return {DeformKind::exp_trace, alpha, 0}; }

Deformation Deformation::det_power(cplx alpha, int gamma) {
    if (gamma < 0) throw ConfigError("gamma must be a nonnegative integer");
    return {DeformKind::det_power, alpha, gamma};
}

bool Deformation::is_identity() const noexcept {
    return kind == DeformKind::exp_trace ? alpha == 0.0 : gamma == 0;
}

double Deformation::factor(cplx z) const {
    if (kind == DeformKind::exp_trace) return std::exp((alpha * z).real());
    return std::pow(std::abs(alpha - z), gamma);
}

double Deformation::matrix_factor(const ComplexMatrix& g) const {
    if (kind == DeformKind::exp_trace) return std::exp((alpha * g.trace()).real());
    const ComplexMatrix m = alpha * ComplexMatrix::Identity(g.rows(), g.cols()) - g;
    return std::pow(std::abs(m.determinant()), gamma);
}

std::string Deformation::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind == DeformKind::exp_trace) os << "exp-trace(alpha=" << alpha.real() << "," << alpha.imag() << ")";
    else os << "det-power(alpha=" << alpha.real() << "," << alpha.imag() << ",gamma=" << gamma << ")";
    return os.str();
}

DeformKind deform_kind_from_name(const std::string& name) {
    if (name == "exp-trace" || name == "exp_trace") return DeformKind::exp_trace;
    if (name == "det-power" || name == "det_power") return DeformKind::det_power;
    throw ConfigError("unknown deformation '" + name + "' (expected exp-trace or det-power)");
}

void check_admissible(const EnsembleSpec& spec, const Deformation& d) {
    if (d.is_identity()) return;
    if (d.kind == DeformKind::exp_trace) {
        if (!spec.family().exp_trace_integrable())
            throw ConfigError("exp-trace deformation is not integrable for the " + spec.family().name() + " weight");
        return;
    }
    if (d.gamma < 0) throw ConfigError("gamma must be a nonnegative integer");
    // moments up to |z|^{2(n-1)+gamma} must exist
    const double need = spec.n() + 0.5 * d.gamma;
    if (!(spec.strip().s_max > need))
        throw ConfigError("det-power deformation with gamma=" + std::to_string(d.gamma) +
                          " needs moments the weight does not have");
}

namespace {

// m-th Taylor coefficient at x0 of f_c(a) = sum_k beta^{2k} a^{k+c-1} / (k! (k+c-1)!), c >= 1
double ls_series_taylor(double beta, int c, double x0, int m) {
    const int p0 = c - 1;
    const int k0 = std::max(0, m - p0);
    if (beta == 0.0) {
        // only k = 0
        if (m > p0) return 0.0;
        return std::pow(x0, p0 - m) / (factorial(m) * factorial(p0 - m));
    }
    const double lb2 = 2.0 * std::log(beta), lx = std::log(x0);
    double sum = 0.0;
    for (int k = k0; k < 100000; ++k) {
        const int p = k + p0;
        const double lt = k * lb2 + (p - m) * lx - std::lgamma(k + 1.0) - std::lgamma(m + 1.0) - std::lgamma(p - m + 1.0);
        const double t = std::exp(lt);
        sum += t;
        if (!std::isfinite(sum)) return sum;
        // terms decrease monotonically once k exceeds beta sqrt(x0)
        if (k > beta * std::sqrt(x0) + m + 2 && t < 1e-18 * sum) return sum;
    }
    throw NumericError("Leutwyler-Smilga series did not converge");
}

}  // namespace

double ls_integral(cplx alpha, std::span<const double> a) {
    const int n = int(a.size());
    for (double v : a)
        if (!(v > 0.0)) throw DomainError("group integral needs positive squared singular values");
    const double beta = kLsArgumentScale * std::abs(alpha);
    std::vector<double> x(a.begin(), a.end());
    auto taylor = [&](int c, double x0, int m) { return ls_series_taylor(beta, c + 1, x0, m); };
    return superfactorial(n) * confluent::det_over_vandermonde<double>(x, taylor);
}

double ls_integral_bessel(cplx alpha, std::span<const double> a) {
    const int n = int(a.size());
    const double beta = kLsArgumentScale * std::abs(alpha);
    if (beta == 0.0) return 1.0;
    Eigen::MatrixXd m(n, n);
    for (int b = 0; b < n; ++b) {
        if (!(a[b] > 0.0)) throw DomainError("group integral needs positive squared singular values");
        const double x = beta * std::sqrt(a[b]);
        for (int c = 0; c < n; ++c) m(b, c) = std::pow(x, c) * boost::math::cyl_bessel_i(c, 2.0 * x);
    }
    const double vdm = vandermonde(a);
    if (vdm == 0.0) throw DomainError("Bessel form of the group integral needs distinct arguments");
    return superfactorial(n) * m.determinant() / (std::pow(beta, n * (n - 1)) * vdm);
}

double ls_phase_quadrature(cplx alpha, double a) {
    if (!(a > 0.0)) throw DomainError("group integral needs a positive argument");
    const cplx c = alpha * std::sqrt(a);
    auto f = [&](double phi) { return std::exp((c * std::polar(1.0, phi)).real()); };
    return quad::gauss_kronrod(f, 0.0, 2.0 * kPi, 1e-14) / (2.0 * kPi);
}

namespace {

// Pochhammer (x)_k for real x
double pochhammer(double x, int k) {
    double v = 1.0;
    for (int i = 0; i < k; ++i) v *= x + i;
    return v;
}

// coefficients of F_c(t) = t^{m+c-1} 2F1(-m, 1-m-c; n-c+1; |alpha|^2/t) in powers of t (c >= 1)
std::vector<double> j_poly(int m, int c, int n, double alpha2) {
    std::vector<double> coef(m + c, 0.0);  // degree m + c - 1
    for (int k = 0; k <= m; ++k) {
        const double t = pochhammer(-m, k) * pochhammer(1.0 - m - c, k) /
                         (pochhammer(n - c + 1.0, k) * factorial(k)) * std::pow(alpha2, k);
        coef[m + c - 1 - k] += t;
    }
    return coef;
}

double j_even(cplx alpha, int gamma, std::span<const double> a) {
    const int n = int(a.size());
    const int m = gamma / 2;
    const double alpha2 = std::norm(alpha);
    std::vector<std::vector<double>> polys(n);
    for (int c = 1; c <= n; ++c) polys[c - 1] = j_poly(m, c, n, alpha2);
    auto taylor = [&](int c, double x0, int r) {
        // r-th Taylor coefficient of the polynomial at x0
        const auto& p = polys[c];
        double v = 0.0;
        for (int d = int(p.size()) - 1; d >= r; --d) v = v * x0 + p[d] * binomial(d, r);
        return v;
    };
    std::vector<double> x(a.begin(), a.end());
    return confluent::det_over_vandermonde<double>(x, taylor);
}

double j_odd_n1(cplx alpha, int gamma, double a) {
    const double r = std::sqrt(a);
    const double phi0 = std::arg(alpha);
    auto f = [&](double phi) { return std::pow(std::abs(alpha - std::polar(r, phi)), gamma); };
    // a zero of the integrand can only sit at phi0
    return quad::gauss_kronrod(f, phi0, phi0 + 2.0 * kPi, 1e-12) / (2.0 * kPi);
}

double j_odd_n2(cplx alpha, int gamma, std::span<const double> a) {
    // k = e^{i psi} [[c e^{i p1}, s e^{i p2}], [-s e^{-i p2}, c e^{-i p1}]]; det(alpha - sqrt(a) k)
    // does not involve p2, and u = c^2 is uniform under Haar measure.
    const double r1 = std::sqrt(a[0]), r2 = std::sqrt(a[1]), r12 = r1 * r2;
    const quad::Rule gu = quad::gauss_legendre(48, 0.0, 1.0);
    const int np = 64;
    double sum = 0.0;
    for (std::size_t iu = 0; iu < gu.nodes.size(); ++iu) {
        const double su = std::sqrt(gu.nodes[iu]);
        double s1 = 0.0;
        for (int k = 0; k < np; ++k) {
            const double p1 = 2.0 * kPi * k / np;
            const cplx tr = su * (r1 * std::polar(1.0, p1) + r2 * std::polar(1.0, -p1));
            auto f = [&](double psi) {
                const cplx e = std::polar(1.0, psi);
                return std::pow(std::abs(alpha * alpha - alpha * e * tr + r12 * e * e), gamma);
            };
            // kinks sit at the arguments of the roots of r12 e^2 - alpha tr e + alpha^2
            const cplx disc = std::sqrt(alpha * alpha * tr * tr - 4.0 * r12 * alpha * alpha);
            double t1 = std::arg((alpha * tr + disc) / (2.0 * r12));
            double t2 = std::arg((alpha * tr - disc) / (2.0 * r12));
            if (t2 < t1) std::swap(t1, t2);
            // an arc narrower than this is a rounding sliver (coincident arguments, or
            // real roots landing on -pi and pi); GK never converges on it, so take the
            // whole circle starting at the kink instead
            constexpr double kSliver = 1e-9;
            const double arc = t2 - t1;
            // error judged against the whole circle: a short arc between nearly
            // coincident roots carries almost no mass
            double part = 0.0, err = 0.0, mass = 0.0;
            auto add = [&](double lo, double hi) {
                double e = 0.0, l1 = 0.0;
                part += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 25, 1e-9, &e, &l1);
                err += e;
                mass += l1;
            };
            if (arc < kSliver || 2.0 * kPi - arc < kSliver) {
                add(t1, t1 + 2.0 * kPi);
            } else {
                add(t1, t2);
                add(t2, t1 + 2.0 * kPi);
            }
            if (!(err <= std::max(1e-7 * mass, 1e-13))) throw NumericError("Gauss-Kronrod quadrature did not converge", err);
            s1 += part / (2.0 * kPi);
        }
        sum += gu.weights[iu] * s1 / np;
    }
    return sum;
}

}  // namespace

double group_integral_J(cplx alpha, int gamma, std::span<const double> a) {
    if (gamma < 0) throw ConfigError("gamma must be a nonnegative integer");
    for (double v : a)
        if (!(v > 0.0)) throw DomainError("group integral needs positive squared singular values");
    if (gamma == 0) return 1.0;
    if (gamma % 2 == 0) return j_even(alpha, gamma, a);
    if (a.size() == 1) return j_odd_n1(alpha, gamma, a[0]);
    if (a.size() == 2) return j_odd_n2(alpha, gamma, a);
    throw CapabilityError("odd gamma group integral implemented for n <= 2");
}

Estimate unitary_average_mc(const MatrixFunction& d, std::span<const double> a, long samples, Rng& rng) {
    if (samples < 2) throw ConfigError("Monte Carlo average needs at least two samples");
    const int n = int(a.size());
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) s(j, j) = std::sqrt(a[j]);
    double mean = 0.0, m2 = 0.0;
    for (long i = 0; i < samples; ++i) {
        const double v = d(s * sample_haar_unitary(n, rng));
        const double delta = v - mean;
        mean += delta / (i + 1);
        m2 += delta * (v - mean);
    }
    return {mean, std::sqrt(m2 / (samples - 1.0) / samples)};
}

double unitary_average_quadrature(const MatrixFunction& d, std::span<const double> a, int nodes) {
    const int n = int(a.size());
    if (n < 1 || n > 2) throw CapabilityError("unitary quadrature implemented for n <= 2");
    if (n == 1) {
        ComplexMatrix g(1, 1);
        double s = 0.0;
        for (int k = 0; k < 4 * nodes; ++k) {
            g(0, 0) = std::sqrt(a[0]) * std::polar(1.0, 2.0 * kPi * k / (4 * nodes));
            s += d(g);
        }
        return s / (4 * nodes);
    }
    ComplexMatrix sa = ComplexMatrix::Zero(2, 2);
    sa(0, 0) = std::sqrt(a[0]);
    sa(1, 1) = std::sqrt(a[1]);
    const quad::Rule gu = quad::gauss_legendre(nodes, 0.0, 1.0);
    ComplexMatrix k(2, 2);
    double sum = 0.0;
    for (std::size_t iu = 0; iu < gu.nodes.size(); ++iu) {
        const double c = std::sqrt(gu.nodes[iu]), s = std::sqrt(1.0 - gu.nodes[iu]);
        double acc = 0.0;
        for (int i1 = 0; i1 < nodes; ++i1)
            for (int i2 = 0; i2 < nodes; ++i2)
                for (int i3 = 0; i3 < nodes; ++i3) {
                    const cplx e1 = std::polar(1.0, 2.0 * kPi * i1 / nodes);
                    const cplx e2 = std::polar(1.0, 2.0 * kPi * i2 / nodes);
                    const cplx ep = std::polar(1.0, 2.0 * kPi * i3 / nodes);
                    k(0, 0) = ep * c * e1;
                    k(0, 1) = ep * s * e2;
                    k(1, 0) = -ep * s * std::conj(e2);
                    k(1, 1) = ep * c * std::conj(e1);
                    acc += d(sa * k);
                }
        sum += gu.weights[iu] * acc / (double(nodes) * nodes * nodes);
    }
    return sum;
}

namespace {

std::string cache_key(const EnsembleSpec& spec, const Deformation& d) {
    const WeightFamily& w = spec.family();
    std::ostringstream os;
    os.precision(17);
    os << int(w.kind) << ':' << w.nu << ':' << w.mu << ':' << w.alpha << ':' << w.theta << ':'
       << static_cast<const void*>(w.custom.get()) << ':' << spec.n() << ':' << d.describe();
    return os.str();
}

// A(r)_{ij} = int_0^{2pi} e^{i(i-j) phi} h(r e^{i phi}) d phi for |i-j| = q
cplx angular_moment(const Deformation& d, double r, int q) {
    if (d.kind == DeformKind::exp_trace) {
        // exp(|alpha| r cos(phi + arg alpha)) gives 2 pi I_q(|alpha| r) e^{-i q arg alpha}
        const double x = std::abs(d.alpha) * r;
        return 2.0 * kPi * boost::math::cyl_bessel_i(q, x) * std::polar(1.0, -q * std::arg(d.alpha));
    }
    auto h = [&](double phi) { return d.factor(std::polar(r, phi)); };
    if (d.gamma % 2 == 0) {
        // trigonometric polynomial of degree gamma: the trapezoid rule is exact
        const int nodes = d.gamma + q + 2;
        cplx s = 0.0;
        for (int k = 0; k < nodes; ++k) {
            const double phi = 2.0 * kPi * k / nodes;
            s += std::polar(1.0, q * phi) * h(phi);
        }
        return s * (2.0 * kPi / nodes);
    }
    const double phi0 = std::arg(d.alpha);
    const double re = quad::gauss_kronrod([&](double p) { return std::cos(q * p) * h(p); }, phi0, phi0 + 2.0 * kPi, 1e-10, 25);
    const double im = quad::gauss_kronrod([&](double p) { return std::sin(q * p) * h(p); }, phi0, phi0 + 2.0 * kPi, 1e-10, 25);
    return {re, im};
}

// m_{ij} = (1/2) int_0^inf omega(t) t^{(i+j)/2} A_{ij}(sqrt t) dt
Eigen::MatrixXcd gram_matrix(const EnsembleSpec& spec, const Deformation& d) {
    const int n = spec.n();
    const WeightFamily& w = spec.family();
    const double top = w.support_upper();
    const double split = (d.kind == DeformKind::det_power && d.gamma % 2 == 1) ? std::norm(d.alpha) : 0.0;
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const int q = j - i;
            auto f = [&](double t) -> cplx {
                if (!(t > 0.0)) return 0.0;
                const double om = eval_weight(w, t);
                if (om == 0.0) return 0.0;
                // A_{ij} uses e^{i(i-j) phi}; angular_moment returns the e^{+i q phi} moment
                return 0.5 * om * std::pow(t, 0.5 * (i + j)) * std::conj(angular_moment(d, std::sqrt(t), q));
            };
            cplx v;
            if (split > 0.0 && split < top) {
                v = quad::tanh_sinh(f, 0.0, split, 1e-11);
                v += std::isinf(top) ? quad::exp_sinh(f, split, 1e-11) : quad::tanh_sinh(f, split, top, 1e-11);
            } else {
                v = quad::half_line(f, top, 1e-11);
            }
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    return m;
}

std::mutex g_cache_mutex;
std::map<std::string, Normalization> g_norm_cache;
std::map<std::string, Eigen::MatrixXcd> g_inverse_gram_cache;

}  // namespace

Normalization deformation_normalization(const EnsembleSpec& spec, const Deformation& d) {
    if (d.is_identity()) return {1.0, 0.0, "identity"};
    check_admissible(spec, d);
    const std::string key = cache_key(spec, d);
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        if (auto it = g_norm_cache.find(key); it != g_norm_cache.end()) return it->second;
    }
    const Eigen::MatrixXcd m = gram_matrix(spec, d);
    Normalization out;
    out.value = norm_const_ev(spec) * factorial(spec.n()) * m.determinant().real();
    out.error = 1e-10 * std::abs(out.value);
    out.method = "andreief-quadrature";
    if (!(out.value > 0.0) || !std::isfinite(out.value))
        throw NumericError("deformation normalization is not positive and finite");
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_norm_cache.insert_or_assign(key, out);
    g_inverse_gram_cache.insert_or_assign(key, m.inverse());
    return out;
}

double deformed_density_ev(const EnsembleSpec& spec, const Deformation& d, std::span<const cplx> z) {
    const double base = density_ev(spec, z);
    if (d.is_identity()) return base;
    const Normalization nz = deformation_normalization(spec, d);
    double h = 1.0;
    for (const cplx& zj : z) h *= d.factor(zj);
    return base * h / nz.value;
}

double deformed_density_sv(const EnsembleSpec& spec, const Deformation& d, std::span<const double> a) {
    const double base = density_sv(spec, a);
    if (d.is_identity() || base == 0.0) return base;
    const Normalization nz = deformation_normalization(spec, d);
    const double g = (d.kind == DeformKind::exp_trace) ? ls_integral(d.alpha, a) : group_integral_J(d.alpha, d.gamma, a);
    return base * g / nz.value;
}

double deformed_radial_density_sq(const EnsembleSpec& spec, const Deformation& d, double t) {
    if (d.is_identity()) return radial_density_sq(spec, t);
    if (!(t > 0.0) || !(t < spec.family().support_upper())) return 0.0;
    deformation_normalization(spec, d);
    Eigen::MatrixXcd minv;
    {
        std::lock_guard<std::mutex> lock(g_cache_mutex);
        minv = g_inverse_gram_cache.at(cache_key(spec, d));
    }
    const int n = spec.n();
    const double r = std::sqrt(t);
    const double om = eval_weight(spec.family(), t);
    if (om == 0.0) return 0.0;
    // int_0^{2pi} h(z) sum_{ij} z^i (m^{-1})_{ji} conj(z)^j d phi, z = r e^{i phi}
    cplx s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // e^{i(i-j) phi} moment of h
            const int q = i - j;
            cplx mom = angular_moment(d, r, std::abs(q));
            if (q < 0) mom = std::conj(mom);
            s += std::pow(r, i + j) * minv(j, i) * mom;
        }
    return om * s.real() / (2.0 * n);
}

}  // namespace svev
