#include "svev/weights.hpp"

#include <cmath>

#include "svev/errors.hpp"
#include "svev/quadrature.hpp"

namespace svev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_param(const char* name, double v) { return std::string(name) + "=" + std::to_string(v); }

// Basis T_i used for exact (-a d/da)^k expansions. The Euler operator acts as
// a d/da T_i = r_i T_{i-1} + p_i T_i + q_i T_{i+1}.
struct Action {
    double r, p, q;
};

Action euler_action(const WeightFamily& w, int i) {
    switch (w.kind) {
        case WeightKind::Laguerre:
            return {0.0, w.nu + i, -1.0};
        case WeightKind::Jacobi:
            return {0.0, w.nu + i, -(w.mu - 1.0 - i)};
        case WeightKind::CauchyLorentz:
            return {0.0, w.nu + i, -(w.nu + w.mu + 1.0 + i)};
        case WeightKind::MuttalibBorodin:
            return {0.0, w.nu + i * w.theta, -w.alpha * w.theta};
        case WeightKind::LogSquare:
            return {double(i), w.nu, -2.0 * w.alpha};
        case WeightKind::Custom:
            break;
    }
    throw CapabilityError("no exact derivative expansion for custom weights");
}

// T_i(a) for the family basis.
double basis_term(const WeightFamily& w, double a, int i) {
    const double la = std::log(a);
    switch (w.kind) {
        case WeightKind::Laguerre:
            return std::exp((w.nu + i) * la - a);
        case WeightKind::Jacobi:
            if (a >= 1.0) return 0.0;
            return std::exp((w.nu + i) * la + (w.mu - 1.0 - i) * std::log1p(-a));
        case WeightKind::CauchyLorentz:
            return std::exp((w.nu + i) * la - (w.nu + w.mu + 1.0 + i) * std::log1p(a));
        case WeightKind::MuttalibBorodin:
            return std::exp((w.nu + i * w.theta) * la - w.alpha * std::pow(a, w.theta));
        case WeightKind::LogSquare:
            return std::pow(la, i) * std::exp(w.nu * la - w.alpha * la * la);
        case WeightKind::Custom:
            break;
    }
    throw CapabilityError("no basis expansion for custom weights");
}

std::vector<double> custom_derivatives(const WeightFamily& w, double a, int kmax) {
    const CustomWeight& c = *w.custom;
    if (kmax > c.max_derivative) {
        throw CapabilityError("custom weight declares smoothness " + std::to_string(c.max_derivative) +
                              ", derivative of order " + std::to_string(kmax) + " requested");
    }
    const double u0 = std::log(a);
    auto f = [&](double u) { return std::exp(c.log_omega(std::exp(u))); };
    std::vector<double> out(kmax + 1);
    out[0] = f(u0);
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    for (int k = 1; k <= kmax; ++k) {
        // Central k-th difference in u = ln a at steps h and h/2, one
        // Richardson step; h = eps^{1/(k+4)} balances rounding and truncation.
        const double h = std::pow(kEps, 1.0 / (k + 4));
        auto diff = [&](double step) {
            double s = 0.0;
            for (int i = 0; i <= k; ++i) {
                const double sign = (i % 2 == 0) ? 1.0 : -1.0;
                s += sign * binomial(k, i) * f(u0 + (0.5 * k - i) * step);
            }
            return s / std::pow(step, k);
        };
        const double d1 = diff(h), d2 = diff(0.5 * h);
        const double dk = (4.0 * d2 - d1) / 3.0;
        out[k] = (k % 2 == 0) ? dk : -dk;
    }
    return out;
}

}  // namespace

WeightFamily WeightFamily::laguerre(double nu) {
    WeightFamily w;
    w.kind = WeightKind::Laguerre;
    w.nu = nu;
    w.validate();
    return w;
}

WeightFamily WeightFamily::jacobi(double nu, double mu) {
    WeightFamily w;
    w.kind = WeightKind::Jacobi;
    w.nu = nu;
    w.mu = mu;
    w.validate();
    return w;
}

WeightFamily WeightFamily::cauchy_lorentz(double nu, double mu) {
    WeightFamily w;
    w.kind = WeightKind::CauchyLorentz;
    w.nu = nu;
    w.mu = mu;
    w.validate();
    return w;
}

WeightFamily WeightFamily::muttalib_borodin(double nu, double alpha, double theta) {
    WeightFamily w;
    w.kind = WeightKind::MuttalibBorodin;
    w.nu = nu;
    w.alpha = alpha;
    w.theta = theta;
    w.validate();
    return w;
}

WeightFamily WeightFamily::log_square(double nu, double alpha) {
    WeightFamily w;
    w.kind = WeightKind::LogSquare;
    w.nu = nu;
    w.alpha = alpha;
    w.validate();
    return w;
}

WeightFamily WeightFamily::from_custom(CustomWeight c) {
    WeightFamily w;
    w.kind = WeightKind::Custom;
    w.custom = std::make_shared<const CustomWeight>(std::move(c));
    w.validate();
    return w;
}

WeightFamily WeightFamily::from_name(const std::string& name, double nu, double mu, double alpha, double theta) {
    if (name == "laguerre") return laguerre(nu);
    if (name == "jacobi") return jacobi(nu, mu);
    if (name == "cauchy-lorentz") return cauchy_lorentz(nu, mu);
    if (name == "muttalib-borodin") return muttalib_borodin(nu, alpha, theta);
    if (name == "log-square") return log_square(nu, alpha);
    throw ConfigError("unknown weight family '" + name + "'");
}

std::vector<std::string> family_names() {
    return {"laguerre", "jacobi", "cauchy-lorentz", "muttalib-borodin", "log-square"};
}

std::string WeightFamily::name() const {
    switch (kind) {
        case WeightKind::Laguerre: return "laguerre";
        case WeightKind::Jacobi: return "jacobi";
        case WeightKind::CauchyLorentz: return "cauchy-lorentz";
        case WeightKind::MuttalibBorodin: return "muttalib-borodin";
        case WeightKind::LogSquare: return "log-square";
        case WeightKind::Custom: return "custom";
    }
    return "unknown";
}

MellinStrip WeightFamily::strip() const {
    switch (kind) {
        case WeightKind::Laguerre:
        case WeightKind::Jacobi:
        case WeightKind::MuttalibBorodin:
            return {-nu, kInf};
        case WeightKind::CauchyLorentz:
            return {-nu, mu + 1.0};
        case WeightKind::LogSquare:
            return {-kInf, kInf};
        case WeightKind::Custom:
            return custom->strip;
    }
    return {};
}

double WeightFamily::support_upper() const {
    if (kind == WeightKind::Jacobi) return 1.0;
    if (kind == WeightKind::Custom) return custom->support_upper;
    return kInf;
}

bool WeightFamily::exp_trace_integrable() const {
    switch (kind) {
        case WeightKind::Laguerre:
        case WeightKind::Jacobi:
            return true;
        case WeightKind::MuttalibBorodin:
            return theta > 0.5;
        case WeightKind::CauchyLorentz:
        case WeightKind::LogSquare:
            return false;
        case WeightKind::Custom:
            return custom->exp_trace_integrable;
    }
    return false;
}

void WeightFamily::validate() const {
    auto bad = [&](const std::string& why) { throw ConfigError(name() + ": " + why); };
    if (!std::isfinite(nu) || !std::isfinite(mu) || !std::isfinite(alpha) || !std::isfinite(theta))
        bad("parameters must be finite");
    switch (kind) {
        case WeightKind::Laguerre:
            if (!(nu > -1.0)) bad("requires nu > -1, got " + fmt_param("nu", nu));
            break;
        case WeightKind::Jacobi:
            if (!(nu > -1.0)) bad("requires nu > -1, got " + fmt_param("nu", nu));
            if (!(mu > 0.0)) bad("requires mu > 0, got " + fmt_param("mu", mu));
            break;
        case WeightKind::CauchyLorentz:
            if (!(nu > -1.0)) bad("requires nu > -1, got " + fmt_param("nu", nu));
            if (!(mu > 0.0)) bad("requires mu > 0, got " + fmt_param("mu", mu));
            break;
        case WeightKind::MuttalibBorodin:
            if (!(nu > -1.0)) bad("requires nu > -1, got " + fmt_param("nu", nu));
            if (!(alpha > 0.0)) bad("requires alpha > 0, got " + fmt_param("alpha", alpha));
            if (!(theta > 0.0)) bad("requires theta > 0, got " + fmt_param("theta", theta));
            break;
        case WeightKind::LogSquare:
            if (!(alpha > 0.0)) bad("requires alpha > 0, got " + fmt_param("alpha", alpha));
            break;
        case WeightKind::Custom:
            if (!custom || !custom->log_omega) bad("custom weight needs a log-omega evaluator");
            if (!(custom->strip.s_min < custom->strip.s_max)) bad("custom Mellin strip is empty");
            if (custom->max_derivative < 0) bad("max_derivative must be nonnegative");
            break;
    }
}

double log_weight(const WeightFamily& w, double a) {
    if (!(a > 0.0)) throw DomainError("weight evaluated at a <= 0 (a=" + std::to_string(a) + ")");
    const double la = std::log(a);
    switch (w.kind) {
        case WeightKind::Laguerre:
            return w.nu * la - a;
        case WeightKind::Jacobi:
            if (a >= 1.0) return -kInf;
            return w.nu * la + (w.mu - 1.0) * std::log1p(-a);
        case WeightKind::CauchyLorentz:
            return w.nu * la - (w.nu + w.mu + 1.0) * std::log1p(a);
        case WeightKind::MuttalibBorodin:
            return w.nu * la - w.alpha * std::pow(a, w.theta);
        case WeightKind::LogSquare:
            return w.nu * la - w.alpha * la * la;
        case WeightKind::Custom:
            return w.custom->log_omega(a);
    }
    return -kInf;
}

double eval_weight(const WeightFamily& w, double a) { return std::exp(log_weight(w, a)); }

cplx mellin_weight(const WeightFamily& w, cplx s) {
    const MellinStrip strip = w.strip();
    if (!strip.contains(s.real())) {
        throw DomainError("Mellin transform of " + w.name() + " evaluated at Re s=" + std::to_string(s.real()) +
                          " outside its strip");
    }
    const bool big = std::abs(s) > 20.0;
    switch (w.kind) {
        case WeightKind::Laguerre:
            return big ? std::exp(lgamma(s + w.nu)) : gamma(s + w.nu);
        case WeightKind::Jacobi:
            if (big) return std::exp(lgamma(s + w.nu) + std::lgamma(w.mu) - lgamma(s + w.nu + w.mu));
            return gamma(s + w.nu) * std::tgamma(w.mu) / gamma(s + w.nu + w.mu);
        case WeightKind::CauchyLorentz:
            if (big)
                return std::exp(lgamma(s + w.nu) + lgamma(w.mu + 1.0 - s) - std::lgamma(w.nu + w.mu + 1.0));
            return gamma(s + w.nu) * gamma(w.mu + 1.0 - s) / std::tgamma(w.nu + w.mu + 1.0);
        case WeightKind::MuttalibBorodin: {
            const cplx x = (s + w.nu) / w.theta;
            return std::exp(lgamma(x) - x * std::log(w.alpha)) / w.theta;
        }
        case WeightKind::LogSquare: {
            const cplx x = s + w.nu;
            return std::sqrt(kPi / w.alpha) * std::exp(x * x / (4.0 * w.alpha));
        }
        case WeightKind::Custom:
            if (w.custom->mellin) return w.custom->mellin(s);
            return mellin_quadrature(w, s);
    }
    return 0.0;
}

cplx mellin_reciprocal(const WeightFamily& w, cplx s) {
    if (!w.strip().contains(s.real())) return 0.0;
    switch (w.kind) {
        case WeightKind::Laguerre:
            return rgamma(s + w.nu);
        case WeightKind::Jacobi:
            return std::exp(lgamma(s + w.nu + w.mu) - lgamma(s + w.nu) - std::lgamma(w.mu));
        case WeightKind::CauchyLorentz:
            return std::tgamma(w.nu + w.mu + 1.0) * rgamma(s + w.nu) * rgamma(w.mu + 1.0 - s);
        default:
            return 1.0 / mellin_weight(w, s);
    }
}

cplx mellin_quadrature(const WeightFamily& w, cplx s) {
    if (!w.strip().contains(s.real())) {
        throw DomainError("Mellin quadrature outside the strip (Re s=" + std::to_string(s.real()) + ")");
    }
    // a^{s-1} omega(a) assembled in log space so large exponents cannot overflow.
    auto f = [&](double a) -> cplx {
        const double lw = log_weight(w, a);
        if (lw == -kInf) return 0.0;
        return std::exp((s - 1.0) * std::log(a) + lw);
    };
    return quad::half_line(f, w.support_upper(), 1e-12);
}

std::vector<double> weight_derivatives(const WeightFamily& w, double a, int kmax) {
    if (!(a > 0.0)) throw DomainError("weight derivative at a <= 0");
    if (kmax < 0) throw DomainError("negative derivative order");
    if (w.kind == WeightKind::Custom) return custom_derivatives(w, a, kmax);

    std::vector<double> out(kmax + 1, 0.0);
    if (a >= w.support_upper()) return out;
    std::vector<double> terms(kmax + 2, 0.0);
    std::vector<bool> have(kmax + 2, false);
    auto term = [&](int i) {
        if (!have[i]) {
            terms[i] = basis_term(w, a, i);
            have[i] = true;
        }
        return terms[i];
    };
    // coefficients of (-a d/da)^k omega in the basis T_0..T_k
    std::vector<double> c{1.0};
    out[0] = term(0);
    for (int k = 1; k <= kmax; ++k) {
        std::vector<double> next(k + 1, 0.0);
        for (int i = 0; i < int(c.size()); ++i) {
            if (c[i] == 0.0) continue;
            const Action act = euler_action(w, i);
            if (i > 0) next[i - 1] -= c[i] * act.r;
            next[i] -= c[i] * act.p;
            next[i + 1] -= c[i] * act.q;
        }
        c = std::move(next);
        double v = 0.0;
        for (int i = 0; i <= k; ++i) {
            if (c[i] != 0.0) v += c[i] * term(i);
        }
        out[k] = v;
    }
    return out;
}

double weight_derivative(const WeightFamily& w, double a, int k) { return weight_derivatives(w, a, k)[k]; }

}  // namespace svev
