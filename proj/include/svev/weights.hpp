#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "svev/special.hpp"

namespace svev {

enum class WeightKind { Laguerre, Jacobi, CauchyLorentz, MuttalibBorodin, LogSquare, Custom };

// Open strip s_min < Re s < s_max on which the Mellin transform converges.
struct MellinStrip {
    double s_min = -std::numeric_limits<double>::infinity();
    double s_max = std::numeric_limits<double>::infinity();

    bool contains(double re) const noexcept { return re > s_min && re < s_max; }
    // True if the closed interval [lo, hi] lies strictly inside.
    bool covers(double lo, double hi) const noexcept { return lo > s_min && hi < s_max; }
};

// Host-supplied weight. log_omega returns -inf where the weight vanishes.
struct CustomWeight {
    std::function<double(double)> log_omega;
    std::function<cplx(cplx)> mellin;  // optional closed form
    MellinStrip strip;
    int max_derivative = 2;
    bool exp_trace_integrable = false;
    double support_upper = std::numeric_limits<double>::infinity();
};

struct WeightFamily {
    WeightKind kind = WeightKind::Laguerre;
    double nu = 0.0;
    double mu = 0.0;
    double alpha = 1.0;
    double theta = 1.0;
    std::shared_ptr<const CustomWeight> custom;

    static WeightFamily laguerre(double nu);
    static WeightFamily jacobi(double nu, double mu);
    static WeightFamily cauchy_lorentz(double nu, double mu);
    static WeightFamily muttalib_borodin(double nu, double alpha, double theta);
    static WeightFamily log_square(double nu, double alpha);
    static WeightFamily from_custom(CustomWeight w);
    // Canonical names: laguerre, jacobi, cauchy-lorentz, muttalib-borodin, log-square.
    static WeightFamily from_name(const std::string& name, double nu, double mu, double alpha, double theta);

    std::string name() const;
    MellinStrip strip() const;
    // Upper end of the support of omega (1 for Jacobi, +inf otherwise).
    double support_upper() const;
    bool exp_trace_integrable() const;
    // Throws ConfigError if parameters violate the family's invariants.
    void validate() const;
};

std::vector<std::string> family_names();

// omega(a); DomainError for a <= 0.
double eval_weight(const WeightFamily& w, double a);
double log_weight(const WeightFamily& w, double a);

// M omega(s) = int_0^inf omega(a) a^{s-1} da; DomainError off the strip.
cplx mellin_weight(const WeightFamily& w, cplx s);
// 1 / M omega(s), defined as 0 wherever the Mellin integral diverges.
cplx mellin_reciprocal(const WeightFamily& w, cplx s);
// Direct quadrature of the defining integral (the closed-form oracle).
cplx mellin_quadrature(const WeightFamily& w, cplx s);

// (-a d/da)^k omega(a).
double weight_derivative(const WeightFamily& w, double a, int k);
// All orders 0..kmax at one point.
std::vector<double> weight_derivatives(const WeightFamily& w, double a, int kmax);

}  // namespace svev
