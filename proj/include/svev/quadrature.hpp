#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "svev/errors.hpp"

namespace svev::quad {

inline constexpr double kRelTol = 1e-10;

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1].
Rule gauss_legendre(int n);

// Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

namespace detail {
inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
    thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    return rule;
}
inline boost::math::quadrature::exp_sinh<double>& exp_sinh_rule() {
    thread_local boost::math::quadrature::exp_sinh<double> rule(15);
    return rule;
}
template <class T>
double magnitude(const T& v) {
    using std::abs;
    return abs(v);
}
}  // namespace detail

// Double-exponential rule on [a, b]; tolerates integrable endpoint singularities.
template <class F>
auto tanh_sinh(const F& f, double a, double b, double rel_tol = kRelTol) {
    double err = 0.0, l1 = 0.0;
    try {
        auto q = detail::tanh_sinh_rule().integrate(f, a, b, rel_tol, &err, &l1);
        if (!(err <= std::max(1e3 * rel_tol * l1, 1e-14))) {
            throw NumericError("tanh-sinh quadrature did not converge on [" + std::to_string(a) + ", " +
                                   std::to_string(b) + "]",
                               err);
        }
        return q;
    } catch (const std::domain_error& e) {
        throw NumericError(std::string("tanh-sinh quadrature failed: ") + e.what());
    } catch (const boost::math::evaluation_error& e) {
        throw NumericError(std::string("tanh-sinh quadrature failed: ") + e.what());
    }
}

// Exponential map onto [a, inf).
template <class F>
auto exp_sinh(const F& f, double a, double rel_tol = kRelTol) {
    double err = 0.0, l1 = 0.0;
    try {
        auto q = detail::exp_sinh_rule().integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol,
                                                   &err, &l1);
        if (!(err <= std::max(1e3 * rel_tol * l1, 1e-14))) {
            throw NumericError("exp-sinh quadrature did not converge on [" + std::to_string(a) + ", inf)",
                               err);
        }
        return q;
    } catch (const std::domain_error& e) {
        throw NumericError(std::string("exp-sinh quadrature failed: ") + e.what());
    } catch (const boost::math::evaluation_error& e) {
        throw NumericError(std::string("exp-sinh quadrature failed: ") + e.what());
    }
}

// Adaptive Gauss-Kronrod (7/15) on a finite smooth interval.
template <class F>
auto gauss_kronrod(const F& f, double a, double b, double rel_tol = kRelTol, unsigned max_depth = 18) {
    double err = 0.0, l1 = 0.0;
    auto q = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, rel_tol,
                                                                         &err, &l1);
    if (!(err <= std::max(1e2 * rel_tol * l1, 1e-13))) {
        throw NumericError("Gauss-Kronrod quadrature did not converge", err);
    }
    return q;
}

// Integral over (lo, hi) where hi may be +inf: tanh-sinh on the finite part
// (0, min(hi, 1)) and an exponential map beyond 1.
template <class F>
auto half_line(const F& f, double hi = std::numeric_limits<double>::infinity(), double rel_tol = kRelTol) {
    if (hi <= 1.0) return tanh_sinh(f, 0.0, hi, rel_tol);
    auto head = tanh_sinh(f, 0.0, 1.0, rel_tol);
    if (std::isinf(hi)) return head + exp_sinh(f, 1.0, rel_tol);
    return head + tanh_sinh(f, 1.0, hi, rel_tol);
}

// k-th derivative of f at x by central differences with Richardson
// extrapolation in h^2 (Ridders' tableau). Returns the best estimate.
double derivative(const std::function<double(double)>& f, double x, int k, double h0, double* error = nullptr);

}  // namespace svev::quad
