#include "svev/special.hpp"

#include <array>
#include <cmath>

namespace svev {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

const double kHalfLog2Pi = 0.5 * std::log(2.0 * kPi);

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

// Lanczos sum and shifted argument for Re z >= 1/2.
void lanczos(cplx z, cplx& sum, cplx& t) {
    z -= 1.0;
    sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + double(i));
    t = z + kLanczosG + 0.5;
}

}  // namespace

cplx log_sin_pi(cplx z) {
    const cplx i(0.0, 1.0);
    if (std::abs(z.imag()) < 20.0) return std::log(std::sin(kPi * z));
    if (z.imag() > 0.0) {
        // sin(pi z) = -e^{-i pi z} (1 - e^{2 i pi z}) / (2i)
        return -i * kPi * z + std::log(1.0 - std::exp(2.0 * i * kPi * z)) - std::log(cplx(0.0, -2.0)) ;
    }
    // sin(pi z) = e^{i pi z} (1 - e^{-2 i pi z}) / (2i)
    return i * kPi * z + std::log(1.0 - std::exp(-2.0 * i * kPi * z)) - std::log(cplx(0.0, 2.0));
}

cplx lgamma(cplx z) {
    if (z.real() < 0.5) {
        return std::log(kPi) - log_sin_pi(z) - lgamma(1.0 - z);
    }
    cplx sum, t;
    lanczos(z, sum, t);
    return kHalfLog2Pi + (z - 0.5) * std::log(t) - t + std::log(sum);
}

cplx gamma(cplx z) {
    if (z.imag() == 0.0) {
        if (is_nonpositive_integer(z)) return {std::numeric_limits<double>::infinity(), 0.0};
        return std::tgamma(z.real());
    }
    if (std::abs(z) > 30.0) return std::exp(lgamma(z));
    if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma(1.0 - z));
    cplx sum, t;
    lanczos(z, sum, t);
    return std::sqrt(2.0 * kPi) * std::pow(t, z - 0.5) * std::exp(-t) * sum;
}

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    if (z.imag() == 0.0) return 1.0 / std::tgamma(z.real());
    if (z.real() < 0.5 && std::abs(z) <= 30.0) return std::sin(kPi * z) * gamma(1.0 - z) / kPi;
    return std::exp(-lgamma(z));
}

double factorial(int k) { return std::tgamma(k + 1.0); }

double log_factorial(int k) { return std::lgamma(k + 1.0); }

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

double superfactorial(int n) {
    double p = 1.0;
    for (int j = 0; j < n; ++j) p *= factorial(j);
    return p;
}

}  // namespace svev
