#pragma once

#include <complex>

namespace svev {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Complex Gamma via the Lanczos approximation (g = 7, nine terms) with
// reflection for Re z < 1/2.
cplx gamma(cplx z);

// log Gamma(z) on some branch; only exp() of sums/differences is meaningful.
cplx lgamma(cplx z);

// 1/Gamma(z), entire; exactly zero at the non-positive integers.
cplx rgamma(cplx z);

// log sin(pi z) without overflow for large |Im z|.
cplx log_sin_pi(cplx z);

double factorial(int k);
double log_factorial(int k);
double binomial(int n, int k);

// prod_{j=0}^{n-1} j!
double superfactorial(int n);

}  // namespace svev
