#pragma once

#include <complex>

namespace svev {

// A value with an error bar: a standard error for Monte Carlo, an error
// estimate for quadrature and extrapolation.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

struct ComplexEstimate {
    std::complex<double> value;
    double error_re = 0.0;
    double error_im = 0.0;
};

}  // namespace svev
