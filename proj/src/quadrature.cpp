#include "svev/quadrature.hpp"

#include <algorithm>

#include "svev/special.hpp"

namespace svev::quad {

Rule gauss_legendre(int n) {
    if (n < 1) throw ConfigError("Gauss-Legendre rule needs at least one node");
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    if (n == 1) {
        r.nodes[0] = 0.0;
        r.weights[0] = 2.0;
    }
    return r;
}

Rule gauss_legendre(int n, double a, double b) {
    Rule r = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

double derivative(const std::function<double(double)>& f, double x, int k, double h0, double* error) {
    if (k == 0) {
        if (error) *error = 0.0;
        return f(x);
    }
    constexpr int kTable = 12;
    constexpr double kCon = 1.4, kCon2 = kCon * kCon, kSafe = 2.0;
    auto stencil = [&](double h) {
        double s = 0.0;
        for (int i = 0; i <= k; ++i) {
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            s += sign * binomial(k, i) * f(x + (0.5 * k - i) * h);
        }
        return s / std::pow(h, k);
    };
    double a[kTable][kTable];
    double h = h0;
    a[0][0] = stencil(h);
    double best = a[0][0], err = std::numeric_limits<double>::max();
    for (int i = 1; i < kTable; ++i) {
        h /= kCon;
        a[0][i] = stencil(h);
        double fac = kCon2;
        for (int j = 1; j <= i; ++j) {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= kCon2;
            const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
            if (e <= err) {
                err = e;
                best = a[j][i];
            }
        }
        if (std::abs(a[i][i] - a[i - 1][i - 1]) >= kSafe * err) break;
    }
    if (error) *error = err;
    return best;
}

}  // namespace svev::quad
