#pragma once

// Determinant ratios det[f_c(x_b)] / Delta(x) and det[F(x_b, t_c)] / (Delta(x) Delta(t))
// that stay finite when arguments coalesce. Away from coalescence the ratio is
// formed directly; otherwise rows (and columns) are replaced by Newton divided
// differences, and divided differences over tight clusters are summed from
// Taylor coefficients, which is the L'Hopital limit carried to all orders.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

namespace svev::confluent {

// Points closer than this (relative to the local scale) trigger divided differences.
inline constexpr double kConfluenceThreshold = 1e-5;
// Subsets tighter than this are evaluated from the Taylor expansion.
inline constexpr double kTaylorSpread = 1e-3;
inline constexpr int kTaylorExtraTerms = 10;

namespace detail {

// complete homogeneous symmetric polynomials h_0..h_K of d
template <class T>
std::vector<T> complete_homogeneous(const std::vector<T>& d, int K) {
    std::vector<T> h(K + 1, T(0));
    h[0] = T(1);
    for (const T& di : d)
        for (int k = 1; k <= K; ++k) h[k] += di * h[k - 1];
    return h;
}

template <class X>
double scale_of(const X& a, const X& b, double floor) {
    using std::abs;
    return std::max({abs(a), abs(b), floor});
}

template <class X>
bool has_close_pair(const std::vector<X>& x, double floor) {
    using std::abs;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (abs(x[i] - x[j]) < kConfluenceThreshold * scale_of(x[i], x[j], floor)) return true;
    return false;
}

template <class X>
std::vector<X> sorted_by_real(std::vector<X> x) {
    std::sort(x.begin(), x.end(), [](const X& a, const X& b) {
        using std::real;
        using std::imag;
        if (real(a) != real(b)) return real(a) < real(b);
        return imag(a) < imag(b);
    });
    return x;
}

template <class X>
X mean(const std::vector<X>& x, std::size_t i, std::size_t j) {
    X s = X(0);
    for (std::size_t k = i; k <= j; ++k) s += x[k];
    return s / double(j - i + 1);
}

}  // namespace detail

// det[f_c(x_b)]_{b,c=1..n} / prod_{b<c}(x_c - x_b).
// taylor(c, x0, m) must return f_c^{(m)}(x0)/m! (m = 0 gives the value).
// `floor` is the smallest scale used when judging closeness (0 for pure relative).
template <class T, class X, class Taylor>
T det_over_vandermonde(const std::vector<X>& x_in, const Taylor& taylor, double floor = 0.0) {
    using std::abs;
    const int n = int(x_in.size());
    if (n == 0) return T(1);
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    Mat m(n, n);
    if (!detail::has_close_pair(x_in, floor)) {
        T vdm = T(1);
        for (int c = 0; c < n; ++c)
            for (int b = 0; b < c; ++b) vdm *= T(x_in[c] - x_in[b]);
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) m(b, c) = taylor(c, x_in[b], 0);
        return T(m.determinant() / vdm);
    }
    // The ratio is symmetric in x, so order the points and work on contiguous ranges.
    const std::vector<X> x = detail::sorted_by_real(x_in);
    for (int c = 0; c < n; ++c) {
        // memo[i][j] = f_c[x_i..x_j]
        std::vector<std::vector<T>> memo(n, std::vector<T>(n));
        std::vector<std::vector<bool>> done(n, std::vector<bool>(n, false));
        auto dd = [&](auto&& self, int i, int j) -> T {
            if (done[i][j]) return memo[i][j];
            T v;
            if (i == j) {
                v = taylor(c, x[i], 0);
            } else {
                const double spread = abs(x[j] - x[i]);
                const X x0 = detail::mean(x, i, j);
                if (spread < kTaylorSpread * std::max(abs(x0), floor)) {
                    const int order = j - i;
                    std::vector<T> d;
                    for (int k = i; k <= j; ++k) d.push_back(T(x[k] - x0));
                    const auto h = detail::complete_homogeneous(d, kTaylorExtraTerms);
                    v = T(0);
                    for (int r = 0; r <= kTaylorExtraTerms; ++r) {
                        // exact coincidence (or underflow) leaves h[r] = 0; skip to avoid inf * 0
                        if (h[r] == T(0)) continue;
                        v += taylor(c, x0, order + r) * h[r];
                    }
                } else {
                    v = (self(self, i + 1, j) - self(self, i, j - 1)) / T(x[j] - x[i]);
                }
            }
            memo[i][j] = v;
            done[i][j] = true;
            return v;
        };
        for (int b = 0; b < n; ++b) m(b, c) = dd(dd, 0, b);
    }
    return T(m.determinant());
}

// det[F(x_b, t_c)] / (Delta(x) Delta(t)); taylor(x0, t0, m, r) returns the
// coefficient of u^m v^r in F(x0 + u, t0 + v).
template <class T, class Taylor>
T det_over_two_vandermonde(const std::vector<T>& x_in, const std::vector<T>& t_in, const Taylor& taylor,
                           double floor_x = 1.0, double floor_t = 1.0) {
    using std::abs;
    const int n = int(x_in.size());
    if (n == 0) return T(1);
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    Mat m(n, n);
    if (!detail::has_close_pair(x_in, floor_x) && !detail::has_close_pair(t_in, floor_t)) {
        T vx = T(1), vt = T(1);
        for (int c = 0; c < n; ++c)
            for (int b = 0; b < c; ++b) {
                vx *= x_in[c] - x_in[b];
                vt *= t_in[c] - t_in[b];
            }
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) m(b, c) = taylor(x_in[b], t_in[c], 0, 0);
        return m.determinant() / (vx * vt);
    }
    const std::vector<T> x = detail::sorted_by_real(x_in);
    const std::vector<T> t = detail::sorted_by_real(t_in);
    // memo over (x-range, t-range)
    const int n2 = n * n;
    std::vector<T> memo(std::size_t(n2) * n2);
    std::vector<char> done(std::size_t(n2) * n2, 0);
    auto key = [&](int i, int j, int k, int l) { return std::size_t((i * n + j) * n2 + (k * n + l)); };
    auto dd = [&](auto&& self, int i, int j, int k, int l) -> T {
        const std::size_t id = key(i, j, k, l);
        if (done[id]) return memo[id];
        T v;
        const double sx = abs(x[j] - x[i]);
        const double st = abs(t[l] - t[k]);
        const T x0 = detail::mean(x, i, j);
        const T t0 = detail::mean(t, k, l);
        const bool tight_x = sx < kTaylorSpread * std::max(abs(x0), floor_x);
        const bool tight_t = st < kTaylorSpread * std::max(abs(t0), floor_t);
        if (i == j && k == l) {
            v = taylor(x[i], t[k], 0, 0);
        } else if (!tight_x) {
            v = (self(self, i + 1, j, k, l) - self(self, i, j - 1, k, l)) / (x[j] - x[i]);
        } else if (!tight_t) {
            v = (self(self, i, j, k + 1, l) - self(self, i, j, k, l - 1)) / (t[l] - t[k]);
        } else {
            const int ox = j - i, ot = l - k;
            std::vector<T> dx, dt;
            for (int q = i; q <= j; ++q) dx.push_back(x[q] - x0);
            for (int q = k; q <= l; ++q) dt.push_back(t[q] - t0);
            const auto hx = detail::complete_homogeneous(dx, kTaylorExtraTerms);
            const auto ht = detail::complete_homogeneous(dt, kTaylorExtraTerms);
            v = T(0);
            for (int p = 0; p <= kTaylorExtraTerms; ++p)
                for (int r = 0; p + r <= kTaylorExtraTerms; ++r)
                    if (hx[p] != T(0) && ht[r] != T(0)) v += taylor(x0, t0, ox + p, ot + r) * hx[p] * ht[r];
        }
        memo[id] = v;
        done[id] = 1;
        return v;
    };
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) m(b, c) = dd(dd, 0, b, 0, c);
    return m.determinant();
}

}  // namespace svev::confluent
