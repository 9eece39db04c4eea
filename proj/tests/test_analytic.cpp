#include <doctest.h>

#include <boost/math/special_functions/laguerre.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "svev/analytic.hpp"
#include "svev/errors.hpp"
#include "svev/rng.hpp"

using namespace svev;

namespace {

constexpr double pi = std::numbers::pi;

using dvec = std::vector<double>;
using cvec = std::vector<cplx>;

double dsv(const EnsembleSpec& s, dvec a) { return density_sv(s, std::span<const double>(a)); }
double dev(const EnsembleSpec& s, cvec z) { return density_ev(s, std::span<const cplx>(z)); }

// int over the plane of a radially symmetric function given as f(t), t = |z|^2
double plane_radial(const std::function<double(double)>& f, double upper) {
    if (std::isfinite(upper)) return pi * oracle::finite(f, 0, upper);
    return pi * oracle::half_line(f);
}

// int over the plane, angular part by the trapezoid rule (exact for low-degree trig polynomials)
cplx plane(const std::function<cplx(cplx)>& f, double upper) {
    const int m = 64;
    auto ang = [&](double t) {
        cplx s = 0;
        for (int k = 0; k < m; ++k) s += f(std::polar(std::sqrt(t), 2 * pi * k / m));
        return s / double(m);
    };
    auto re = [&](double t) { return ang(t).real(); };
    auto im = [&](double t) { return ang(t).imag(); };
    return {plane_radial(re, upper), plane_radial(im, upper)};
}

double line(const EnsembleSpec& s, const std::function<double(double)>& f) {
    const double up = s.family().support_upper();
    return std::isfinite(up) ? oracle::finite(f, 0, up) : oracle::half_line(f);
}

}  // namespace

TEST_CASE("normalization constants") {
    CHECK(norm_const_ev(EnsembleSpec(WeightFamily::laguerre(0), 1)) == doctest::Approx(1 / pi).epsilon(1e-14));
    CHECK(norm_const_ev(EnsembleSpec(WeightFamily::laguerre(0), 2)) == doctest::Approx(1 / (2 * pi * pi)).epsilon(1e-14));
    CHECK(norm_const_ev(EnsembleSpec(WeightFamily::jacobi(0, 1), 1)) == doctest::Approx(1 / pi).epsilon(1e-14));
    CHECK(norm_const_sv(EnsembleSpec(WeightFamily::laguerre(0), 2)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(norm_const_sv(EnsembleSpec(WeightFamily::laguerre(1), 2)) == doctest::Approx(0.25).epsilon(1e-14));
    const WeightFamily cl = WeightFamily::cauchy_lorentz(0.5, 3.5);
    CHECK(norm_const_sv(EnsembleSpec(cl, 1)) == doctest::Approx(1 / mellin_weight(cl, 1.0).real()).epsilon(1e-14));
}

TEST_CASE("constant identity between eigenvalue and singular value normalizations") {
    for (const auto& w : {WeightFamily::laguerre(0.3), WeightFamily::jacobi(0.5, 4), WeightFamily::cauchy_lorentz(0, 6),
                          WeightFamily::muttalib_borodin(0, 1.5, 0.8)}) {
        for (int n = 1; n <= 4; ++n) {
            const EnsembleSpec s(w, n);
            double f = 1;
            for (int j = 0; j < n; ++j) f *= std::tgamma(j + 1.0) / pi;
            CHECK(norm_const_ev(s) == doctest::Approx(norm_const_sv(s) * f).epsilon(1e-12));
        }
    }
}

TEST_CASE("singular value density examples") {
    const EnsembleSpec l2(WeightFamily::laguerre(0), 2);
    // (a2 - a1)^2 e^{-a1-a2} / 2 by expanding the 2x2 determinant
    CHECK(dsv(l2, {1, 2}) == doctest::Approx(0.5 * std::exp(-3.0)).epsilon(1e-13));
    CHECK(dsv(l2, {1, 2}) == doctest::Approx(0.02489).epsilon(1e-4));
    CHECK(dsv(l2, {0.4, 3.1}) == doctest::Approx(0.5 * 2.7 * 2.7 * std::exp(-3.5)).epsilon(1e-13));
    CHECK(dsv(l2, {1.5, 1.5}) == 0.0);
    CHECK(dsv(EnsembleSpec(WeightFamily::laguerre(0), 1), {2}) == doctest::Approx(std::exp(-2.0)));
    CHECK_THROWS_AS(dsv(l2, {-1, 2}), DomainError);
}

TEST_CASE("singular value density integrates to one") {
    for (const auto& w : {WeightFamily::laguerre(1), WeightFamily::jacobi(0.5, 2.5), WeightFamily::cauchy_lorentz(0, 5)}) {
        const EnsembleSpec s(w, 2);
        auto inner = [&](double a1) { return line(s, [&](double a2) { return dsv(s, {a1, a2}); }); };
        INFO(w.name());
        CHECK(line(s, inner) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("eigenvalue density examples") {
    const EnsembleSpec l1(WeightFamily::laguerre(0), 1), l2(WeightFamily::laguerre(0), 2);
    CHECK(dev(l1, {0.0}) == doctest::Approx(1 / pi));
    CHECK(dev(l2, {cplx(0.3, 0.2), cplx(0.3, 0.2)}) == 0.0);
    CHECK(dev(l2, {0.0, 1.0}) == doctest::Approx(std::exp(-1.0) / (2 * pi * pi)).epsilon(1e-13));
    Rng rng(2, 0);
    const EnsembleSpec c3(WeightFamily::cauchy_lorentz(0.5, 4), 3);
    for (int i = 0; i < 100; ++i) {
        cvec z{rng.complex_normal(), rng.complex_normal(), rng.complex_normal()};
        CHECK(dev(c3, z) >= 0.0);
    }
}

TEST_CASE("matrix density") {
    const EnsembleSpec l1(WeightFamily::laguerre(0), 1);
    ComplexMatrix x(1, 1);
    x(0, 0) = cplx(0.6, -0.9);
    CHECK(density_matrix(l1, x) == doctest::Approx(std::exp(-std::norm(x(0, 0))) / pi).epsilon(1e-13));

    const EnsembleSpec l2(WeightFamily::laguerre(0), 2);
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 1;
    d(1, 1) = 2;
    CHECK(density_matrix(l2, d) == doctest::Approx(density_matrix_trace_ratio(l2, d)).epsilon(1e-10));

    // Ginibre: the density depends on tr g*g alone
    Rng rng(6, 1);
    for (int n : {2, 3}) {
        const EnsembleSpec s(WeightFamily::laguerre(0), n);
        const ComplexMatrix g = sample_ginibre(n, rng), h = sample_ginibre(n, rng);
        const double ratio = density_matrix(s, g) / density_matrix(s, h);
        CHECK(ratio == doctest::Approx(std::exp(h.squaredNorm() - g.squaredNorm())).epsilon(1e-10));
        CHECK(density_matrix(s, g) == doctest::Approx(density_matrix_trace_ratio(s, g)).epsilon(1e-10));
        const ComplexMatrix u = sample_haar_unitary(n, rng);
        CHECK(density_matrix(s, u) == doctest::Approx(density_matrix(s, ComplexMatrix::Identity(n, n))).epsilon(1e-10));
    }
    const EnsembleSpec j2(WeightFamily::jacobi(0.5, 4), 2);
    ComplexMatrix g = 0.4 * sample_ginibre(2, rng);
    CHECK(density_matrix(j2, g) == doctest::Approx(density_matrix_trace_ratio(j2, g)).epsilon(1e-10));
}

TEST_CASE("eigenvalue kernel examples") {
    for (int n : {1, 2, 4})
        CHECK(kernel_ev(EnsembleSpec(WeightFamily::laguerre(0), n), 0.0, 0.0).real() == doctest::Approx(1 / pi));
    const WeightFamily j = WeightFamily::jacobi(0.5, 2);
    const cplx z(0.3, 0.4);
    CHECK(kernel_ev(EnsembleSpec(j, 1), z, z).real() ==
          doctest::Approx(eval_weight(j, 0.25) / (pi * mellin_weight(j, 1.0).real())));
    CHECK(kernel_ev(EnsembleSpec(WeightFamily::laguerre(0), 2), 1.0, 1.0).real() ==
          doctest::Approx(2 / (std::exp(1.0) * pi)));
}

TEST_CASE("monomials are orthogonal for radial weights") {
    for (const auto& w : {WeightFamily::laguerre(2.5), WeightFamily::jacobi(0, 3), WeightFamily::cauchy_lorentz(0, 8)}) {
        const double up = w.support_upper();
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                const cplx v = plane([&](cplx z) { return std::pow(z, i) * std::pow(std::conj(z), k) * eval_weight(w, std::norm(z)); }, up);
                const double expect = i == k ? pi * mellin_weight(w, k + 1.0).real() : 0.0;
                CHECK(std::abs(v - expect) < 1e-8);
            }
    }
}

TEST_CASE("eigenvalue kernel reproduces itself") {
    for (const auto& w : {WeightFamily::laguerre(0), WeightFamily::jacobi(0.5, 3)}) {
        const EnsembleSpec s(w, 3);
        const double up = w.support_upper();
        const cplx z1(0.3, 0.1), z2(-0.2, 0.45);
        const cplx lhs = plane([&](cplx z) { return kernel_ev(s, z1, z) * kernel_ev(s, z, z2); }, up);
        CHECK(std::abs(lhs - kernel_ev(s, z1, z2)) < 1e-6);
        const cplx tr = plane([&](cplx z) { return kernel_ev(s, z, z); }, up);
        CHECK(std::abs(tr - 3.0) < 1e-6);
    }
}

TEST_CASE("polynomial p examples") {
    const EnsembleSpec l(WeightFamily::laguerre(0), 3);
    CHECK(poly_p(l, 0, 0.7) == 1.0);
    CHECK(std::abs(poly_p(l, 1, 1.0)) < 1e-14);
    CHECK(poly_p(l, 2, 0.0) == doctest::Approx(2.0));
}

TEST_CASE("p_l are the monic Laguerre polynomials") {
    for (unsigned m : {0u, 1u, 3u}) {
        const EnsembleSpec s(WeightFamily::laguerre(m), 6);
        for (int l = 0; l < 6; ++l)
            for (double a : {0.1, 1.3, 4.2}) {
                const double monic = (l % 2 ? -1 : 1) * std::tgamma(l + 1.0) * boost::math::laguerre(unsigned(l), m, a);
                CHECK(poly_p(s, l, a) == doctest::Approx(monic).epsilon(1e-11));
            }
    }
}

TEST_CASE("function q examples and derivative oracle") {
    const WeightFamily l0w = WeightFamily::laguerre(0);
    const EnsembleSpec l0(l0w, 3);
    CHECK(func_q(l0, 0, 1.3) == doctest::Approx(std::exp(-1.3)));
    CHECK(std::abs(func_q(l0, 1, 1.0)) < 1e-14);
    for (const auto& w : {WeightFamily::laguerre(1.5), WeightFamily::cauchy_lorentz(0, 4), WeightFamily::jacobi(0.5, 3.5)}) {
        const EnsembleSpec s(w, 3);
        for (double a : {0.3, 0.7}) {
            auto g1 = [&](double x) { return -x * eval_weight(w, x); };
            auto g2 = [&](double x) { return x * x * eval_weight(w, x); };
            auto dg2 = [&](double x) { return oracle::deriv(g2, x, 1e-3); };
            const double q1 = oracle::deriv(g1, a, 1e-3) / mellin_weight(w, 2.0).real();
            const double q2 = oracle::deriv(dg2, a, 1e-3) / (2 * mellin_weight(w, 3.0).real());
            INFO(w.name() << " a=" << a);
            CHECK(func_q(s, 1, a) == doctest::Approx(q1).epsilon(1e-7));
            CHECK(func_q(s, 2, a) == doctest::Approx(q2).epsilon(1e-5));
            const auto all = func_q_all(s, 2, a);
            CHECK(all[1] == doctest::Approx(func_q(s, 1, a)).epsilon(1e-13));
        }
    }
}

TEST_CASE("biorthogonality") {
    const std::vector<WeightFamily> fams{WeightFamily::laguerre(0), WeightFamily::laguerre(1), WeightFamily::laguerre(2.5),
                                         WeightFamily::jacobi(0, 3), WeightFamily::jacobi(0, 5)};
    for (const auto& w : fams) {
        const int n = 6;
        const EnsembleSpec s(w, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = line(s, [&](double a) { return poly_p(s, i, a) * func_q(s, j, a); });
                v += edge_pairing(s, i, func_q_edge_atoms(s, j));
                INFO(w.name() << " mu=" << w.mu << " i=" << i << " j=" << j);
                CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) < 1e-8);
            }
    }
}

TEST_CASE("singular value kernel") {
    const EnsembleSpec l1(WeightFamily::laguerre(0), 1);
    CHECK(kernel_sv(l1, 0.8, 1.9) == doctest::Approx(std::exp(-1.9)));
    const EnsembleSpec l2(WeightFamily::laguerre(0), 2);
    const double d = kernel_sv(l2, 1, 1, KernelRep::direct);
    CHECK(kernel_sv(l2, 1, 1, KernelRep::integral) == doctest::Approx(d).epsilon(1e-6));
    CHECK(kernel_sv(l2, 1, 1, KernelRep::from_ev) == doctest::Approx(d).epsilon(1e-6));

    for (const auto& w : {WeightFamily::laguerre(0.5), WeightFamily::jacobi(0, 3), WeightFamily::cauchy_lorentz(0.5, 6)}) {
        const EnsembleSpec s(w, 3);
        for (double a : {0.2, 0.6})
            for (double b : {0.35, 0.9}) {
                const double ref = kernel_sv(s, a, b, KernelRep::direct);
                INFO(w.name() << " a=" << a << " b=" << b);
                CHECK(std::abs(kernel_sv(s, a, b, KernelRep::integral) - ref) < 1e-6 * std::max(1.0, std::abs(ref)));
                CHECK(std::abs(kernel_sv(s, a, b, KernelRep::from_ev) - ref) < 1e-6 * std::max(1.0, std::abs(ref)));
            }
    }
}

TEST_CASE("trace of the singular value kernel is n") {
    for (const auto& w : {WeightFamily::laguerre(0), WeightFamily::laguerre(2.5), WeightFamily::jacobi(0, 5),
                          WeightFamily::cauchy_lorentz(0, 6)}) {
        for (int n : {1, 2, 3}) {
            const EnsembleSpec s(w, n);
            INFO(w.name() << " n=" << n);
            CHECK(line(s, [&](double a) { return kernel_sv(s, a, a); }) == doctest::Approx(double(n)).epsilon(1e-6));
        }
    }
}

TEST_CASE("level densities") {
    const EnsembleSpec l1(WeightFamily::laguerre(0), 1);
    const cplx z(0.5, -0.7);
    CHECK(level_density_ev(l1, z) == doctest::Approx(std::exp(-std::norm(z)) / pi));
    CHECK(level_density_sv(l1, 1.7) == doctest::Approx(std::exp(-1.7)));
    for (const auto& w : {WeightFamily::laguerre(0), WeightFamily::jacobi(0, 3), WeightFamily::cauchy_lorentz(0.5, 4),
                          WeightFamily::muttalib_borodin(0, 1, 1.5)}) {
        for (int n : {2, 3}) {
            const EnsembleSpec s(w, n);
            INFO(w.name() << " n=" << n);
            CHECK(line(s, [&](double a) { return level_density_sv(s, a); }) == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(plane_radial([&](double t) { return level_density_ev(s, std::sqrt(t)); }, w.support_upper()) ==
                  doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("radial density") {
    const EnsembleSpec l1(WeightFamily::laguerre(0), 1), l2(WeightFamily::laguerre(0), 2);
    for (double t : {0.0, 0.4, 2.2}) {
        CHECK(radial_density_sq(l1, t) == doctest::Approx(std::exp(-t)));
        CHECK(radial_density_sq(l2, t) == doctest::Approx(std::exp(-t) * (1 + t) / 2));
    }
    CHECK(radial_density_sq(l2, 0.0) == doctest::Approx(0.5));
    for (const auto& w : {WeightFamily::laguerre(1), WeightFamily::jacobi(0, 4), WeightFamily::cauchy_lorentz(0, 5)}) {
        const EnsembleSpec s(w, 3);
        CHECK(line(s, [&](double t) { return radial_density_sq(s, t); }) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("correlation functions") {
    const EnsembleSpec l2(WeightFamily::laguerre(0), 2);
    const dvec one{1.3};
    CHECK(correlation_sv(l2, std::span<const double>(one)) == doctest::Approx(2 * level_density_sv(l2, 1.3)));
    const cvec onez{cplx(0.2, 0.9)};
    CHECK(correlation_ev(l2, std::span<const cplx>(onez)) == doctest::Approx(2 * level_density_ev(l2, onez[0])));
    const dvec same{0.7, 0.7};
    CHECK(std::abs(correlation_sv(l2, std::span<const double>(same))) < 1e-15);
    const cvec samez{cplx(0.1, 0.2), cplx(0.1, 0.2)};
    CHECK(std::abs(correlation_ev(l2, std::span<const cplx>(samez))) < 1e-15);
    const dvec pts{1, 2};
    CHECK(correlation_sv(l2, std::span<const double>(pts)) == doctest::Approx(2 * dsv(l2, {1, 2})).epsilon(1e-12));
    const cvec ptz{0.0, 1.0};
    CHECK(correlation_ev(l2, std::span<const cplx>(ptz)) == doctest::Approx(2 * dev(l2, {0.0, 1.0})).epsilon(1e-12));
}

TEST_CASE("symmetric and asymmetric kernels give the same correlations") {
    const EnsembleSpec s(WeightFamily::cauchy_lorentz(0.5, 5), 3);
    const cvec z{cplx(0.3, 0.1), cplx(-0.8, 0.5), cplx(0.2, -1.1)};
    for (int k : {2, 3}) {
        ComplexMatrix ms(k, k), ma(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                ms(i, j) = kernel_ev(s, z[i], z[j], KernelForm::symmetric);
                ma(i, j) = kernel_ev(s, z[i], z[j], KernelForm::asymmetric);
            }
        CHECK(std::abs(ms.determinant() - ma.determinant()) < 1e-12 * std::abs(ms.determinant()));
    }
}

TEST_CASE("q series") {
    const EnsembleSpec l(WeightFamily::laguerre(0), 2);
    for (double phi : {0.0, 0.9, 2.5, 4.0}) {
        const cplx z = std::polar(1.0, phi);
        CHECK(std::abs(q_series(l, z, 1.0, 0, 40) - std::exp(z)) < 1e-10);
        CHECK(std::abs(q_series_closed(l, z, 1.0) - std::exp(z)) < 1e-10);
    }
    const EnsembleSpec j(WeightFamily::jacobi(0, 1), 2);
    CHECK(std::abs(q_series(j, 0.1, 0.5, 0, 200) - 1 / (0.95 * 0.95)) < 1e-12);
    CHECK(std::abs(q_series_closed(j, 0.1, 0.5) - 1 / (0.95 * 0.95)) < 1e-12);
    const WeightFamily c = WeightFamily::cauchy_lorentz(1, 4);
    CHECK(std::abs(q_series(EnsembleSpec(c, 2), 0.3, 1.0, 0, 0) - 1.0 / mellin_weight(c, 1.0).real()) < 1e-14);
    for (const auto& w : {WeightFamily::laguerre(2), WeightFamily::jacobi(1, 3), WeightFamily::cauchy_lorentz(1, 4)}) {
        const EnsembleSpec s(w, 2);
        // 1/M grows like j^mu for Jacobi, so the unit circle needs r0 < 1 there
        for (double r0 : {0.5, w.kind == WeightKind::Jacobi ? 0.8 : 1.0}) {
            const auto [lo, hi] = q_series_range(s, r0);
            for (double phi : {0.3, 2.0}) {
                const cplx z = std::polar(1.0, phi);
                const cplx closed = q_series_closed(s, z, r0);
                CHECK(std::abs(q_series(s, z, r0, lo, hi) - closed) < 1e-10 * std::max(1.0, std::abs(closed)));
            }
        }
    }
}

TEST_CASE("polynomials recovered from the eigenvalue kernel") {
    const EnsembleSpec l(WeightFamily::laguerre(0), 3);
    CHECK(poly_p_via_series(l, 0, 0.4, 1.0) == doctest::Approx(1.0));
    CHECK(std::abs(poly_p_via_series(l, 1, 1.0, 1.0)) < 1e-10);
    CHECK(poly_p_via_series(l, 2, 0.0, 1.0) == doctest::Approx(2.0));
    CHECK(poly_p_from_kernel(l, 0, 0.9) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(func_q_from_kernel(l, 0, 0.9) == doctest::Approx(std::exp(-0.9)).epsilon(1e-8));
    CHECK(std::abs(poly_p_from_kernel(l, 1, 1.0)) < 1e-8);
    const EnsembleSpec j(WeightFamily::jacobi(0, 3), 2);
    CHECK(poly_p_from_kernel(j, 1, 0.5) == doctest::Approx(poly_p(j, 1, 0.5)).epsilon(1e-6));
    CHECK(func_q_from_kernel(j, 1, 0.5) == doctest::Approx(func_q(j, 1, 0.5)).epsilon(1e-6));
    const EnsembleSpec c(WeightFamily::cauchy_lorentz(0, 6), 3);
    for (int k = 0; k < 3; ++k) CHECK(poly_p_via_series(c, k, 0.8, 1.0) == doctest::Approx(poly_p(c, k, 0.8)).epsilon(1e-8));
}

TEST_CASE("spectral shifts") {
    for (int n = 1; n <= 5; ++n) {
        const SpectralShift s = SpectralShift::of(n);
        double sum = 0;
        for (int j = 0; j < n; ++j) {
            sum += s.rho[j];
            CHECK(s.rho_prime[j] == doctest::Approx((2.0 * (j + 1) + n - 1) / 2));
        }
        CHECK(std::abs(sum) < 1e-14);
    }
}

TEST_CASE("extended strip requirement") {
    // Cauchy-Lorentz with mu = 2 converges only for Re s < 3
    const EnsembleSpec s(WeightFamily::cauchy_lorentz(0, 2), 2);
    CHECK_FALSE(s.has_extended_strip());
    CHECK_THROWS(s.require_extended_strip("test"));
    CHECK(EnsembleSpec(WeightFamily::cauchy_lorentz(0, 2.5), 2).has_extended_strip());
}
