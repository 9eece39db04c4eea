#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "svev/analytic.hpp"
#include "svev/deformations.hpp"
#include "svev/errors.hpp"
#include "svev/mc.hpp"
#include "svev/rng.hpp"

using namespace svev;

namespace {

constexpr double pi = std::numbers::pi;
using dvec = std::vector<double>;
using cvec = std::vector<cplx>;

double ls(cplx alpha, dvec a) { return ls_integral(alpha, std::span<const double>(a)); }
double jint(cplx alpha, int gamma, dvec a) { return group_integral_J(alpha, gamma, std::span<const double>(a)); }

MatrixFunction exp_trace_fn(cplx alpha) {
    return [alpha](const ComplexMatrix& g) { return std::exp((alpha * g.trace()).real()); };
}
MatrixFunction det_power_fn(cplx alpha, int gamma) {
    return [alpha, gamma](const ComplexMatrix& g) {
        const ComplexMatrix m = alpha * ComplexMatrix::Identity(g.rows(), g.cols()) - g;
        return std::pow(std::abs(m.determinant()), gamma);
    };
}

double phase_integral(const std::function<double(double)>& f) {
    return oracle::finite(f, 0, 2 * pi) / (2 * pi);
}

bool within(const Estimate& mc, double value, double k = 4) { return std::abs(mc.value - value) < k * mc.error; }

}  // namespace

TEST_CASE("identity deformations leave the densities unchanged") {
    const EnsembleSpec s(WeightFamily::laguerre(0.5), 2);
    const cvec z{cplx(0.3, 0.4), cplx(-1.0, 0.2)};
    const dvec a{0.6, 1.9};
    for (const Deformation& d : {Deformation::exp_trace(0.0), Deformation::det_power(cplx(0.7, 0.2), 0)}) {
        CHECK(d.is_identity());
        CHECK(deformed_density_ev(s, d, z) == doctest::Approx(density_ev(s, z)).epsilon(1e-13));
        CHECK(deformed_density_sv(s, d, a) == doctest::Approx(density_sv(s, a)).epsilon(1e-13));
    }
}

TEST_CASE("n = 1 exponential deformation of the Ginibre weight") {
    // e^{-|z|^2 + alpha Re z} normalizes to e^{-|z - alpha/2|^2} / pi
    const EnsembleSpec s(WeightFamily::laguerre(0), 1);
    const double alpha = 1.4;
    const Deformation d = Deformation::exp_trace(alpha);
    for (cplx z : {cplx(0.7, 0.0), cplx(0.2, -0.5), cplx(1.5, 1.0)}) {
        const cvec zz{z};
        CHECK(deformed_density_ev(s, d, zz) == doctest::Approx(std::exp(-std::norm(z - alpha / 2)) / pi).epsilon(1e-9));
    }
}

TEST_CASE("normalization of the exponential deformation of Ginibre") {
    // E exp(Re alpha tr g) = e^{n |alpha|^2 / 4} for i.i.d. entries with density e^{-|x|^2}/pi
    for (int n : {1, 2, 3}) {
        const cplx alpha(0.8, -0.6);
        const Normalization z = deformation_normalization(EnsembleSpec(WeightFamily::laguerre(0), n), Deformation::exp_trace(alpha));
        CHECK(z.value == doctest::Approx(std::exp(n * std::norm(alpha) / 4)).epsilon(1e-9));
    }
}

TEST_CASE("Leutwyler-Smilga integral at n = 1") {
    for (cplx alpha : {cplx(1.0), cplx(0.6, 0.8), cplx(-2.0, 0.3)})
        for (double a : {0.3, 1.0, 4.5}) {
            const double direct = phase_integral([&](double phi) { return std::exp((alpha * std::sqrt(a) * std::polar(1.0, phi)).real()); });
            CHECK(ls(alpha, {a}) == doctest::Approx(direct).epsilon(1e-10));
            CHECK(ls(alpha, {a}) == doctest::Approx(boost::math::cyl_bessel_i(0, std::abs(alpha) * std::sqrt(a))).epsilon(1e-10));
            CHECK(ls_phase_quadrature(alpha, a) == doctest::Approx(direct).epsilon(1e-10));
        }
    CHECK(ls(0.0, {1.0, 3.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ls(1e-9, {1.0, 3.0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Leutwyler-Smilga integral against Haar averages") {
    Rng rng(31, 0);
    for (cplx alpha : {cplx(1.0), cplx(0.6, 0.8)})
        for (const dvec& a : {dvec{1, 4}, dvec{0.5, 2.2}}) {
            const Estimate mc = unitary_average_mc(exp_trace_fn(alpha), a, 200000, rng);
            CHECK(within(mc, ls(alpha, a)));
            CHECK(ls_integral_bessel(alpha, a) == doctest::Approx(ls(alpha, a)).epsilon(1e-10));
        }
    // D = exp Re tr(sqrt(a) k) at a = (1, 1): MC vs tensor quadrature over U(2)
    const dvec ones{1, 1};
    const Estimate mc = unitary_average_mc(exp_trace_fn(1.0), ones, 200000, rng);
    const double quad = unitary_average_quadrature(exp_trace_fn(1.0), ones);
    CHECK(within(mc, quad));
    CHECK(quad == doctest::Approx(ls(1.0, ones)).epsilon(1e-8));
    const dvec three{0.5, 1.0, 2.0};
    CHECK(within(unitary_average_mc(exp_trace_fn(0.7), three, 200000, rng), ls(0.7, three)));
}

TEST_CASE("Leutwyler-Smilga confluence") {
    for (double t : {0.4, 2.0})
        for (cplx alpha : {cplx(1.0), cplx(0.3, 1.2)}) {
            const double at = ls(alpha, {t, t}), near = ls(alpha, {t, t + 1e-7});
            CHECK(std::abs(near - at) < 1e-6 * at);
            const double at3 = ls(alpha, {t, t, t}), near3 = ls(alpha, {t, t + 1e-7, t + 2e-7});
            CHECK(std::abs(near3 - at3) < 1e-6 * at3);
        }
}

TEST_CASE("Haar average oracle") {
    Rng rng(32, 0);
    const dvec a{0.7, 1.3};
    const Estimate one = unitary_average_mc([](const ComplexMatrix&) { return 1.0; }, a, 1000, rng);
    CHECK(one.value == 1.0);
    CHECK(one.error == 0.0);
    const cplx alpha(0.4, -0.9);
    const Estimate j1 = unitary_average_mc(det_power_fn(alpha, 2), dvec{1.6}, 100000, rng);
    CHECK(within(j1, std::norm(alpha) + 1.6));
}

TEST_CASE("group integral J") {
    CHECK(jint(cplx(0.3, 0.2), 0, {1, 2}) == 1.0);
    for (cplx alpha : {cplx(1.0), cplx(0.5, 0.7)})
        for (double a : {0.4, 2.5}) {
            CHECK(jint(alpha, 2, {a}) == doctest::Approx(std::norm(alpha) + a).epsilon(1e-12));
            for (int gamma : {1, 3, 4}) {
                const double direct =
                    phase_integral([&](double phi) { return std::pow(std::abs(alpha - std::sqrt(a) * std::polar(1.0, phi)), gamma); });
                CHECK(jint(alpha, gamma, {a}) == doctest::Approx(direct).epsilon(1e-8));
            }
        }
    Rng rng(33, 0);
    for (cplx alpha : {cplx(1.0), cplx(0.5, 0.7)})
        for (int gamma : {1, 2, 3, 4}) {
            const dvec a{1, 2};
            const Estimate mc = unitary_average_mc(det_power_fn(alpha, gamma), a, 200000, rng);
            INFO("gamma=" << gamma);
            CHECK(within(mc, jint(alpha, gamma, a)));
        }
    const dvec a3{0.5, 1.1, 2.0};
    CHECK(within(unitary_average_mc(det_power_fn(0.8, 2), a3, 200000, rng), jint(0.8, 2, a3)));
    CHECK_THROWS_AS(jint(0.8, 3, {0.5, 1.1, 2.0}), CapabilityError);
}

TEST_CASE("admissibility") {
    const EnsembleSpec cl(WeightFamily::cauchy_lorentz(0, 2), 2);
    CHECK_THROWS_AS(check_admissible(cl, Deformation::exp_trace(1.0)), ConfigError);
    CHECK_NOTHROW(check_admissible(cl, Deformation::det_power(1.0, 1)));
    CHECK_THROWS_AS(check_admissible(cl, Deformation::det_power(1.0, 2)), ConfigError);
    CHECK_NOTHROW(check_admissible(EnsembleSpec(WeightFamily::jacobi(0, 3), 3), Deformation::exp_trace(2.0)));
    CHECK_THROWS_AS(deformed_density_ev(cl, Deformation::exp_trace(1.0), cvec{0.1, 0.2}), ConfigError);
}

TEST_CASE("deformed singular value densities") {
    const EnsembleSpec l1(WeightFamily::laguerre(0.5), 1);
    const cplx alpha(0.6, 0.3);
    const Deformation d2 = Deformation::det_power(alpha, 2);
    // ratio to the undeformed density is proportional to |alpha|^2 + a
    const double r1 = deformed_density_sv(l1, d2, dvec{0.5}) / density_sv(l1, dvec{0.5});
    const double r2 = deformed_density_sv(l1, d2, dvec{2.0}) / density_sv(l1, dvec{2.0});
    CHECK(r1 / r2 == doctest::Approx((std::norm(alpha) + 0.5) / (std::norm(alpha) + 2.0)).epsilon(1e-10));
    CHECK(oracle::half_line([&](double a) { return deformed_density_sv(l1, d2, dvec{a}); }) == doctest::Approx(1.0).epsilon(1e-8));

    // n = 2, exp-trace on Ginibre: density_sv * LS / e^{n |alpha|^2 / 4}, LS by Haar Monte Carlo
    const EnsembleSpec l2(WeightFamily::laguerre(0), 2);
    const dvec a{1, 2};
    Rng rng(34, 0);
    const Estimate lsmc = unitary_average_mc(exp_trace_fn(1.0), a, 200000, rng);
    const double pref = density_sv(l2, a) / std::exp(0.5);
    const double got = deformed_density_sv(l2, Deformation::exp_trace(1.0), a);
    CHECK(std::abs(got - pref * lsmc.value) < 4 * pref * lsmc.error);

    // odd powers at n = 2: one point against the Haar oracle (a nested integral of
    // the quadrature-based J is too slow for a unit test)
    const Deformation d1 = Deformation::det_power(0.8, 1);
    const Estimate jmc = unitary_average_mc(det_power_fn(0.8, 1), a, 200000, rng);
    const double pref1 = density_sv(l2, a) / deformation_normalization(l2, d1).value;
    CHECK(std::abs(deformed_density_sv(l2, d1, a) - pref1 * jmc.value) < 4 * pref1 * jmc.error);

    for (const Deformation& d : {Deformation::exp_trace(cplx(0.5, 0.5)), Deformation::det_power(0.8, 2)}) {
        auto inner = [&](double x) { return oracle::half_line([&](double y) { return deformed_density_sv(l2, d, dvec{x, y}); }); };
        INFO(d.describe());
        CHECK(oracle::half_line(inner) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("deformed eigenvalue density is real-symmetric for even powers and real alpha") {
    const EnsembleSpec s(WeightFamily::laguerre(1), 2);
    const Deformation d = Deformation::det_power(0.9, 2);
    Rng rng(35, 0);
    for (int i = 0; i < 20; ++i) {
        const cvec z{rng.complex_normal(), rng.complex_normal()};
        const cvec zc{std::conj(z[0]), std::conj(z[1])};
        const double v = deformed_density_ev(s, d, z);
        CHECK(std::abs(deformed_density_ev(s, d, zc) - v) <= 1e-12 * v);
    }
}

TEST_CASE("deformed radial densities have unit mass") {
    for (int n : {1, 2}) {
        for (const auto& w : {WeightFamily::laguerre(0), WeightFamily::jacobi(0, 3)}) {
            const EnsembleSpec s(w, n);
            for (const Deformation& d :
                 {Deformation::exp_trace(cplx(1.2, 0.4)), Deformation::det_power(1.0, 1), Deformation::det_power(cplx(0.3, 0.5), 2)}) {
                const double up = w.support_upper();
                auto f = [&](double t) { return deformed_radial_density_sq(s, d, t); };
                const double mass = std::isfinite(up) ? oracle::finite(f, 0, up) : oracle::half_line(f);
                INFO(w.name() << " n=" << n << " " << d.describe());
                CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("reweighted samples follow the deformed radial law") {
    // Undeformed Ginibre pool, resampled with weights prod h(z_j); one eigenvalue
    // per matrix so the radii are independent.
    const EnsembleSpec spec(WeightFamily::laguerre(0), 2);
    SamplePlan plan{spec, 50000, SamplerKind::direct, {}, 17, 1, std::nullopt};
    const auto records = spectral_pipeline(plan);
    for (const Deformation& d : {Deformation::det_power(cplx(0.8, 0.3), 2), Deformation::exp_trace(0.9)}) {
        std::vector<double> w;
        for (const auto& r : records) {
            double p = 1;
            for (cplx z : r.ev.values) p *= d.factor(z);
            w.push_back(p);
        }
        std::vector<double> cum(w.size());
        std::partial_sum(w.begin(), w.end(), cum.begin());
        Rng rng(36, 0);
        const int m = 1000;
        std::vector<double> t;
        for (int i = 0; i < m; ++i) {
            const double u = rng.uniform() * cum.back();
            const auto k = std::size_t(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            const auto& ev = records[k].ev.values;
            t.push_back(std::norm(ev[std::size_t(rng.uniform() * double(ev.size()))]));
        }
        std::sort(t.begin(), t.end());
        double cdf = 0, prev = 0, dmax = 0;
        for (int i = 0; i < m; ++i) {
            cdf += oracle::finite([&](double x) { return deformed_radial_density_sq(spec, d, x); }, prev, t[i]);
            prev = t[i];
            dmax = std::max({dmax, std::abs(cdf - double(i) / m), std::abs(cdf - double(i + 1) / m)});
        }
        INFO(d.describe() << " D=" << dmax);
        CHECK(dmax < 1.628 / std::sqrt(double(m)));
    }
}
