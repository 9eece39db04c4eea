#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "svev/analytic.hpp"
#include "svev/errors.hpp"
#include "svev/mc.hpp"
#include "svev/rng.hpp"

using namespace svev;

namespace {

SamplePlan plan_for(const WeightFamily& w, int n, long count, std::uint64_t seed,
                    SamplerKind sampler = SamplerKind::direct) {
    SamplePlan p{EnsembleSpec(w, n), count, sampler, {}, seed, 1, std::nullopt};
    return p;
}

// CDF of |z|^2 for Ginibre n = 2: p_t = e^{-t}(1+t)/2
double ginibre2_cdf(double t) { return 1.0 - std::exp(-t) * (1.0 + t / 2.0); }

std::vector<double> ginibre2_cdf_sorted(std::span<const double> t) {
    std::vector<double> out;
    for (double x : t) out.push_back(ginibre2_cdf(x));
    return out;
}

// mixture of Exp(1) and Gamma(2, 1) with equal weights
double draw_ginibre2_radius(Rng& rng) {
    double t = -std::log(rng.uniform());
    if (rng.uniform() < 0.5) t -= std::log(rng.uniform());
    return t;
}

}  // namespace

TEST_CASE("name parsing") {
    CHECK(sampler_from_name("direct") == SamplerKind::direct);
    CHECK(sampler_from_name("mcmc") == SamplerKind::mcmc);
    CHECK(assembly_from_name("two-sided") == AssemblyMode::two_sided);
    CHECK(assembly_from_name("left-fixed") == AssemblyMode::left_fixed);
    CHECK(assembly_from_name("right-fixed") == AssemblyMode::right_fixed);
    CHECK_THROWS_AS(sampler_from_name("gibbs"), ConfigError);
    CHECK_THROWS_AS(assembly_from_name("diagonal"), ConfigError);
    for (auto m : {AssemblyMode::two_sided, AssemblyMode::left_fixed, AssemblyMode::right_fixed})
        CHECK(assembly_from_name(to_string(m)) == m);
}

TEST_CASE("direct sampler availability") {
    CHECK(direct_available(plan_for(WeightFamily::laguerre(2), 3, 1, 1)));
    CHECK_FALSE(direct_available(plan_for(WeightFamily::laguerre(0.5), 3, 1, 1)));
    CHECK(direct_available(plan_for(WeightFamily::jacobi(0, 3), 3, 1, 1)));
    CHECK_FALSE(direct_available(plan_for(WeightFamily::jacobi(0, 2.5), 2, 1, 1)));
    CHECK_FALSE(direct_available(plan_for(WeightFamily::cauchy_lorentz(0, 3), 2, 1, 1)));
    CHECK_THROWS_AS(sample_sv(plan_for(WeightFamily::cauchy_lorentz(0, 3), 2, 10, 1)), ConfigError);
}

TEST_CASE("Ginibre squared singular values have E sum a = n^2") {
    const auto draws = sample_sv(plan_for(WeightFamily::laguerre(0), 2, 100000, 3));
    double s = 0, s2 = 0;
    for (const auto& a : draws) {
        const double t = a[0] + a[1];
        s += t;
        s2 += t * t;
    }
    const double m = s / draws.size(), se = std::sqrt((s2 / draws.size() - m * m) / draws.size());
    CHECK(std::abs(m - 4.0) < 4 * se);
    for (const auto& a : draws) REQUIRE(a[0] >= a[1]);
}

TEST_CASE("direct and MCMC samplers agree") {
    const WeightFamily w = WeightFamily::laguerre(1);
    const auto direct = sample_sv(plan_for(w, 2, 100000, 5));
    const auto chain = sample_sv(plan_for(w, 2, 100000, 5, SamplerKind::mcmc));
    auto sums = [](const std::vector<std::vector<double>>& d) {
        std::vector<std::vector<double>> g;
        for (const auto& a : d) g.push_back({a[0] + a[1]});
        return g;
    };
    const GofResult r = ks_two_sample(sums(direct), sums(chain), 7, 300);
    INFO("D=" << r.value << " critical=" << r.critical);
    CHECK(r.pass);
}

TEST_CASE("Jacobi corner model stays in the unit interval") {
    SamplePlan p = plan_for(WeightFamily::jacobi(0, 3), 2, 20000, 9);
    p.haar_size = 6;
    for (const auto& a : sample_sv(p))
        for (double x : a) {
            REQUIRE(x >= 0.0);
            REQUIRE(x <= 1.0);
        }
}

TEST_CASE("MCMC diagnostics") {
    for (const auto& w : {WeightFamily::laguerre(0.5), WeightFamily::cauchy_lorentz(0, 3), WeightFamily::muttalib_borodin(0, 1, 1.5)}) {
        Rng rng(11, 0);
        McmcDiagnostics diag;
        McmcOptions opt;
        opt.burn_in = 5000;
        const auto draws = mcmc_chain(EnsembleSpec(w, 2), 2000, opt, rng, &diag);
        CHECK(draws.size() == 2000);
        CHECK(diag.sign_violations == 0);
        CHECK(diag.acceptance >= 0.05);
        CHECK(diag.acceptance <= 0.8);
        CHECK(diag.thinning >= 1);
        CHECK(diag.thinning <= 100);
    }
    // no adaptation and an absurd step: the chain freezes and is rejected
    Rng rng(12, 0);
    McmcOptions bad;
    bad.burn_in = 0;
    bad.scale = 60.0;
    bad.thinning = 1;
    CHECK_THROWS_AS(mcmc_chain(EnsembleSpec(WeightFamily::laguerre(0), 2), 2000, bad, rng), NumericError);
}

TEST_CASE("assembled matrices") {
    Rng rng(13, 0);
    const std::vector<double> a{3.0, 1.2, 0.4};
    const ComplexMatrix g = assemble_matrix(a, rng, AssemblyMode::two_sided);
    const auto sv = squared_singular_values(g).real_values();
    for (int j = 0; j < 3; ++j) CHECK(std::abs(sv[j] - a[j]) < 1e-10);
    const std::vector<double> ones{1, 1, 1};
    for (auto m : {AssemblyMode::two_sided, AssemblyMode::left_fixed, AssemblyMode::right_fixed}) {
        const ComplexMatrix u = assemble_matrix(ones, rng, m);
        for (cplx z : eigenvalues(u).values) CHECK(std::abs(std::abs(z) - 1.0) < 1e-10);
        const auto s = squared_singular_values(assemble_matrix(a, rng, m)).real_values();
        for (int j = 0; j < 3; ++j) CHECK(std::abs(s[j] - a[j]) < 1e-10);
    }
}

TEST_CASE("spectral pipeline invariants") {
    const auto one = spectral_pipeline(plan_for(WeightFamily::laguerre(0), 1, 2000, 14));
    for (const auto& r : one) CHECK(std::abs(std::norm(r.ev.values[0]) - r.sv.values[0].real()) < 1e-10 * (1 + r.sv.values[0].real()));

    PipelineStats stats;
    const auto four = spectral_pipeline(plan_for(WeightFamily::laguerre(0), 4, 10000, 15), AssemblyMode::two_sided, &stats);
    CHECK(four.size() == 10000);
    long weyl1 = 0;
    for (const auto& r : four) weyl1 += r.sv.values[0].real() * (1 + 1e-12) >= std::norm(r.ev.values[0]);
    CHECK(weyl1 == 10000);
    CHECK(stats.worst_det_defect < 1e-10);
}

TEST_CASE("output does not depend on the thread count") {
    SamplePlan p = plan_for(WeightFamily::laguerre(0), 3, 3500, 21);
    const auto a = sample_sv(p);
    p.threads = 3;
    CHECK(sample_sv(p) == a);
    p.seed = 22;
    CHECK(sample_sv(p) != a);

    SamplePlan q = plan_for(WeightFamily::cauchy_lorentz(0, 4), 2, 2500, 23, SamplerKind::mcmc);
    q.mcmc.burn_in = 2000;
    const auto b = sample_sv(q);
    q.threads = 2;
    CHECK(sample_sv(q) == b);
}

TEST_CASE("radial CDF") {
    const EnsembleSpec s(WeightFamily::laguerre(0), 2);
    std::vector<double> t{0.0, 0.1, 0.7, 1.9, 5.0, 12.0};
    const auto c = radial_cdf_sorted(s, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(c[i] == doctest::Approx(ginibre2_cdf(t[i])).epsilon(1e-10));
        CHECK(radial_cdf(s, t[i]) == doctest::Approx(ginibre2_cdf(t[i])).epsilon(1e-10));
    }
    // a family without a closed form goes through cumulative quadrature
    const EnsembleSpec c2(WeightFamily::cauchy_lorentz(0.5, 4), 2);
    const std::vector<double> u{0.2, 0.9, 3.0};
    const auto cu = radial_cdf_sorted(c2, u);
    CHECK(cu[0] < cu[1]);
    CHECK(cu[1] < cu[2]);
    CHECK(cu[2] < 1.0);
    CHECK(radial_cdf(c2, 1e12) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("bootstrap KS calibration on exact draws") {
    // 100 data sets of 500 pairs drawn from p_t itself: about 1 % should fail
    int fails = 0, below_half = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Rng rng(500 + rep, 0);
        std::vector<std::vector<double>> groups(500);
        for (auto& g : groups) g = {draw_ginibre2_radius(rng), draw_ginibre2_radius(rng)};
        const GofResult r = ks_one_sample(groups, ginibre2_cdf_sorted, 9000 + rep, 1000);
        fails += !r.pass;
        below_half += r.p_boot < 0.5;
    }
    INFO("fails=" << fails << " p<0.5: " << below_half);
    CHECK(fails <= 5);
    CHECK(below_half >= 35);
    CHECK(below_half <= 65);
}

TEST_CASE("radial goodness of fit") {
    const EnsembleSpec l2(WeightFamily::laguerre(0), 2);
    const auto recs = spectral_pipeline(plan_for(WeightFamily::laguerre(0), 2, 20000, 31));
    const GofResult ok = gof_radial(recs, l2, 32, 500);
    INFO("D=" << ok.value << " crit=" << ok.critical);
    CHECK(ok.pass);
    CHECK(ok.sample_size == 40000);
    CHECK(ok.asymptotic_critical == doctest::Approx(1.628 / std::sqrt(40000.0)));
    const GofResult bad = gof_radial(recs, EnsembleSpec(WeightFamily::laguerre(2), 2), 33, 500);
    CHECK_FALSE(bad.pass);

    // MCMC-only family end to end
    const EnsembleSpec c2(WeightFamily::cauchy_lorentz(0, 4), 2);
    SamplePlan p = plan_for(WeightFamily::cauchy_lorentz(0, 4), 2, 5000, 34, SamplerKind::mcmc);
    const GofResult c = gof_radial(spectral_pipeline(p), c2, 35, 500);
    INFO("Cauchy D=" << c.value << " crit=" << c.critical);
    CHECK(c.pass);
}

TEST_CASE("assembly modes give the same eigenvalue law") {
    const SamplePlan p = plan_for(WeightFamily::laguerre(0), 2, 20000, 41);
    const auto x = squared_radii(spectral_pipeline(p, AssemblyMode::two_sided));
    SamplePlan q = p;
    q.seed = 42;
    const auto y = squared_radii(spectral_pipeline(q, AssemblyMode::left_fixed));
    const GofResult r = ks_two_sample(x, y, 43, 300);
    CHECK(r.pass);
}

TEST_CASE("Freedman-Diaconis histogram") {
    std::vector<double> v;
    for (int i = 1; i <= 1000; ++i) v.push_back(i);
    const Histogram h = histogram_fd(v);
    // IQR about 500, width 2 * 500 / 10 = 100 over a range of 999
    CHECK(h.counts.size() == 10);
    long total = 0;
    for (long c : h.counts) total += c;
    CHECK(total == 1000);
    for (std::size_t i = 1; i < h.edges.size(); ++i) CHECK(h.edges[i] > h.edges[i - 1]);
    CHECK(h.edges.front() == 1.0);
    CHECK(h.edges.back() == doctest::Approx(1000.0));
}
