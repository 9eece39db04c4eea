#include "svev/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "svev/analytic.hpp"
#include "svev/deformations.hpp"
#include "svev/errors.hpp"
#include "svev/mc.hpp"
#include "svev/quadrature.hpp"
#include "svev/special.hpp"
#include "svev/transforms.hpp"

namespace svev {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::map<std::string, double> family_params(const WeightFamily& w) {
    std::map<std::string, double> p;
    switch (w.kind) {
        case WeightKind::Laguerre: p["nu"] = w.nu; break;
        case WeightKind::Jacobi:
        case WeightKind::CauchyLorentz:
            p["nu"] = w.nu;
            p["mu"] = w.mu;
            break;
        case WeightKind::MuttalibBorodin:
            p["nu"] = w.nu;
            p["alpha"] = w.alpha;
            p["theta"] = w.theta;
            break;
        case WeightKind::LogSquare:
            p["nu"] = w.nu;
            p["alpha"] = w.alpha;
            break;
        case WeightKind::Custom: break;
    }
    return p;
}

io::ReportEntry entry(const std::string& test, const EnsembleSpec& spec) {
    io::ReportEntry e;
    e.test = test;
    e.family = spec.family().name();
    e.params = family_params(spec.family());
    e.n = spec.n();
    return e;
}

io::ReportEntry entry(const std::string& test, const std::string& family, int n) {
    io::ReportEntry e;
    e.test = test;
    e.family = family;
    e.n = n;
    return e;
}

// |got - want| <= tol, reported as statistic/critical
void judge(io::ReportEntry& e, double defect, double tol) {
    e.statistic = defect;
    e.critical = tol;
    e.pass = std::isfinite(defect) && defect <= tol;
}

std::string fmt(double x) { return io::format_double(x); }

SamplerKind pick_sampler(const SamplePlan& p) {
    return direct_available(p) ? SamplerKind::direct : SamplerKind::mcmc;
}

std::vector<EnsembleSpec> grid(const SuiteConfig& cfg, const std::vector<WeightFamily>& families,
                               const std::vector<int>& sizes) {
    std::vector<EnsembleSpec> out;
    const std::vector<WeightFamily> fams = cfg.family ? std::vector<WeightFamily>{*cfg.family} : families;
    const std::vector<int> ns = cfg.n ? std::vector<int>{*cfg.n} : sizes;
    for (const auto& f : fams)
        for (int n : ns) out.emplace_back(f, n);
    return out;
}

// ---------------------------------------------------------------- suite 1

SamplePlan identity_plan(const EnsembleSpec& spec, const SuiteConfig& cfg, long count, int threads) {
    SamplePlan p{spec, count, SamplerKind::direct, {}, cfg.seed, threads, std::nullopt};
    const WeightFamily& w = spec.family();
    if (w.kind == WeightKind::Jacobi && !direct_available(p) && w.nu == 0.0 && std::floor(w.mu) == w.mu && w.mu >= 1)
        p.haar_size = int(w.mu) + 2 * spec.n() - 1;
    p.sampler = pick_sampler(p);
    return p;
}

std::vector<EnsembleSpec> weyl_grid(const SuiteConfig& cfg) {
    return grid(cfg, {WeightFamily::laguerre(0), WeightFamily::laguerre(1), WeightFamily::jacobi(0, 3)}, {2, 4, 8});
}

long or_default(long v, long d) { return v > 0 ? v : d; }

io::Report suite_weyl(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "weyl";
    const long count = or_default(cfg.count, 10000);
    for (const auto& spec : weyl_grid(cfg)) {
        const auto t0 = Clock::now();
        io::ReportEntry e = entry("spectral identities (det, Weyl, Horn)", spec);
        e.count = count;
        e.seed = cfg.seed;
        const SamplePlan plan = identity_plan(spec, cfg, count, cfg.threads);
        PipelineStats st;
        try {
            identity_pipeline(plan, &st);
            judge(e, st.worst_det_defect, 1e-10);
            e.note = "worst relative det defect; Weyl and Horn held on every matrix";
            if (plan.haar_size) e.note += "; Haar corner of size " + std::to_string(*plan.haar_size);
        } catch (const NumericError& ex) {
            e.statistic = st.worst_det_defect;
            e.critical = 1e-10;
            e.pass = false;
            e.note = ex.what();
        }
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    }
    return r;
}

// ---------------------------------------------------------------- suite 2

EnsembleSpec sev_forward_spec(const SuiteConfig& cfg) {
    return EnsembleSpec(cfg.family ? *cfg.family : WeightFamily::laguerre(0), cfg.n ? *cfg.n : 2);
}

SamplePlan sev_forward_plan(const SuiteConfig& cfg, int threads) {
    SamplePlan p{sev_forward_spec(cfg), or_default(cfg.count, 100000), SamplerKind::direct, {}, cfg.seed, threads, std::nullopt};
    p.sampler = pick_sampler(p);
    return p;
}

io::Report suite_sev_forward(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "sev-forward";
    auto t0 = Clock::now();
    const SamplePlan plan = sev_forward_plan(cfg, cfg.threads);
    const auto records = spectral_pipeline(plan);
    const GofResult g = gof_radial(records, plan.spec, cfg.seed, cfg.resamples);
    io::ReportEntry e = entry("squared eigenvalue radii vs radial density (block-bootstrap KS)", plan.spec);
    e.count = plan.count;
    e.seed = cfg.seed;
    e.statistic = g.value;
    e.critical = g.critical;
    e.p_boot = g.p_boot;
    e.pass = g.pass;
    e.note = "sampler " + to_string(plan.sampler) + "; asymptotic 1% critical " + fmt(g.asymptotic_critical);
    e.runtime_s = seconds_since(t0);
    r.entries.push_back(e);

    if (!cfg.family && !cfg.n) {
        // power check: nu = 0 data against the nu = 2 prediction must be rejected
        t0 = Clock::now();
        const EnsembleSpec wrong(WeightFamily::laguerre(2), 2);
        const GofResult b = gof_radial(records, wrong, cfg.seed, cfg.resamples);
        io::ReportEntry m = entry("mismatched prediction rejected (power check)", wrong);
        m.count = plan.count;
        m.seed = cfg.seed;
        m.statistic = b.value;
        m.critical = b.critical;
        m.p_boot = b.p_boot;
        m.pass = !b.pass;
        m.note = "data from laguerre nu=0; pass means the KS test rejected";
        m.runtime_s = seconds_since(t0);
        r.entries.push_back(m);
    }
    return r;
}

// ---------------------------------------------------------------- suite 3

struct SevPoints {
    std::vector<std::vector<cplx>> z;
};

SevPoints sev_points(const WeightFamily& w) {
    if (w.support_upper() <= 1.0)
        return {{{cplx(0.3, 0.2), cplx(0.6, -0.3)},
                 {cplx(0.1, 0.0), cplx(0.0, 0.5)},
                 {cplx(0.7, 0.1), cplx(-0.2, 0.4)},
                 {cplx(0.45, 0.0), cplx(0.2, -0.1)},
                 {cplx(0.2, 0.1), cplx(0.8, 0.0)}}};
    return {{{cplx(0.6, 0.3), cplx(1.2, -0.5)},
             {cplx(0.3, 0.0), cplx(0.0, 0.9)},
             {cplx(1.0, 1.0), cplx(-0.4, 0.2)},
             {cplx(1.5, 0.0), cplx(0.7, -0.7)},
             {cplx(0.2, 0.1), cplx(2.0, 0.0)}}};
}

io::Report suite_sev_map(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "sev-map";
    const auto specs = cfg.family ? std::vector<EnsembleSpec>{EnsembleSpec(*cfg.family, 2)}
                                  : std::vector<EnsembleSpec>{EnsembleSpec(WeightFamily::laguerre(0), 2),
                                                              EnsembleSpec(WeightFamily::jacobi(0, 3), 2)};
    for (const auto& spec : specs) {
        const SevPoints pts = sev_points(spec.family());
        auto t0 = Clock::now();
        io::ReportEntry f = entry("forward map (numeric contour) vs closed eigenvalue density", spec);
        double worst = 0.0;
        std::ostringstream note;
        for (const auto& z : pts.z) {
            const double got = sev_forward(spec, z, SevMode::numeric);
            const double want = density_ev(spec, z);
            worst = std::max(worst, std::abs(got - want));
            note << fmt(got) << " vs " << fmt(want) << "; ";
        }
        judge(f, worst, 1e-4);
        f.count = long(pts.z.size());
        f.note = note.str();
        f.runtime_s = seconds_since(t0);
        r.entries.push_back(f);

        t0 = Clock::now();
        io::ReportEntry b = entry("inverse map recovers squared singular value density", spec);
        worst = 0.0;
        note.str("");
        for (const auto& z : pts.z) {
            std::vector<double> a{std::norm(z[0]), std::norm(z[1])};
            std::sort(a.begin(), a.end());
            const double got = sev_inverse(spec, a);
            const double want = density_sv(spec, a);
            worst = std::max(worst, std::abs(got - want));
            note << fmt(got) << " vs " << fmt(want) << "; ";
        }
        judge(b, worst, 1e-3);
        b.count = long(pts.z.size());
        b.note = "a = |z|^2 of the same grid; " + note.str();
        b.runtime_s = seconds_since(t0);
        r.entries.push_back(b);
    }
    return r;
}

// ---------------------------------------------------------------- suite 4

double integrate_support(const EnsembleSpec& spec, const std::function<double(double)>& f) {
    if (spec.family().support_upper() < INFINITY)
        return quad::tanh_sinh(f, 0.0, spec.family().support_upper(), 1e-12);
    return quad::half_line(f);
}

io::Report suite_kernel(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "kernel";
    const auto specs = grid(cfg,
                            {WeightFamily::laguerre(0), WeightFamily::laguerre(1), WeightFamily::laguerre(2.5),
                             WeightFamily::jacobi(0, 3), WeightFamily::jacobi(0, 5)},
                            {6});
    for (const auto& spec : specs) {
        const int n = spec.n();
        auto t0 = Clock::now();
        std::vector<EdgeAtoms> atoms;
        for (int j = 0; j < n; ++j) atoms.push_back(func_q_edge_atoms(spec, j));
        // biorthogonality over every size up to n (p_i, q_j do not depend on n beyond the index)
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = integrate_support(spec,
                                                   [&](double x) {
                                                       const double q = func_q(spec, j, x);
                                                       return q == 0.0 ? 0.0 : poly_p(spec, i, x) * q;
                                                   }) +
                                 edge_pairing(spec, i, atoms[j]);
                worst = std::max(worst, std::abs(v - (i == j ? 1.0 : 0.0)));
            }
        io::ReportEntry b = entry("biorthogonality of p_i and q_j", spec);
        judge(b, worst, 1e-8);
        b.count = long(n) * n;
        b.runtime_s = seconds_since(t0);
        r.entries.push_back(b);

        // monomials z^i against conj(z)^j with weight omega(|z|^2), radial part by quadrature
        t0 = Clock::now();
        worst = 0.0;
        const int phases = 64;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cplx ang = 0.0;
                for (int k = 0; k < phases; ++k) ang += std::polar(1.0, 2.0 * kPi * k * (i - j) / phases);
                ang /= double(phases);  // (1/2pi) int e^{i(i-j)phi}
                const double rad = integrate_support(spec, [&](double t) {
                    const double w = spec.weight(t);
                    return w == 0.0 ? 0.0 : std::pow(t, 0.5 * (i + j)) * w;
                });
                // int d^2z = (1/2) int dt int dphi
                const cplx v = kPi * ang * rad / (kPi * std::sqrt(spec.mellin_int(i + 1) * spec.mellin_int(j + 1)));
                worst = std::max(worst, std::abs(v - (i == j ? 1.0 : 0.0)));
            }
        io::ReportEntry m = entry("monomial orthogonality defect", spec);
        judge(m, worst, 1e-8);
        m.count = long(n) * n;
        m.runtime_s = seconds_since(t0);
        r.entries.push_back(m);

        t0 = Clock::now();
        const double kev = kPi * integrate_support(spec, [&](double t) { return kernel_ev(spec, std::sqrt(t), std::sqrt(t)).real(); });
        io::ReportEntry ke = entry("integral of K_ev on the diagonal equals n", spec);
        judge(ke, std::abs(kev - n), 1e-6);
        ke.note = "value " + fmt(kev);
        ke.runtime_s = seconds_since(t0);
        r.entries.push_back(ke);

        t0 = Clock::now();
        double ksv = integrate_support(spec, [&](double a) { return kernel_sv(spec, a, a); });
        for (int j = 0; j < n; ++j) ksv += edge_pairing(spec, j, atoms[j]);
        io::ReportEntry ks = entry("integral of K_sv on the diagonal equals n", spec);
        judge(ks, std::abs(ksv - n), 1e-6);
        ks.note = "value " + fmt(ksv) + (atoms.back().coeff.empty() ? "" : " (edge atoms included)");
        ks.runtime_s = seconds_since(t0);
        r.entries.push_back(ks);
    }
    return r;
}

// ---------------------------------------------------------------- suite 5

std::vector<double> kernel_grid(const WeightFamily& w) {
    if (w.support_upper() <= 1.0) return {0.1, 0.3, 0.5, 0.7, 0.9};
    return {0.3, 0.8, 1.5, 2.5, 4.0};
}

io::Report suite_rel_kernel(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "rel-kernel";
    const auto specs = grid(cfg, {WeightFamily::laguerre(0), WeightFamily::jacobi(0, 3)}, {2, 3});
    for (const auto& spec : specs) {
        const auto g = kernel_grid(spec.family());
        auto t0 = Clock::now();
        double worst = 0.0;
        for (double a : g)
            for (double b : g) {
                const double d = kernel_sv(spec, a, b, KernelRep::direct);
                const double i = kernel_sv(spec, a, b, KernelRep::integral);
                const double e = kernel_sv(spec, a, b, KernelRep::from_ev);
                const double scale = std::max(1.0, std::abs(d));
                worst = std::max({worst, std::abs(d - i) / scale, std::abs(d - e) / scale, std::abs(i - e) / scale});
            }
        io::ReportEntry k = entry("K_sv representations agree pairwise (direct, integral, from_ev)", spec);
        judge(k, worst, 1e-6);
        k.count = long(g.size() * g.size());
        k.note = "defect relative to max(1, |K|)";
        k.runtime_s = seconds_since(t0);
        r.entries.push_back(k);

        t0 = Clock::now();
        double wp = 0.0, wq = 0.0;
        for (int l = 0; l < spec.n(); ++l)
            for (double a : g) {
                const double p = poly_p(spec, l, a);
                wp = std::max(wp, std::abs(poly_p_from_kernel(spec, l, a) - p) / std::max(1.0, std::abs(p)));
                const double q = func_q(spec, l, a);
                wq = std::max(wq, std::abs(func_q_from_kernel(spec, l, a) - q) / std::max(1.0, std::abs(q)));
            }
        io::ReportEntry p = entry("p_l recovered from the kernel", spec);
        judge(p, wp, 1e-6);
        p.count = long(spec.n() * g.size());
        p.runtime_s = seconds_since(t0);
        r.entries.push_back(p);
        io::ReportEntry q = entry("q_l recovered from the kernel", spec);
        judge(q, wq, 1e-6);
        q.count = p.count;
        q.runtime_s = p.runtime_s;
        r.entries.push_back(q);
    }
    return r;
}

// ---------------------------------------------------------------- suite 6

io::Report suite_harmonic(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "harmonic";
    const long draws = or_default(cfg.count, 1000000);
    struct Case {
        std::vector<double> a;
        std::vector<cplx> s;
    };
    const std::vector<Case> cases{{{0.6, 1.8}, {cplx(0.7, 0.4), cplx(-0.3, 1.1)}},
                                  {{0.5, 1.2, 2.4}, {cplx(1.1, -0.2), cplx(0.4, 0.5), cplx(-0.6, 0.1)}}};
    std::uint64_t stream = 0;
    for (const auto& c : cases) {
        const auto t0 = Clock::now();
        const int n = int(c.a.size());
        Rng rng(cfg.seed, 0x5EED0000ULL + stream++);
        const ComplexMatrix k = sample_haar_unitary(n, rng);
        ComplexMatrix d = ComplexMatrix::Zero(n, n);
        for (int j = 0; j < n; ++j) d(j, j) = c.a[j];
        const ComplexMatrix y = k * d * k.adjoint();
        const cplx closed = spherical_closed(c.a, c.s);
        const ComplexEstimate mc = spherical_mc(y, c.s, draws, rng);
        const double zr = std::abs(mc.value.real() - closed.real()) / mc.error_re;
        const double zi = std::abs(mc.value.imag() - closed.imag()) / mc.error_im;
        io::ReportEntry e = entry("spherical function closed form vs Haar Monte Carlo", "spherical", n);
        judge(e, std::max(zr, zi), 4.0);
        e.count = draws;
        e.seed = cfg.seed;
        e.note = "statistic in standard errors; closed " + fmt(closed.real()) + (closed.imag() < 0 ? "" : "+") +
                 fmt(closed.imag()) + "i";
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    }

    const EnsembleSpec lag2(WeightFamily::laguerre(0), 2);
    {
        const auto t0 = Clock::now();
        const std::vector<cplx> s{cplx(1.5, 0.3), cplx(2.5, -0.7)};
        const cplx direct = spherical_transform(lag2, s);
        const cplx composed = mellin_of_harish(lag2, s);
        io::ReportEntry e = entry("spherical transform equals Mellin of Harish transform", lag2);
        judge(e, std::abs(direct - composed) / std::abs(direct), 1e-6);
        e.note = "relative defect; S = " + fmt(direct.real()) + " " + fmt(direct.imag()) + "i";
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    }
    for (const auto& spec : {lag2, EnsembleSpec(WeightFamily::jacobi(0, 3), 2)}) {
        const auto t0 = Clock::now();
        const auto rp = SpectralShift::of(spec.n()).rho_prime;
        const std::vector<cplx> s(rp.begin(), rp.end());
        const cplx v = spherical_transform(spec, s);
        io::ReportEntry e = entry("spherical transform at rho' equals 1", spec);
        judge(e, std::abs(v - 1.0), 1e-8);
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    }
    {
        const auto t0 = Clock::now();
        const std::vector<double> a{0.7, 1.9};
        const Estimate h = harish_transform(omega_density(lag2), a);
        const double c = harish_closed(lag2, a);
        io::ReportEntry e = entry("Harish transform quadrature vs closed form", lag2);
        judge(e, std::abs(h.value - c) / std::abs(c), 1e-6);
        e.note = "relative defect";
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    }
    {
        const auto t0 = Clock::now();
        const std::vector<double> a{1.0, 2.0, 3.0};
        ComplexMatrix m(3, 3);
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) m(b, c) = std::pow(a[b], c);
        const double perm = permanent(m).real();
        const double avg = phase_average_vandermonde(a);
        io::ReportEntry e = entry("phase average of |Vandermonde|^2 equals permanent", "vandermonde", 3);
        judge(e, std::abs(avg - perm), 1e-8);
        e.note = "average " + fmt(avg) + ", permanent " + fmt(perm);
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    }
    return r;
}

// ---------------------------------------------------------------- suite 7

io::Report suite_deform(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "deform";
    const long draws = or_default(cfg.count, 1000000);
    std::uint64_t stream = 0;
    auto mc_entry = [&](const std::string& test, const Deformation& d, double exact, const std::vector<double>& a) {
        const auto t0 = Clock::now();
        Rng rng(cfg.seed, 0xDEF00000ULL + stream++);
        const Estimate m = unitary_average_mc([&](const ComplexMatrix& g) { return d.matrix_factor(g); }, a, draws, rng);
        io::ReportEntry e = entry(test, "group-integral", int(a.size()));
        judge(e, std::abs(m.value - exact) / m.error, 4.0);
        e.count = draws;
        e.seed = cfg.seed;
        e.note = d.describe() + " at a=(" + fmt(a[0]) + "," + fmt(a[1]) + "): exact " + fmt(exact) + ", MC " +
                 fmt(m.value) + " +- " + fmt(m.error) + " (statistic in standard errors)";
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    };
    for (cplx alpha : {cplx(1.0, 0.0), cplx(0.6, 0.8)})
        for (const auto& a : {std::vector<double>{1.0, 4.0}, std::vector<double>{0.5, 2.2}})
            mc_entry("Leutwyler-Smilga integral vs Haar Monte Carlo", Deformation::exp_trace(alpha),
                     ls_integral(alpha, a), a);
    const std::vector<double> a12{1.0, 2.0};
    for (cplx alpha : {cplx(1.0, 0.0), cplx(0.5, 0.7)})
        for (int gamma = 1; gamma <= 4; ++gamma)
            mc_entry("det-power group integral vs Haar Monte Carlo", Deformation::det_power(alpha, gamma),
                     group_integral_J(alpha, gamma, a12), a12);

    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (cplx alpha : {cplx(1.3, 0.0), cplx(0.4, -0.9), cplx(2.5, 1.0)})
            for (double a : {0.7, 2.0, 5.0}) {
                const std::vector<double> x{a};
                const double q = ls_phase_quadrature(alpha, a);
                worst = std::max(worst, std::abs(ls_integral(alpha, x) - q) / q);
            }
        io::ReportEntry e = entry("n=1 Leutwyler-Smilga convention pin vs phase quadrature", "group-integral", 1);
        judge(e, worst, 1e-10);
        e.note = "relative defect; Bessel argument scale " + fmt(kLsArgumentScale) + "|alpha|";
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    }
    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (const auto& a : {std::vector<double>{0.4, 1.7}, std::vector<double>{0.5, 1.1, 2.9}}) {
            worst = std::max(worst, std::abs(ls_integral(0.0, a) - 1.0));
            worst = std::max(worst, std::abs(group_integral_J(cplx(0.8, 0.3), 0, a) - 1.0));
        }
        const std::vector<double> a2{0.4, 1.7};
        const std::vector<cplx> z2{cplx(0.3, 0.4), cplx(-0.9, 0.2)};
        for (const auto& spec : {EnsembleSpec(WeightFamily::laguerre(0), 2), EnsembleSpec(WeightFamily::jacobi(0, 3), 2)}) {
            const std::vector<double> a = spec.family().support_upper() <= 1.0 ? std::vector<double>{0.2, 0.6} : a2;
            const std::vector<cplx> z = spec.family().support_upper() <= 1.0 ? std::vector<cplx>{cplx(0.3, 0.2), cplx(-0.4, 0.1)} : z2;
            const double sv = density_sv(spec, a), ev = density_ev(spec, z);
            for (const Deformation& d : {Deformation::det_power(cplx(0.8, 0.3), 0), Deformation::exp_trace(0.0)}) {
                if (d.kind == DeformKind::exp_trace && !spec.family().exp_trace_integrable()) continue;
                worst = std::max(worst, std::abs(deformed_density_sv(spec, d, a) - sv) / std::abs(sv));
                worst = std::max(worst, std::abs(deformed_density_ev(spec, d, z) - ev) / std::abs(ev));
            }
        }
        io::ReportEntry e = entry("gamma = 0 and alpha = 0 reduce to the undeformed ensemble", "group-integral", 2);
        judge(e, worst, 1e-12);
        e.note = "group integrals equal 1 and deformed densities equal the undeformed ones";
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    }
    return r;
}

// ---------------------------------------------------------------- suite 8

io::Report suite_corollary(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "corollary";
    const EnsembleSpec spec(cfg.family ? *cfg.family : WeightFamily::laguerre(0), cfg.n ? *cfg.n : 2);
    const long count = or_default(cfg.count, 100000);
    const std::vector<AssemblyMode> modes{AssemblyMode::two_sided, AssemblyMode::left_fixed, AssemblyMode::right_fixed};
    std::vector<std::vector<std::vector<double>>> radii;
    std::vector<double> times;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const auto t0 = Clock::now();
        // independent seeds per mode: left- and right-fixed products are similar matrices
        SamplePlan p{spec, count, SamplerKind::direct, {}, cfg.seed + 1000003ULL * m, cfg.threads, std::nullopt};
        p.sampler = pick_sampler(p);
        radii.push_back(squared_radii(spectral_pipeline(p, modes[m])));
        times.push_back(seconds_since(t0));
    }
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i + 1; j < modes.size(); ++j) {
            const auto t0 = Clock::now();
            const GofResult g = ks_two_sample(radii[i], radii[j], cfg.seed, cfg.resamples);
            io::ReportEntry e = entry("assembly modes " + to_string(modes[i]) + " vs " + to_string(modes[j]) +
                                          " (two-sample KS on squared radii)",
                                      spec);
            e.count = count;
            e.seed = cfg.seed;
            e.statistic = g.value;
            e.critical = g.critical;
            e.p_boot = g.p_boot;
            e.pass = g.pass;
            e.note = "permutation over matrices; asymptotic 1% critical " + fmt(g.asymptotic_critical);
            e.runtime_s = seconds_since(t0) + times[i] + times[j];
            r.entries.push_back(e);
        }
    return r;
}

// ---------------------------------------------------------------- suite 9

io::Report suite_determinism(const SuiteConfig& cfg) {
    io::Report r;
    r.suite = "determinism";
    const std::vector<int> thread_counts{1, 2, 8};
    auto check = [&](const std::string& test, const EnsembleSpec& spec, long count,
                     const std::function<std::vector<SpectralRecord>(int)>& produce) {
        const auto t0 = Clock::now();
        std::vector<std::string> out;
        for (int t : thread_counts) {
            std::ostringstream os;
            io::write_spectra_csv(os, produce(t));
            out.push_back(os.str());
        }
        long differing = 0;
        for (std::size_t i = 1; i < out.size(); ++i) differing += out[i] != out[0];
        io::ReportEntry e = entry(test, spec);
        e.count = count;
        e.seed = cfg.seed;
        e.statistic = double(differing);
        e.critical = 0.0;
        e.pass = differing == 0;
        e.note = "spectra CSV compared byte for byte across 1, 2 and 8 threads (" + std::to_string(out[0].size()) +
                 " bytes)";
        e.runtime_s = seconds_since(t0);
        r.entries.push_back(e);
    };
    const long count1 = or_default(cfg.count, 10000);
    for (const auto& spec : weyl_grid(cfg))
        check("identity-suite spectra are thread-count independent", spec, count1,
              [&](int t) { return identity_pipeline(identity_plan(spec, cfg, count1, t)); });
    const SamplePlan p2 = sev_forward_plan(cfg, 1);
    check("sev-forward spectra are thread-count independent", p2.spec, p2.count, [&](int t) {
        SamplePlan p = p2;
        p.threads = t;
        return spectral_pipeline(p);
    });
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"weyl",     "sev-forward", "sev-map",   "kernel",     "rel-kernel",
                                                "harmonic", "deform",      "corollary", "determinism"};
    return names;
}

io::Report run_suite(const std::string& name, const SuiteConfig& cfg) {
    if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
    if (cfg.resamples < 100) throw ConfigError("resamples must be at least 100");
    if (cfg.n && *cfg.n < 1) throw ConfigError("n must be at least 1");
    if (cfg.family) cfg.family->validate();
    io::Report r;
    if (name == "weyl") r = suite_weyl(cfg);
    else if (name == "sev-forward") r = suite_sev_forward(cfg);
    else if (name == "sev-map") r = suite_sev_map(cfg);
    else if (name == "kernel") r = suite_kernel(cfg);
    else if (name == "rel-kernel") r = suite_rel_kernel(cfg);
    else if (name == "harmonic") r = suite_harmonic(cfg);
    else if (name == "deform") r = suite_deform(cfg);
    else if (name == "corollary") r = suite_corollary(cfg);
    else if (name == "determinism") r = suite_determinism(cfg);
    else throw ConfigError("unknown suite '" + name + "'");
    r.pass = !r.entries.empty() &&
             std::all_of(r.entries.begin(), r.entries.end(), [](const io::ReportEntry& e) { return e.pass; });
    return r;
}

}  // namespace svev
