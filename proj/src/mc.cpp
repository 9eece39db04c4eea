#include "svev/mc.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "svev/errors.hpp"
#include "svev/quadrature.hpp"

namespace svev {

SamplerKind sampler_from_name(const std::string& name) {
    if (name == "direct") return SamplerKind::direct;
    if (name == "mcmc") return SamplerKind::mcmc;
    throw ConfigError("unknown sampler '" + name + "' (expected direct or mcmc)");
}

AssemblyMode assembly_from_name(const std::string& name) {
    if (name == "two-sided" || name == "two_sided" || name == "a") return AssemblyMode::two_sided;
    if (name == "left-fixed" || name == "left_fixed" || name == "b") return AssemblyMode::left_fixed;
    if (name == "right-fixed" || name == "right_fixed" || name == "c") return AssemblyMode::right_fixed;
    throw ConfigError("unknown assembly mode '" + name + "' (expected two-sided, left-fixed or right-fixed)");
}

std::string to_string(SamplerKind k) { return k == SamplerKind::direct ? "direct" : "mcmc"; }

std::string to_string(AssemblyMode m) {
    switch (m) {
        case AssemblyMode::two_sided: return "two-sided";
        case AssemblyMode::left_fixed: return "left-fixed";
        case AssemblyMode::right_fixed: return "right-fixed";
    }
    return "?";
}

namespace {

bool is_int(double x) { return std::floor(x) == x; }

int jacobi_haar_size(const SamplePlan& plan) {
    if (plan.haar_size) return *plan.haar_size;
    return plan.spec.n() + int(plan.spec.family().mu);
}

// Runs body(replica, rng) for every replica on up to `threads` workers.
template <class Body>
void for_replicas(long replicas, int threads, std::uint64_t seed, const Body& body) {
    const int workers = int(std::max<long>(1, std::min<long>(threads, replicas)));
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto run = [&]() {
        for (;;) {
            const long r = next.fetch_add(1);
            if (r >= replicas || failed.load()) return;
            try {
                Rng rng(seed, std::uint64_t(r));
                body(r, rng);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

std::vector<double> direct_draw(const SamplePlan& plan, Rng& rng) {
    const int n = plan.spec.n();
    const WeightFamily& w = plan.spec.family();
    if (w.kind == WeightKind::Laguerre) {
        // eigenvalues of g g* for an n x (n + nu) Gaussian block
        const ComplexMatrix g = sample_ginibre(n, n + int(w.nu), rng);
        return squared_singular_values(g.adjoint()).real_values();
    }
    const int big = jacobi_haar_size(plan);
    const ComplexMatrix u = sample_haar_unitary(big, rng);
    return squared_singular_values(u.topLeftCorner(n, n)).real_values();
}

double log_target(const EnsembleSpec& spec, const std::vector<double>& u, std::vector<double>& a, int* sign) {
    // log |Delta(a)^2 det-ratio| + sum u  (the last term is the Jacobian of a = e^u)
    const int n = spec.n();
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        a[j] = std::exp(u[j]);
        if (!(a[j] > 0.0) || !std::isfinite(a[j]) || !(a[j] < spec.family().support_upper())) return -INFINITY;
        s += u[j];
    }
    const double vdm = vandermonde(a);
    if (vdm == 0.0) return -INFINITY;
    double r;
    try {
        r = derivative_det_ratio(spec, a);
    } catch (const DomainError&) {
        return -INFINITY;
    }
    if (!(r != 0.0) || !std::isfinite(r)) return -INFINITY;
    *sign = r > 0.0 ? 1 : -1;
    return std::log(std::abs(r)) + 2.0 * std::log(std::abs(vdm)) + s;
}

// initial positive sequence estimate of the integrated autocorrelation time
double iat(const std::vector<double>& x) {
    const std::size_t m = x.size();
    if (m < 10) return 1.0;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / m;
    double c0 = 0.0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    c0 /= m;
    if (c0 == 0.0) return 1.0;
    auto acf = [&](std::size_t k) {
        double c = 0.0;
        for (std::size_t i = 0; i + k < m; ++i) c += (x[i] - mean) * (x[i + k] - mean);
        return c / m / c0;
    };
    double tau = 1.0;
    for (std::size_t k = 1; 2 * k + 1 < m; k += 2) {
        const double pair = acf(k) + acf(k + 1);
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    return tau;
}

}  // namespace

bool direct_available(const SamplePlan& plan) {
    const WeightFamily& w = plan.spec.family();
    if (w.kind == WeightKind::Laguerre) return w.nu >= 0.0 && is_int(w.nu);
    if (w.kind == WeightKind::Jacobi) {
        if (w.nu != 0.0) return false;
        if (plan.haar_size) return *plan.haar_size >= 2 * plan.spec.n();
        return is_int(w.mu) && w.mu >= plan.spec.n();
    }
    return false;
}

std::vector<std::vector<double>> mcmc_chain(const EnsembleSpec& spec, long count, const McmcOptions& opt, Rng& rng,
                                            McmcDiagnostics* diag) {
    const int n = spec.n();
    const bool named = spec.family().kind != WeightKind::Custom;
    double mean = 1.0;
    if (spec.strip().covers(1.0, 2.0)) mean = spec.mellin_int(2) / spec.mellin_int(1);
    if (!(mean > 0.0) || !std::isfinite(mean)) mean = 1.0;
    std::vector<double> u(n), a(n), prop(n), pa(n);
    for (int j = 0; j < n; ++j) u[j] = std::log(mean * (0.5 + 0.5 * (j + 1.0) / n));
    int sign = 1;
    double lp = log_target(spec, u, a, &sign);
    if (!std::isfinite(lp)) throw NumericError("MCMC start lies outside the support");
    double scale = opt.scale;
    long sign_violations = 0;

    auto step = [&]() -> bool {
        for (int j = 0; j < n; ++j) prop[j] = u[j] + scale * rng.normal();
        int s = 1;
        const double lq = log_target(spec, prop, pa, &s);
        if (std::isfinite(lq) && s < 0) {
            ++sign_violations;
            return false;
        }
        if (std::isfinite(lq) && std::log(rng.uniform()) < lq - lp) {
            u = prop;
            lp = lq;
            return true;
        }
        return false;
    };

    // burn-in with Robbins-Monro adaptation toward 0.3 acceptance
    long acc_window = 0;
    for (long i = 1; i <= opt.burn_in; ++i) {
        acc_window += step();
        if (i % 100 == 0) {
            const double rate = acc_window / 100.0;
            scale *= std::exp((rate - 0.3) / std::sqrt(double(i) / 100.0));
            acc_window = 0;
        }
    }
    int thin = opt.thinning;
    long accepted = 0, steps = 0;
    if (thin <= 0) {
        std::vector<double> trace;
        const long pilot = 5000;
        for (long i = 0; i < pilot; ++i) {
            accepted += step();
            ++steps;
            double s = 0.0;
            for (double v : u) s += std::exp(v);
            trace.push_back(s);
        }
        thin = std::clamp(int(std::ceil(iat(trace))), 1, 100);
    }
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (long c = 0; c < count; ++c) {
        for (int t = 0; t < thin; ++t) {
            accepted += step();
            ++steps;
        }
        std::vector<double> draw(n);
        for (int j = 0; j < n; ++j) draw[j] = std::exp(u[j]);
        out.push_back(sorted_desc(std::move(draw)));
    }
    const double rate = steps ? double(accepted) / steps : 0.0;
    if (diag) *diag = {rate, scale, thin, sign_violations};
    if (named && sign_violations > 0)
        throw NumericError("derivative determinant changed sign for a positive weight family");
    if (rate < 0.05 || rate > 0.8)
        throw NumericError("MCMC acceptance rate " + std::to_string(rate) + " outside [0.05, 0.8]");
    return out;
}

std::vector<std::vector<double>> sample_sv(const SamplePlan& plan) {
    if (plan.count < 1) throw ConfigError("count must be at least 1");
    if (plan.threads < 1) throw ConfigError("threads must be at least 1");
    if (plan.sampler == SamplerKind::direct && !direct_available(plan))
        throw ConfigError("no direct sampler for " + plan.spec.family().name() + " with these parameters; use mcmc");
    const long replicas = (plan.count + kReplicaSize - 1) / kReplicaSize;
    std::vector<std::vector<std::vector<double>>> parts(replicas);
    for_replicas(replicas, plan.threads, plan.seed, [&](long r, Rng& rng) {
        const long m = std::min(kReplicaSize, plan.count - r * kReplicaSize);
        if (plan.sampler == SamplerKind::direct) {
            parts[r].reserve(m);
            for (long i = 0; i < m; ++i) parts[r].push_back(sorted_desc(direct_draw(plan, rng)));
        } else {
            parts[r] = mcmc_chain(plan.spec, m, plan.mcmc, rng);
        }
    });
    std::vector<std::vector<double>> out;
    out.reserve(plan.count);
    for (auto& p : parts)
        for (auto& d : p) out.push_back(std::move(d));
    return out;
}

ComplexMatrix assemble_matrix(std::span<const double> a, Rng& rng, AssemblyMode mode) {
    const int n = int(a.size());
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        if (!(a[j] >= 0.0)) throw DomainError("squared singular values must be nonnegative");
        d(j, j) = std::sqrt(a[j]);
    }
    switch (mode) {
        case AssemblyMode::two_sided: {
            const ComplexMatrix k1 = sample_haar_unitary(n, rng);
            const ComplexMatrix k2 = sample_haar_unitary(n, rng);
            return k1 * d * k2;
        }
        case AssemblyMode::left_fixed: return d * sample_haar_unitary(n, rng);
        case AssemblyMode::right_fixed: return sample_haar_unitary(n, rng) * d;
    }
    return d;
}

namespace {

// spreads coincident draws apart so eigen-extraction stays well defined
bool jitter(std::vector<double>& a) {
    bool changed = false;
    for (std::size_t i = 1; i < a.size(); ++i) {
        if (std::abs(a[i] - a[i - 1]) <= 1e-12 * std::max(std::abs(a[i]), std::abs(a[i - 1]))) {
            a[i] *= 1.0 - 1e-10 * double(i);
            changed = true;
        }
    }
    return changed;
}

SpectralRecord analyse(long id, const ComplexMatrix& g, PipelineStats& st) {
    SpectralRecord rec;
    rec.id = id;
    rec.ev = eigenvalues(g);
    rec.sv = squared_singular_values(g);
    const IdentityReport rep = check_spectral_identities(g, rec.ev, rec.sv, 1e-10);
    st.worst_det_defect = std::max(st.worst_det_defect, rep.det_relative_defect);
    if (!rep.ok(1e-10)) {
        throw NumericError("spectral identity violated on matrix " + std::to_string(id) +
                           " (det defect " + std::to_string(rep.det_relative_defect) + ", k=" +
                           std::to_string(rep.first_violation_k) + ")");
    }
    return rec;
}

std::vector<SpectralRecord> gather(std::vector<std::vector<SpectralRecord>>& parts,
                                   std::vector<PipelineStats>& st, PipelineStats* stats) {
    std::vector<SpectralRecord> out;
    PipelineStats total;
    for (std::size_t r = 0; r < parts.size(); ++r) {
        for (auto& rec : parts[r]) out.push_back(std::move(rec));
        total.jittered += st[r].jittered;
        total.worst_det_defect = std::max(total.worst_det_defect, st[r].worst_det_defect);
    }
    if (stats) *stats = total;
    return out;
}

}  // namespace

std::vector<SpectralRecord> spectral_pipeline(const SamplePlan& plan, AssemblyMode mode, PipelineStats* stats) {
    if (plan.count < 1) throw ConfigError("count must be at least 1");
    if (plan.sampler == SamplerKind::direct && !direct_available(plan))
        throw ConfigError("no direct sampler for " + plan.spec.family().name() + " with these parameters; use mcmc");
    const long replicas = (plan.count + kReplicaSize - 1) / kReplicaSize;
    std::vector<std::vector<SpectralRecord>> parts(replicas);
    std::vector<PipelineStats> st(replicas);
    for_replicas(replicas, plan.threads, plan.seed, [&](long r, Rng& rng) {
        const long m = std::min(kReplicaSize, plan.count - r * kReplicaSize);
        std::vector<std::vector<double>> draws;
        if (plan.sampler == SamplerKind::direct) {
            for (long i = 0; i < m; ++i) draws.push_back(sorted_desc(direct_draw(plan, rng)));
        } else {
            draws = mcmc_chain(plan.spec, m, plan.mcmc, rng);
        }
        parts[r].reserve(m);
        for (long i = 0; i < m; ++i) {
            if (jitter(draws[i])) ++st[r].jittered;
            const ComplexMatrix g = assemble_matrix(draws[i], rng, mode);
            parts[r].push_back(analyse(r * kReplicaSize + i, g, st[r]));
        }
    });
    return gather(parts, st, stats);
}

std::vector<SpectralRecord> identity_pipeline(const SamplePlan& plan, PipelineStats* stats) {
    if (plan.spec.family().kind != WeightKind::Jacobi) return spectral_pipeline(plan, AssemblyMode::two_sided, stats);
    if (!direct_available(plan)) throw ConfigError("Jacobi identity checks need a Haar corner model");
    const int n = plan.spec.n();
    const int big = jacobi_haar_size(plan);
    const long replicas = (plan.count + kReplicaSize - 1) / kReplicaSize;
    std::vector<std::vector<SpectralRecord>> parts(replicas);
    std::vector<PipelineStats> st(replicas);
    for_replicas(replicas, plan.threads, plan.seed, [&](long r, Rng& rng) {
        const long m = std::min(kReplicaSize, plan.count - r * kReplicaSize);
        for (long i = 0; i < m; ++i) {
            const ComplexMatrix g = sample_haar_unitary(big, rng).topLeftCorner(n, n);
            parts[r].push_back(analyse(r * kReplicaSize + i, g, st[r]));
        }
    });
    return gather(parts, st, stats);
}

double radial_cdf(const EnsembleSpec& spec, double t) {
    const std::array<double, 1> x{t};
    return radial_cdf_sorted(spec, x)[0];
}

std::vector<double> radial_cdf_sorted(const EnsembleSpec& spec, std::span<const double> t) {
    const int n = spec.n();
    const WeightFamily& w = spec.family();
    std::vector<double> out(t.size());
    if (w.kind == WeightKind::Laguerre) {
        // |z_j|^2 are independent Gamma(j + 1 + nu) variables
        for (std::size_t i = 0; i < t.size(); ++i) {
            double s = 0.0;
            if (t[i] > 0.0)
                for (int j = 0; j < n; ++j) s += boost::math::gamma_p(j + 1.0 + w.nu, t[i]);
            out[i] = s / n;
        }
        return out;
    }
    if (w.kind == WeightKind::Jacobi) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            double s = 0.0;
            if (t[i] >= 1.0) s = n;
            else if (t[i] > 0.0)
                for (int j = 0; j < n; ++j) s += boost::math::ibeta(j + 1.0 + w.nu, w.mu, t[i]);
            out[i] = s / n;
        }
        return out;
    }
    // cumulative quadrature between consecutive points
    auto f = [&](double x) { return x > 0.0 ? radial_density_sq(spec, x) : 0.0; };
    static const quad::Rule gl = quad::gauss_legendre(10);
    double acc = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i > 0 && t[i] < t[i - 1]) throw DomainError("radial_cdf_sorted needs ascending points");
        if (t[i] > prev) {
            if (prev == 0.0) {
                acc += quad::tanh_sinh(f, 0.0, t[i], 1e-10);  // endpoint may be singular
            } else {
                // gaps between sorted draws are short and the density is smooth there
                const double h = 0.5 * (t[i] - prev), c = 0.5 * (t[i] + prev);
                for (std::size_t k = 0; k < gl.nodes.size(); ++k) acc += h * gl.weights[k] * f(c + h * gl.nodes[k]);
            }
            prev = t[i];
        }
        out[i] = std::min(1.0, acc);
    }
    return out;
}

namespace {

struct Pooled {
    std::vector<double> value;
    std::vector<int> group;
};

Pooled pool(const std::vector<std::vector<double>>& groups, int offset = 0) {
    Pooled p;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (double v : groups[g]) {
            p.value.push_back(v);
            p.group.push_back(int(g) + offset);
        }
    return p;
}

void sort_pooled(Pooled& p) {
    std::vector<std::size_t> idx(p.value.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p.value[a] < p.value[b]; });
    Pooled q;
    q.value.reserve(idx.size());
    q.group.reserve(idx.size());
    for (auto i : idx) {
        q.value.push_back(p.value[i]);
        q.group.push_back(p.group[i]);
    }
    p = std::move(q);
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const std::size_t k = std::min(v.size() - 1, std::size_t(std::ceil(q * v.size())) - 1);
    return v[k];
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t m) { return rng.next_u64() % m; }

constexpr std::uint64_t kBootstrapStream = 0xB0075712A9ULL;

}  // namespace

GofResult ks_one_sample(const std::vector<std::vector<double>>& groups,
                        const std::function<std::vector<double>(std::span<const double>)>& cdf_sorted,
                        std::uint64_t seed, int resamples) {
    if (groups.empty()) throw ConfigError("KS test needs data");
    Pooled p = pool(groups);
    sort_pooled(p);
    const std::size_t total = p.value.size();
    const std::vector<double> f = cdf_sorted(p.value);
    // empirical CDF right after each point (ties share the upper value)
    std::vector<double> fn(total);
    double d = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t j = i;
        while (j + 1 < total && p.value[j + 1] == p.value[i]) ++j;
        for (std::size_t k = i; k <= j; ++k) fn[k] = double(j + 1) / total;
        d = std::max({d, std::abs(double(j + 1) / total - f[i]), std::abs(double(i) / total - f[i])});
        i = j;
    }
    // block bootstrap over groups: D* = sup |F*_n - F_n|
    const std::size_t ng = groups.size();
    Rng rng(seed, kBootstrapStream);
    std::vector<double> dstar(resamples);
    std::vector<long> counts(ng);
    for (int b = 0; b < resamples; ++b) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < ng; ++i) ++counts[uniform_index(rng, ng)];
        double cum = 0.0, best = 0.0;
        for (std::size_t i = 0; i < total; ++i) {
            cum += counts[p.group[i]];
            if (i + 1 < total && p.value[i + 1] == p.value[i]) continue;
            best = std::max(best, std::abs(cum / total - fn[i]));
        }
        dstar[b] = best;
    }
    GofResult r;
    r.value = d;
    r.critical = quantile(dstar, 0.99);
    r.p_boot = double(std::count_if(dstar.begin(), dstar.end(), [&](double v) { return v >= d; })) / resamples;
    r.asymptotic_critical = 1.628 / std::sqrt(double(total));
    r.pass = d < r.critical;
    r.sample_size = long(total);
    return r;
}

GofResult ks_two_sample(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y,
                        std::uint64_t seed, int permutations) {
    if (x.empty() || y.empty()) throw ConfigError("two-sample KS needs data on both sides");
    std::vector<std::vector<double>> all = x;
    all.insert(all.end(), y.begin(), y.end());
    Pooled p = pool(all);
    sort_pooled(p);
    const std::size_t total = p.value.size();
    std::vector<long> gsize(all.size());
    for (std::size_t g = 0; g < all.size(); ++g) gsize[g] = long(all[g].size());
    auto stat = [&](const std::vector<char>& in_x) {
        double nx = 0.0, ny = 0.0;
        for (std::size_t g = 0; g < all.size(); ++g) (in_x[g] ? nx : ny) += gsize[g];
        double cx = 0.0, cy = 0.0, best = 0.0;
        for (std::size_t i = 0; i < total; ++i) {
            (in_x[p.group[i]] ? cx : cy) += 1.0;
            if (i + 1 < total && p.value[i + 1] == p.value[i]) continue;
            best = std::max(best, std::abs(cx / nx - cy / ny));
        }
        return best;
    };
    std::vector<char> label(all.size(), 0);
    for (std::size_t g = 0; g < x.size(); ++g) label[g] = 1;
    const double d = stat(label);
    Rng rng(seed, kBootstrapStream + 1);
    std::vector<double> dperm(permutations);
    for (int b = 0; b < permutations; ++b) {
        // Fisher-Yates on the labels
        for (std::size_t i = label.size() - 1; i > 0; --i) std::swap(label[i], label[uniform_index(rng, i + 1)]);
        dperm[b] = stat(label);
    }
    double nx = 0.0, ny = 0.0;
    for (const auto& g : x) nx += g.size();
    for (const auto& g : y) ny += g.size();
    GofResult r;
    r.value = d;
    r.critical = quantile(dperm, 0.99);
    r.p_boot = double(std::count_if(dperm.begin(), dperm.end(), [&](double v) { return v >= d; })) / permutations;
    r.asymptotic_critical = 1.628 * std::sqrt((nx + ny) / (nx * ny));
    r.pass = d < r.critical;
    r.sample_size = long(total);
    return r;
}

std::vector<std::vector<double>> squared_radii(const std::vector<SpectralRecord>& records) {
    std::vector<std::vector<double>> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        std::vector<double> r;
        for (const auto& z : rec.ev.values) r.push_back(std::norm(z));
        out.push_back(std::move(r));
    }
    return out;
}

GofResult gof_radial(const std::vector<SpectralRecord>& records, const EnsembleSpec& spec, std::uint64_t seed,
                     int resamples) {
    return ks_one_sample(
        squared_radii(records), [&](std::span<const double> t) { return radial_cdf_sorted(spec, t); }, seed,
        resamples);
}

Histogram histogram_fd(std::vector<double> v) {
    if (v.empty()) return {};
    std::sort(v.begin(), v.end());
    const double lo = v.front(), hi = v.back();
    const auto q = [&](double p) { return v[std::min(v.size() - 1, std::size_t(p * (v.size() - 1)))]; };
    const double iqr = q(0.75) - q(0.25);
    double width = 2.0 * iqr / std::cbrt(double(v.size()));
    if (!(width > 0.0)) width = (hi > lo) ? (hi - lo) : 1.0;
    const long bins = std::clamp<long>(long(std::ceil((hi - lo) / width)), 1, 10000);
    width = (hi > lo) ? (hi - lo) / bins : 1.0;
    Histogram h;
    for (long b = 0; b <= bins; ++b) h.edges.push_back(lo + b * width);
    h.counts.assign(bins, 0);
    for (double x : v) ++h.counts[std::min(bins - 1, long((x - lo) / width))];
    return h;
}

}  // namespace svev
