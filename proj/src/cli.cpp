#include "svev/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "svev/analytic.hpp"
#include "svev/deformations.hpp"
#include "svev/errors.hpp"
#include "svev/io.hpp"
#include "svev/mc.hpp"
#include "svev/transforms.hpp"
#include "svev/verify.hpp"

namespace svev::cli {

namespace {

// ------------------------------------------------------------ parsing helpers

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_any(const std::string& s, const std::string& seps) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (seps.find(c) != std::string::npos) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_real(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
    return v;
}

// 1.5, -2i, 0.3+0.7i, 1e-3-2e-1i
cplx parse_complex(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw ConfigError("empty complex number");
    if (s.back() != 'i' && s.back() != 'j') return parse_real(s);
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag_of = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_real(t);
    };
    if (split == std::string::npos) return {0.0, imag_of(s)};
    return {parse_real(s.substr(0, split)), imag_of(s.substr(split))};
}

// "p;p;..." with each p a comma separated tuple
std::vector<std::vector<std::string>> parse_points(const std::string& s) {
    std::vector<std::vector<std::string>> out;
    for (const auto& p : split_any(s, ";")) {
        if (p.empty()) continue;
        out.push_back(split_any(p, ","));
    }
    if (out.empty()) throw ConfigError("no points given");
    return out;
}

std::vector<double> real_tuple(const std::vector<std::string>& t) {
    std::vector<double> v;
    for (const auto& x : t) v.push_back(parse_real(x));
    return v;
}

std::vector<cplx> complex_tuple(const std::vector<std::string>& t) {
    std::vector<cplx> v;
    for (const auto& x : t) v.push_back(parse_complex(x));
    return v;
}

// "lo:hi:count" -> count equally spaced values
std::vector<double> parse_grid(const std::string& s) {
    const auto f = split_any(s, ":");
    if (f.size() != 3) throw ConfigError("grid must be lo:hi:count");
    const double lo = parse_real(f[0]), hi = parse_real(f[1]);
    const double c = parse_real(f[2]);
    if (c < 1 || std::floor(c) != c) throw ConfigError("grid count must be a positive integer");
    std::vector<double> v;
    const long m = long(c);
    for (long i = 0; i < m; ++i) v.push_back(m == 1 ? lo : lo + (hi - lo) * double(i) / double(m - 1));
    return v;
}

// ------------------------------------------------------------ options

struct FamilyArgs {
    std::string family = "laguerre";
    double nu = 0.0;
    double mu = 3.0;
    double weight_alpha = 1.0;
    double theta = 1.0;
    int n = 2;

    void add(CLI::App* app, bool with_n = true) {
        app->add_option("--family", family, "weight family: laguerre, jacobi, cauchy-lorentz, muttalib-borodin, log-square");
        app->add_option("--nu", nu, "nu parameter");
        app->add_option("--mu", mu, "mu parameter (jacobi, cauchy-lorentz)");
        app->add_option("--weight-alpha", weight_alpha, "alpha parameter of the weight (muttalib-borodin, log-square)");
        app->add_option("--theta", theta, "theta parameter (muttalib-borodin)");
        if (with_n) app->add_option("--n", n, "matrix size");
    }
    WeightFamily weight() const {
        WeightFamily w = WeightFamily::from_name(family, nu, mu, weight_alpha, theta);
        w.validate();
        return w;
    }
    EnsembleSpec spec() const {
        if (n < 1) throw ConfigError("n must be at least 1");
        return EnsembleSpec(weight(), n);
    }
};

struct Output {
    std::ostream& stdout_;
    std::string path;

    template <class Writer>
    void write(const Writer& w) const {
        if (path == "-") {
            w(stdout_);
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ConfigError("cannot open '" + path + "' for writing");
        w(f);
        if (!f) throw ConfigError("failed writing '" + path + "'");
    }
};

// ------------------------------------------------------------ config file

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

bool given_on_command_line(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

// Moves --config out of args and merges the file's entries under the explicit flags.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a file");
            path = args[i + 1];
            args.erase(args.begin() + long(i), args.begin() + long(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + long(i));
            break;
        }
    }
    if (path.empty()) return args;
    const auto kv = read_config(path);
    // entries go right after the subcommand name so CLI11 checks them like flags
    auto sub = std::find_if(args.begin() + 1, args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    if (sub == args.end()) throw ConfigError("a config file needs a subcommand");
    std::vector<std::string> extra;
    for (const auto& [k, v] : kv) {
        if (k == "subcommand") continue;
        if (!given_on_command_line(args, k)) extra.push_back("--" + k + "=" + v);
    }
    args.insert(sub + 1, extra.begin(), extra.end());
    return args;
}

// ------------------------------------------------------------ subcommands

struct SampleArgs {
    FamilyArgs fam;
    long count = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string sampler = "auto";
    std::string mode = "two-sided";
    long burn_in = 10000;
    int thinning = 0;
    double mcmc_scale = 0.5;
    int haar_size = 0;
    std::string out = "spectra.csv";
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
    SamplePlan plan{a.fam.spec(), a.count, SamplerKind::direct, {}, a.seed, a.threads, std::nullopt};
    plan.mcmc.burn_in = a.burn_in;
    plan.mcmc.thinning = a.thinning;
    plan.mcmc.scale = a.mcmc_scale;
    if (a.haar_size > 0) plan.haar_size = a.haar_size;
    if (a.sampler == "auto") plan.sampler = direct_available(plan) ? SamplerKind::direct : SamplerKind::mcmc;
    else plan.sampler = sampler_from_name(a.sampler);
    const auto records = spectral_pipeline(plan, assembly_from_name(a.mode));
    Output{out, a.out}.write([&](std::ostream& os) { io::write_spectra_csv(os, records); });
    return kExitOk;
}

struct DensityArgs {
    FamilyArgs fam;
    std::string space = "sv";
    std::string what = "joint";
    std::string points;
    std::string grid;
    std::string out = "-";
};

std::vector<std::vector<std::string>> single_coordinates(const DensityArgs& a) {
    std::vector<std::vector<std::string>> pts;
    if (!a.grid.empty())
        for (double x : parse_grid(a.grid)) pts.push_back({io::format_double(x)});
    if (!a.points.empty())
        for (const auto& s : split_any(a.points, ",;"))
            if (!s.empty()) pts.push_back({s});
    if (pts.empty()) throw ConfigError("give --points or --grid");
    return pts;
}

int cmd_density(const DensityArgs& a, std::ostream& out) {
    const EnsembleSpec spec = a.fam.spec();
    const int n = spec.n();
    const bool ev = a.space == "ev";
    if (!ev && a.space != "sv") throw ConfigError("--space must be ev or sv");
    io::Table t;
    if (a.what == "joint" || a.what == "correlation") {
        if (a.points.empty()) throw ConfigError("--points is required for joint densities and correlations");
        const auto pts = parse_points(a.points);
        const std::size_t width = a.what == "joint" ? std::size_t(n) : pts.front().size();
        for (std::size_t i = 0; i < width; ++i) {
            if (ev) {
                t.header.push_back("re" + std::to_string(i + 1));
                t.header.push_back("im" + std::to_string(i + 1));
            } else {
                t.header.push_back("a" + std::to_string(i + 1));
            }
        }
        t.header.push_back("value");
        for (const auto& p : pts) {
            if (p.size() != width)
                throw ConfigError("each point needs " + std::to_string(width) + " coordinates");
            std::vector<double> row;
            double v;
            if (ev) {
                const auto z = complex_tuple(p);
                for (auto c : z) {
                    row.push_back(c.real());
                    row.push_back(c.imag());
                }
                v = a.what == "joint" ? density_ev(spec, z) : correlation_ev(spec, z);
            } else {
                const auto x = real_tuple(p);
                row = x;
                v = a.what == "joint" ? density_sv(spec, x) : correlation_sv(spec, x);
            }
            row.push_back(v);
            t.rows.push_back(std::move(row));
        }
    } else if (a.what == "level" || a.what == "radial") {
        const auto pts = single_coordinates(a);
        if (a.what == "level" && ev) {
            t.header = {"re", "im", "value"};
            for (const auto& p : pts) {
                const cplx z = parse_complex(p[0]);
                t.rows.push_back({z.real(), z.imag(), level_density_ev(spec, z)});
            }
        } else {
            t.header = {"point", "value"};
            for (const auto& p : pts) {
                const double x = parse_real(p[0]);
                t.rows.push_back({x, a.what == "radial" ? radial_density_sq(spec, x) : level_density_sv(spec, x)});
            }
        }
    } else {
        throw ConfigError("--what must be joint, level, radial or correlation");
    }
    Output{out, a.out}.write([&](std::ostream& os) { io::write_table_csv(os, t); });
    return kExitOk;
}

struct KernelArgs {
    FamilyArgs fam;
    std::string space = "sv";
    std::string rep = "direct";
    std::string form = "symmetric";
    std::string points;
    std::string grid;
    std::string out = "-";
};

int cmd_kernel(const KernelArgs& a, std::ostream& out) {
    const EnsembleSpec spec = a.fam.spec();
    io::Table t;
    if (a.space == "sv") {
        KernelRep rep;
        if (a.rep == "direct") rep = KernelRep::direct;
        else if (a.rep == "integral") rep = KernelRep::integral;
        else if (a.rep == "from_ev" || a.rep == "from-ev") rep = KernelRep::from_ev;
        else throw ConfigError("--rep must be direct, integral or from-ev");
        std::vector<std::pair<double, double>> pairs;
        if (!a.grid.empty()) {
            const auto g = parse_grid(a.grid);
            for (double x : g)
                for (double y : g) pairs.emplace_back(x, y);
        }
        if (!a.points.empty())
            for (const auto& p : parse_points(a.points)) {
                if (p.size() != 2) throw ConfigError("kernel points are pairs a,b");
                pairs.emplace_back(parse_real(p[0]), parse_real(p[1]));
            }
        if (pairs.empty()) throw ConfigError("give --points or --grid");
        t.header = {"a", "b", "value"};
        for (auto [x, y] : pairs) t.rows.push_back({x, y, kernel_sv(spec, x, y, rep)});
    } else if (a.space == "ev") {
        KernelForm form;
        if (a.form == "symmetric") form = KernelForm::symmetric;
        else if (a.form == "asymmetric") form = KernelForm::asymmetric;
        else throw ConfigError("--form must be symmetric or asymmetric");
        if (a.points.empty()) throw ConfigError("--points is required for the eigenvalue kernel");
        t.header = {"re1", "im1", "re2", "im2", "re", "im"};
        for (const auto& p : parse_points(a.points)) {
            if (p.size() != 2) throw ConfigError("kernel points are pairs z1,z2");
            const cplx z1 = parse_complex(p[0]), z2 = parse_complex(p[1]);
            const cplx k = kernel_ev(spec, z1, z2, form);
            t.rows.push_back({z1.real(), z1.imag(), z2.real(), z2.imag(), k.real(), k.imag()});
        }
    } else {
        throw ConfigError("--space must be ev or sv");
    }
    Output{out, a.out}.write([&](std::ostream& os) { io::write_table_csv(os, t); });
    return kExitOk;
}

struct TransformArgs {
    FamilyArgs fam;
    std::string kind = "spherical";
    std::string a;
    std::string s;
    std::string z;
    long samples = 100000;
    std::uint64_t seed = 1;
    std::string out = "-";
};

std::vector<double> need_reals(const std::string& v, const char* flag) {
    if (v.empty()) throw ConfigError(std::string(flag) + " is required for this transform");
    return real_tuple(split_any(v, ","));
}

std::vector<cplx> need_complex(const std::string& v, const char* flag) {
    if (v.empty()) throw ConfigError(std::string(flag) + " is required for this transform");
    return complex_tuple(split_any(v, ","));
}

int cmd_transform(const TransformArgs& t, std::ostream& out) {
    std::map<std::string, double> v;
    auto put = [&](const std::string& key, cplx c) {
        v[key + "_re"] = c.real();
        v[key + "_im"] = c.imag();
    };
    if (t.kind == "spherical") {
        put("value", spherical_closed(need_reals(t.a, "--a"), need_complex(t.s, "--s")));
    } else if (t.kind == "spherical-mc") {
        const auto a = need_reals(t.a, "--a");
        ComplexMatrix y = ComplexMatrix::Zero(long(a.size()), long(a.size()));
        for (std::size_t j = 0; j < a.size(); ++j) y(long(j), long(j)) = a[j];
        Rng rng(t.seed, 0);
        const ComplexEstimate e = spherical_mc(y, need_complex(t.s, "--s"), t.samples, rng);
        put("value", e.value);
        v["error_re"] = e.error_re;
        v["error_im"] = e.error_im;
    } else if (t.kind == "power") {
        const auto a = need_reals(t.a, "--a");
        ComplexMatrix y = ComplexMatrix::Zero(long(a.size()), long(a.size()));
        for (std::size_t j = 0; j < a.size(); ++j) y(long(j), long(j)) = a[j];
        put("value", power_function(y, need_complex(t.s, "--s")));
    } else if (t.kind == "harish") {
        const EnsembleSpec spec = t.fam.spec();
        const auto a = need_reals(t.a, "--a");
        const Estimate e = harish_transform(omega_density(spec), a);
        v["value"] = e.value;
        v["error"] = e.error;
        v["closed"] = harish_closed(spec, a);
    } else if (t.kind == "spherical-transform") {
        const EnsembleSpec spec = t.fam.spec();
        const auto s = need_complex(t.s, "--s");
        put("value", spherical_transform(spec, s));
        put("closed", spherical_transform_closed(spec, s));
    } else if (t.kind == "mellin-harish") {
        const EnsembleSpec spec = t.fam.spec();
        const auto s = need_complex(t.s, "--s");
        put("value", mellin_of_harish(spec, s));
        put("closed", spherical_transform_closed(spec, s));
    } else if (t.kind == "sev-forward") {
        const EnsembleSpec spec = t.fam.spec();
        const auto z = need_complex(t.z, "--z");
        v["value"] = sev_forward(spec, z, SevMode::numeric);
        v["closed"] = density_ev(spec, z);
    } else if (t.kind == "sev-inverse") {
        const EnsembleSpec spec = t.fam.spec();
        const auto a = need_reals(t.a, "--a");
        v["value"] = sev_inverse(spec, a);
        v["closed"] = density_sv(spec, a);
    } else if (t.kind == "phase-average") {
        const auto a = need_reals(t.a, "--a");
        ComplexMatrix m(long(a.size()), long(a.size()));
        for (std::size_t b = 0; b < a.size(); ++b)
            for (std::size_t c = 0; c < a.size(); ++c) m(long(b), long(c)) = std::pow(a[b], double(c));
        v["value"] = phase_average_vandermonde(a);
        v["permanent"] = permanent(m).real();
    } else {
        throw ConfigError("unknown transform kind '" + t.kind + "'");
    }
    Output{out, t.out}.write([&](std::ostream& os) { io::write_values_json(os, v); });
    return kExitOk;
}

struct DeformArgs {
    FamilyArgs fam;
    std::string deform = "exp-trace";
    std::string alpha = "1";
    int gamma = 2;
    std::string what = "density-sv";
    std::string points;
    std::string grid;
    long samples = 100000;
    std::uint64_t seed = 1;
    std::string out = "-";
};

int cmd_deform(const DeformArgs& a, std::ostream& out) {
    const cplx alpha = parse_complex(a.alpha);
    const Deformation d = deform_kind_from_name(a.deform) == DeformKind::exp_trace ? Deformation::exp_trace(alpha)
                                                                                    : Deformation::det_power(alpha, a.gamma);
    if (a.what == "normalization") {
        const EnsembleSpec spec = a.fam.spec();
        const Normalization nz = deformation_normalization(spec, d);
        Output{out, a.out}.write([&](std::ostream& os) {
            io::write_values_json(os, {{"value", nz.value}, {"error", nz.error}});
        });
        return kExitOk;
    }
    io::Table t;
    if (a.what == "radial") {
        const EnsembleSpec spec = a.fam.spec();
        check_admissible(spec, d);
        std::vector<double> xs;
        if (!a.grid.empty()) xs = parse_grid(a.grid);
        if (!a.points.empty())
            for (const auto& s : split_any(a.points, ",;"))
                if (!s.empty()) xs.push_back(parse_real(s));
        if (xs.empty()) throw ConfigError("give --points or --grid");
        t.header = {"point", "value"};
        for (double x : xs) t.rows.push_back({x, deformed_radial_density_sq(spec, d, x)});
    } else {
        if (a.points.empty()) throw ConfigError("--points is required");
        const auto pts = parse_points(a.points);
        const bool ev = a.what == "density-ev";
        const std::size_t width = pts.front().size();
        for (std::size_t i = 0; i < width; ++i) {
            if (ev) {
                t.header.push_back("re" + std::to_string(i + 1));
                t.header.push_back("im" + std::to_string(i + 1));
            } else {
                t.header.push_back("a" + std::to_string(i + 1));
            }
        }
        t.header.push_back("value");
        if (a.what == "unitary-mc") t.header.push_back("error");
        std::uint64_t stream = 0;
        for (const auto& p : pts) {
            if (p.size() != width) throw ConfigError("all points need the same number of coordinates");
            std::vector<double> row;
            if (ev) {
                const EnsembleSpec spec = a.fam.spec();
                check_admissible(spec, d);
                const auto z = complex_tuple(p);
                if (int(z.size()) != spec.n()) throw ConfigError("each point needs n coordinates");
                for (auto c : z) {
                    row.push_back(c.real());
                    row.push_back(c.imag());
                }
                row.push_back(deformed_density_ev(spec, d, z));
            } else {
                const auto x = real_tuple(p);
                row = x;
                if (a.what == "density-sv") {
                    const EnsembleSpec spec = a.fam.spec();
                    check_admissible(spec, d);
                    if (int(x.size()) != spec.n()) throw ConfigError("each point needs n coordinates");
                    row.push_back(deformed_density_sv(spec, d, x));
                } else if (a.what == "group-integral") {
                    row.push_back(d.kind == DeformKind::exp_trace ? ls_integral(alpha, x)
                                                                  : group_integral_J(alpha, a.gamma, x));
                } else if (a.what == "unitary-mc") {
                    Rng rng(a.seed, stream++);
                    const Estimate e = unitary_average_mc([&](const ComplexMatrix& g) { return d.matrix_factor(g); },
                                                          x, a.samples, rng);
                    row.push_back(e.value);
                    row.push_back(e.error);
                } else {
                    throw ConfigError(
                        "--what must be density-sv, density-ev, radial, group-integral, unitary-mc or normalization");
                }
            }
            t.rows.push_back(std::move(row));
        }
    }
    Output{out, a.out}.write([&](std::ostream& os) { io::write_table_csv(os, t); });
    return kExitOk;
}

struct VerifyArgs {
    std::string suite = "all";
    std::string family;
    double nu = 0.0;
    double mu = 3.0;
    double weight_alpha = 1.0;
    double theta = 1.0;
    int n = 0;
    long count = 0;
    std::uint64_t seed = 1;
    int threads = 1;
    int resamples = 1000;
    std::string out = "report.json";
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    SuiteConfig cfg;
    if (!a.family.empty()) {
        WeightFamily w = WeightFamily::from_name(a.family, a.nu, a.mu, a.weight_alpha, a.theta);
        w.validate();
        cfg.family = w;
    }
    if (a.n > 0) cfg.n = a.n;
    cfg.count = a.count;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    cfg.resamples = a.resamples;
    std::vector<std::string> names;
    if (a.suite == "all") names = suite_names();
    else names = {a.suite};
    for (const auto& s : names)
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
            throw ConfigError("unknown suite '" + s + "'");
    io::Report total;
    total.suite = a.suite;
    total.pass = true;
    for (const auto& s : names) {
        const io::Report r = run_suite(s, cfg);
        for (const auto& e : r.entries) {
            err << (e.pass ? "PASS " : "FAIL ") << s << ": " << e.test << " [" << e.family << " n=" << e.n
                << "] statistic=" << io::format_double(e.statistic) << " critical=" << io::format_double(e.critical)
                << '\n';
            total.entries.push_back(e);
        }
        total.pass = total.pass && r.pass;
    }
    Output{out, a.out}.write([&](std::ostream& os) { io::write_report_json(os, total); });
    return total.pass ? kExitOk : kExitSuiteFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Singular value and eigenvalue statistics of bi-unitarily invariant random matrices", "svev"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", "svev 0.1.0");
    app.footer("All subcommands accept --config FILE with flat 'key = value' lines; explicit flags win.\n"
               "Exit codes: 0 ok, 1 suite failure, 2 invalid configuration, 3 numeric failure.");

    SampleArgs sa;
    auto* sample = app.add_subcommand("sample", "sample matrices and write both spectra of each (spectra.csv)");
    sa.fam.add(sample);
    sample->add_option("--count", sa.count, "number of matrices");
    sample->add_option("--seed", sa.seed, "random seed");
    sample->add_option("--threads", sa.threads, "worker threads (output does not depend on it)");
    sample->add_option("--sampler", sa.sampler, "auto, direct or mcmc");
    sample->add_option("--mode", sa.mode, "assembly: two-sided, left-fixed or right-fixed");
    sample->add_option("--burn-in", sa.burn_in, "MCMC burn-in sweeps");
    sample->add_option("--thinning", sa.thinning, "MCMC thinning (0 = autocorrelation time)");
    sample->add_option("--mcmc-scale", sa.mcmc_scale, "initial MCMC step in log a");
    sample->add_option("--haar-size", sa.haar_size, "jacobi direct sampler: size of the Haar unitary (0 = n + mu)");
    sample->add_option("--out", sa.out, "output file, - for stdout");

    DensityArgs da;
    auto* density = app.add_subcommand("density", "evaluate densities on points (CSV)");
    da.fam.add(density);
    density->add_option("--space", da.space, "ev or sv");
    density->add_option("--what", da.what, "joint, level, radial or correlation");
    density->add_option("--points", da.points, "points separated by ';', coordinates by ',' (complex as 1+2i)");
    density->add_option("--grid", da.grid, "lo:hi:count grid for level and radial densities");
    density->add_option("--out", da.out, "output file, - for stdout");

    KernelArgs ka;
    auto* kernel = app.add_subcommand("kernel", "evaluate correlation kernels (CSV)");
    ka.fam.add(kernel);
    kernel->add_option("--space", ka.space, "ev or sv");
    kernel->add_option("--rep", ka.rep, "sv kernel representation: direct, integral or from-ev");
    kernel->add_option("--form", ka.form, "ev kernel form: symmetric or asymmetric");
    kernel->add_option("--points", ka.points, "pairs separated by ';', e.g. \"0.5,1;1,2\"");
    kernel->add_option("--grid", ka.grid, "lo:hi:count tensor grid (sv only)");
    kernel->add_option("--out", ka.out, "output file, - for stdout");

    TransformArgs ta;
    auto* transform = app.add_subcommand("transform", "evaluate spherical, Harish, Mellin and SEV transforms (JSON)");
    ta.fam.add(transform);
    transform->add_option("--kind", ta.kind,
                          "spherical, spherical-mc, power, harish, spherical-transform, mellin-harish, sev-forward, "
                          "sev-inverse or phase-average");
    transform->add_option("--a", ta.a, "comma separated positive reals");
    transform->add_option("--s", ta.s, "comma separated complex spectral parameters");
    transform->add_option("--z", ta.z, "comma separated complex eigenvalues");
    transform->add_option("--samples", ta.samples, "Monte Carlo draws");
    transform->add_option("--seed", ta.seed, "random seed");
    transform->add_option("--out", ta.out, "output file, - for stdout");

    DeformArgs fa;
    auto* deform = app.add_subcommand("deform", "deformed densities and group integrals (CSV, JSON for normalization)");
    fa.fam.add(deform);
    deform->add_option("--deform", fa.deform, "exp-trace or det-power");
    deform->add_option("--alpha", fa.alpha, "complex deformation parameter");
    deform->add_option("--gamma", fa.gamma, "det-power exponent (nonnegative integer)");
    deform->add_option("--what", fa.what, "density-sv, density-ev, radial, group-integral, unitary-mc or normalization");
    deform->add_option("--points", fa.points, "points separated by ';', coordinates by ','");
    deform->add_option("--grid", fa.grid, "lo:hi:count grid for the radial density");
    deform->add_option("--samples", fa.samples, "Haar draws for unitary-mc");
    deform->add_option("--seed", fa.seed, "random seed");
    deform->add_option("--out", fa.out, "output file, - for stdout");

    // --config is consumed by merge_config before parsing; registered for --help
    std::string config_path;
    for (auto* sub : {sample, density, kernel, transform, deform})
        sub->add_option("--config", config_path, "flat 'key = value' file; explicit flags win");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run an acceptance suite and write report.json");
    verify->add_option("--suite", va.suite,
                       "weyl, sev-forward, sev-map, kernel, rel-kernel, harmonic, deform, corollary, determinism or all");
    verify->add_option("--family", va.family, "restrict the suite to one weight family (default: built-in grid)");
    verify->add_option("--nu", va.nu, "nu parameter");
    verify->add_option("--mu", va.mu, "mu parameter (jacobi, cauchy-lorentz)");
    verify->add_option("--weight-alpha", va.weight_alpha, "alpha parameter of the weight");
    verify->add_option("--theta", va.theta, "theta parameter (muttalib-borodin)");
    verify->add_option("--n", va.n, "restrict to one matrix size (0 = built-in grid)");
    verify->add_option("--count", va.count, "sample count (0 = suite default)");
    verify->add_option("--seed", va.seed, "random seed");
    verify->add_option("--threads", va.threads, "worker threads");
    verify->add_option("--resamples", va.resamples, "bootstrap / permutation resamples");
    verify->add_option("--out", va.out, "report file, - for stdout");
    verify->add_option("--config", config_path, "flat 'key = value' file; explicit flags win");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = merge_config(std::move(args));
        std::vector<const char*> cargs;
        for (const auto& s : args) cargs.push_back(s.c_str());
        try {
            app.parse(int(cargs.size()), cargs.data());
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? kExitOk : kExitConfig;
        }
        if (sample->parsed()) return cmd_sample(sa, out);
        if (density->parsed()) return cmd_density(da, out);
        if (kernel->parsed()) return cmd_kernel(ka, out);
        if (transform->parsed()) return cmd_transform(ta, out);
        if (deform->parsed()) return cmd_deform(fa, out);
        if (verify->parsed()) return cmd_verify(va, out, err);
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CapabilityError& e) {
        err << "not supported: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace svev::cli
