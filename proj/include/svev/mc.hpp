#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svev/analytic.hpp"
#include "svev/matlin.hpp"
#include "svev/rng.hpp"

namespace svev {

enum class SamplerKind { direct, mcmc };
enum class AssemblyMode { two_sided, left_fixed, right_fixed };

SamplerKind sampler_from_name(const std::string& name);
AssemblyMode assembly_from_name(const std::string& name);
std::string to_string(SamplerKind k);
std::string to_string(AssemblyMode m);

struct McmcOptions {
    double scale = 0.5;    // initial random-walk step in log a
    long burn_in = 10000;  // sweeps; the step adapts only here
    int thinning = 0;      // 0 = integrated autocorrelation time of sum a, capped at 100
};

// Matrices are produced in replicas of kReplicaSize, replica r drawing from
// Rng(seed, r). Output depends on the plan only, not on the thread count.
inline constexpr long kReplicaSize = 1000;

struct SamplePlan {
    EnsembleSpec spec;
    long count = 1;
    SamplerKind sampler = SamplerKind::direct;
    McmcOptions mcmc;
    std::uint64_t seed = 1;
    int threads = 1;
    // Jacobi direct sampler: size N of the Haar unitary whose n x n corner is
    // taken. Unset means N = n + mu (the model of the derivative-type weight).
    std::optional<int> haar_size;
};

// True when a matrix model exists: Laguerre with integer nu >= 0, Jacobi with
// nu = 0 and integer mu >= n (or any plan with haar_size set).
bool direct_available(const SamplePlan& plan);

// Squared singular values, each draw sorted descending.
std::vector<std::vector<double>> sample_sv(const SamplePlan& plan);

struct McmcDiagnostics {
    double acceptance = 0.0;
    double scale = 0.0;
    int thinning = 1;
    long sign_violations = 0;
};
// One chain of `count` draws (exposed for tests).
std::vector<std::vector<double>> mcmc_chain(const EnsembleSpec& spec, long count, const McmcOptions& opt, Rng& rng,
                                            McmcDiagnostics* diag = nullptr);

ComplexMatrix assemble_matrix(std::span<const double> a, Rng& rng, AssemblyMode mode);

struct SpectralRecord {
    long id = 0;
    Spectrum ev;
    Spectrum sv;  // of the assembled matrix
};

struct PipelineStats {
    long jittered = 0;
    double worst_det_defect = 0.0;
};

// Samples a, assembles matrices, extracts both spectra and checks the exact
// identities on every matrix; NumericError on the first violation.
std::vector<SpectralRecord> spectral_pipeline(const SamplePlan& plan, AssemblyMode mode = AssemblyMode::two_sided,
                                              PipelineStats* stats = nullptr);

// Matrices whose identities are checked directly (no assembly): Jacobi via a
// Haar corner, otherwise through spectral_pipeline. Used by the identity suite.
std::vector<SpectralRecord> identity_pipeline(const SamplePlan& plan, PipelineStats* stats = nullptr);

struct GofResult {
    std::string statistic = "KS";
    double value = 0.0;
    double critical = 0.0;  // 99% quantile of the bootstrap / permutation law
    double p_boot = 1.0;
    double asymptotic_critical = 0.0;
    bool pass = false;
    long sample_size = 0;
};

// CDF of |z|^2 for one eigenvalue drawn uniformly from the spectrum.
double radial_cdf(const EnsembleSpec& spec, double t);
// Same at sorted points, sharing work between neighbours.
std::vector<double> radial_cdf_sorted(const EnsembleSpec& spec, std::span<const double> t);

// Groups are the per-matrix values (e.g. the n squared radii of one matrix);
// resampling acts on whole groups.
GofResult ks_one_sample(const std::vector<std::vector<double>>& groups,
                        const std::function<std::vector<double>(std::span<const double>)>& cdf_sorted,
                        std::uint64_t seed, int resamples = 1000);
GofResult ks_two_sample(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y,
                        std::uint64_t seed, int permutations = 1000);

std::vector<std::vector<double>> squared_radii(const std::vector<SpectralRecord>& records);

GofResult gof_radial(const std::vector<SpectralRecord>& records, const EnsembleSpec& spec, std::uint64_t seed,
                     int resamples = 1000);

struct Histogram {
    std::vector<double> edges;
    std::vector<long> counts;
};
// Freedman-Diaconis bin width.
Histogram histogram_fd(std::vector<double> values);

}  // namespace svev
