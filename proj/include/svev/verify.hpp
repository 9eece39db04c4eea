#pragma once

#include <optional>
#include <string>
#include <vector>

#include "svev/io.hpp"
#include "svev/weights.hpp"

namespace svev {

// Parameters of a verification run. Unset fields fall back to the suite's
// built-in grid (the acceptance configuration).
struct SuiteConfig {
    std::optional<WeightFamily> family;
    std::optional<int> n;
    long count = 0;  // 0 = suite default
    std::uint64_t seed = 1;
    int threads = 1;
    int resamples = 1000;
};

// weyl, sev-forward, sev-map, kernel, rel-kernel, harmonic, deform, corollary, determinism
const std::vector<std::string>& suite_names();

// Runs one suite. Mathematical failures show up as entries with pass = false;
// NumericError from a suite's internals propagates.
io::Report run_suite(const std::string& name, const SuiteConfig& cfg);

}  // namespace svev
