#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaussocc/metrics.hpp"

namespace gaussocc::check {

struct SuiteResult {
    std::string name;
    double worst = 0.0;
    double tolerance = 0.0;
    int cases = 0;
    bool pass = false;
};

/// Finite-difference verification of every analytic gradient. Each op runs
/// trials_per_op seeded random cases; cases too close to a kink of the
/// piecewise-smooth ops (bilinear lattice lines, k-NN selection boundaries,
/// quaternion fallback) are redrawn.
std::vector<SuiteResult> gradient_suite(int trials_per_op = 1000, std::uint64_t seed = 42);

/// Brute-force equivalence checks: localized splat vs dense reference,
/// sparse convolution vs dense masked convolution, and step-by-step
/// transcript re-computation of the attention variants.
std::vector<SuiteResult> oracle_suite(std::uint64_t seed = 42, int scenes = 20);

/// Splat-vs-dense sweep at both infinite and finite cutoff (the acceptance
/// configuration: seeded scenes, P <= 50, 32x32x8 grid).
std::vector<SuiteResult> splat_oracle(int scenes = 100, std::uint64_t seed = 42);

/// Random Gaussian set for benchmarks and oracle scenes.
GaussianSet random_gaussian_set(int count, int classes, const VoxelGridSpec& spec,
                                std::uint64_t seed);

}  // namespace gaussocc::check
