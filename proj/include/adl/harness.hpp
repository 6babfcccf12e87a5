#pragma once

#include "adl/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adl {

// Trials are generated in chunks of this size; chunk c draws from
// make_stream(seed, c) whatever the worker count.
inline constexpr std::size_t kTrialChunk = 4096;

struct MCSample {
    double value = 0.0;
    double bits = 0.0;
};

struct MCVectorSample {
    std::vector<double> values;
    double bits = 0.0;
};

// Samplers are called concurrently from several workers with distinct
// generators and must not mutate shared state.
using Sampler = std::function<MCSample(Rng&)>;
using VectorSampler = std::function<MCVectorSample(Rng&)>;

struct MCOptions {
    double z_gate = 4.0;
    double var_slack = 1.05;
    // Length gate: mean bits ≤ len_bound·(1 + len_overhead).
    double len_overhead = 0.0;
    // Known bias of the truth value itself, added to the unbiasedness gate.
    double bias_allowance = 0.0;
};

struct MCReport {
    std::size_t n_trials = 0;
    double truth = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double standard_error = 0.0;
    double z = 0.0;
    double var_bound = 0.0;
    double mean_bits = 0.0;
    std::optional<double> len_bound;
    bool unbiased = false;
    bool variance_ok = false;
    bool length_ok = true;
    bool finite = true;
    std::optional<std::size_t> bad_trial;
    std::string criteria;
    bool pass = false;
};

// Gate: |mean − truth| ≤ z·SE + bias_allowance + 1e-12·(1 + |truth|), variance ≤ var_bound·slack,
// mean bits ≤ len_bound·(1 + overhead) when a length bound is given, and every
// sample finite. N must be at least 1000.
MCReport mc_contract(const Sampler& sampler, double truth, double var_bound, std::optional<double> len_bound,
                     std::size_t n_trials, std::uint64_t seed, const MCOptions& opts = {});

struct MCVectorReport {
    std::vector<MCReport> outputs;
    double mean_bits = 0.0;
    std::optional<double> len_bound;
    bool length_ok = true;
    bool pass = false;
};

// One report per output coordinate against the same variance bound; bits are
// shared by the coordinates of a trial.
MCVectorReport mc_contract_vector(const VectorSampler& sampler, std::span<const double> truth, double var_bound,
                                  std::optional<double> len_bound, std::size_t n_trials, std::uint64_t seed,
                                  const MCOptions& opts = {});

// Independent sum of two samplers: the second draws from a generator seeded
// by the first one's stream. Values and bits add.
Sampler sampler_sum(Sampler a, Sampler b);

struct ExactOutcome {
    double value = 0.0;
    double bits = 0.0;
};

struct ExactReport {
    std::size_t outcome_count = 0;
    double total_probability = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double expected_bits = 0.0;
};

inline constexpr double kEnumerationLimit = 1e7;

// Weighted enumeration over the product of independent discrete factors.
// outcome(choice) receives one index per factor. Refuses (RefusalError with
// the size) above the limit; each factor must sum to 1 within 1e-12.
ExactReport enumerate_exact(const std::vector<std::vector<double>>& factors,
                            const std::function<ExactOutcome(std::span<const std::size_t>)>& outcome,
                            double limit = kEnumerationLimit);

// Exact moments from an explicit outcome list.
ExactReport exact_from_outcomes(std::span<const double> probs, std::span<const double> values,
                                std::span<const double> bits = {});

}  // namespace adl
