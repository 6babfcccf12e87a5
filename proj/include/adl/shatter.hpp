#pragma once

#include "adl/error.hpp"
#include "adl/model.hpp"
#include "adl/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace adl {

// m = max(1, ⌊h/10⌋).
std::size_t shatter_sample_count(std::size_t h);

// m points x^i ∈ {±1/√d}^d and 2^m matrices A^s with N(0, 1/h) entries.
struct ShatterCandidate {
    std::size_t d = 0, h = 0, m = 0;
    Matrix x;               // m × d
    std::vector<Matrix> A;  // 2^m matrices, h × d

    // A^s x^i.
    Vector image(std::size_t s, std::size_t i) const;
};

inline constexpr std::size_t kMaxShatterSamples = 20;
inline constexpr double kShatterMemoryLimit = 4.0 * 1024 * 1024 * 1024;

// Refuses (RefusalError carrying the byte estimate) when m > 20 or the
// matrices would not fit in memory.
ShatterCandidate sample_candidate(std::size_t d, std::size_t h, Rng& rng);

struct SeparationReport {
    double max_frobenius_sq = 0.0;
    // Minimum of ‖A^s x^i − A^t x^j‖² over distinct (s, i) ≠ (t, j), split by
    // whether the matrices differ.
    double min_cross_dist_sq = 0.0;
    double min_same_dist_sq = 0.0;
    double min_pair_dist_sq = 0.0;
    bool frobenius_ok = false;   // ‖A^s‖²_F ≤ 2d for every s
    bool cross_ok = false;       // s ≠ t pairs at squared distance ≥ 1/16
    bool same_ok = false;        // s = t, i ≠ j pairs at squared distance ≥ 1/16
    bool pass() const { return frobenius_ok && cross_ok && same_ok; }
};

inline constexpr double kSeparationSq = 1.0 / 16.0;

SeparationReport check_separation(const ShatterCandidate& c);

// f(u) = C + max_k {(y_k − C) − 2M‖u − p_k‖}.
struct LipschitzExtension {
    Matrix nodes;  // one node per row
    std::vector<double> labels;
    double center = 0.0;
    double alpha = 0.0;  // minimum pairwise node distance
    double slope = 0.0;  // M = max_k |y_k − C| / α
    double lipschitz() const { return 2.0 * slope; }
};

LipschitzExtension make_extension(Matrix nodes, std::vector<double> labels);
double eval_extension(const LipschitzExtension& e, std::span<const double> u);

// Instance for strong shattering of m points: node k·m + i is A^k x^i with
// label +1 when bit i of k is set (i ∈ S_k) and −1 otherwise. Thresholds are
// 0 and the output weights are e₁.
struct ShatterInstance {
    ShatterCandidate candidate;
    LipschitzExtension extension;
    SeparationReport separation;
    std::uint64_t seed = 0;
    std::size_t attempts = 0;

    std::size_t patterns() const { return candidate.A.size(); }
    static bool in_subset(std::size_t k, std::size_t i) { return (k >> i) & 1u; }
    double label(std::size_t k, std::size_t i) const { return in_subset(k, i) ? 1.0 : -1.0; }
};

// Builds the extension over all m·2^m images with the subset labels.
ShatterInstance assemble_instance(ShatterCandidate c, std::uint64_t seed, std::size_t attempts);

class ShatterSearchError : public Error {
public:
    ShatterSearchError(const std::string& what, SeparationReport best)
        : Error(what), best_(best) {}
    const SeparationReport& best() const { return best_; }

private:
    SeparationReport best_;
};

// Attempt a uses stream (seed, a); stops at the first candidate that passes
// check_separation.
ShatterInstance build_instance(std::size_t d, std::size_t h, std::uint64_t seed, std::size_t max_retries = 1000);

struct ShatterCell {
    std::size_t k, i;
    double value;
};

struct ShatterReport {
    double min_margin = 0.0;
    std::vector<ShatterCell> failures;
    std::size_t cells = 0;
    bool pass() const { return failures.empty(); }
};

inline constexpr double kMarginTolerance = 1e-9;

// h_k(x^i) = f̂(A^k x^i) must be ≥ 1 for i ∈ S_k and ≤ −1 otherwise.
ShatterReport verify_shatter(const ShatterInstance& inst);

struct LipschitzReport {
    double max_ratio = 0.0;
    double lipschitz = 0.0;
    std::size_t pairs = 0;
    bool pass() const { return max_ratio <= lipschitz + kMarginTolerance; }
};

// All node pairs plus n_random_pairs random pairs (half Gaussian points with
// N(0, 1/h) coordinates, half Gaussian perturbations of random nodes).
LipschitzReport verify_lipschitz(const ShatterInstance& inst, std::size_t n_random_pairs, Rng& rng);

}  // namespace adl
