#pragma once

#include "adl/model.hpp"
#include "adl/rmf.hpp"
#include "adl/sketch.hpp"
#include "adl/squeezer.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace adl {

enum class H1Mode { Auto, Exact, MonteCarlo };

struct H1Options {
    H1Mode mode = H1Mode::Auto;
    // Largest outcome space enumerated in exact mode.
    double exact_limit = 1e7;
    // Monte Carlo trials; 0 picks enough for SE ≤ 1/(10α), capped below.
    std::size_t mc_trials = 0;
    std::size_t mc_max_trials = std::size_t{1} << 20;
};

// E[σ(⟨w̃^k, x_i⟩)] for every point, where w̃^k averages 2^k sketches.
struct H1Reference {
    std::vector<double> expectation;
    std::vector<double> standard_error;  // zeros in exact mode
    bool exact = true;
    double outcome_count = 0.0;
    std::size_t trials = 0;
};

// Outcome-space size of one level-k average: K^(2^k q_B), K = single-draw outcomes.
double level_outcome_count(const Sketcher& sketcher, unsigned k);

// Exact mode enumerates every draw outcome and refuses (RefusalError) above
// opts.exact_limit. Auto uses exact mode when it fits. mc_trials = 0 with
// target_se > 0 sizes the Monte Carlo run from the worst-case variance
// L²‖u‖²/2^k.
H1Reference h1_reference(const Sketcher& sketcher, std::span<const double> w0, const Matrix& points,
                         unsigned k, const Activation& sigma, const H1Options& opts, Rng& rng,
                         double target_se = 0.0);
H1Reference h1_reference(std::span<const double> w, std::span<const double> w0,
                         std::span<const double> x, unsigned k, const SketchConfig& cfg,
                         const Activation& sigma, const H1Options& opts, Rng& rng);

// Everything the decoder of a neuron message knows in advance.
struct NeuronProtocol {
    SketchConfig cfg;
    std::size_t m = 1;
    unsigned k = 1;
    double L = 1.0;
    // α is sent as an exponent offset from ⌊log₂(dm/(L²·norm_ref²))⌋.
    int alpha_reference_exponent = 0;

    static NeuronProtocol make(const SketchConfig& cfg, std::size_t m, double L);
};

struct NeuronRealization {
    bool gate = false;
    int alpha_exponent = 0;
    RMFRealization h1;  // meaningful only when gate is set
    SqueezerRealization squeezer;

    friend bool operator==(const NeuronRealization&, const NeuronRealization&) = default;
};

// Layout: open, gate bit, [if gate: RMF block, then the α exponent offset as
// signed gamma when the RMF is not the zero marker], squeezer block, close.
void write_neuron(MessageWriter& out, const NeuronRealization& n, const NeuronProtocol& proto);
NeuronRealization read_neuron(MessageReader& in, const NeuronProtocol& proto);
std::size_t neuron_encoded_bits(const NeuronRealization& n, const NeuronProtocol& proto);

// Evaluation context shared by both sides: protocol, w0, σ and the sample set.
class NeuronDecoder {
public:
    NeuronDecoder(NeuronProtocol proto, Vector w0, Activation sigma, const SampleSet& A);
    NeuronDecoder(NeuronProtocol proto, Vector w0, Activation sigma,
                  std::shared_ptr<const Matrix> points);

    const NeuronProtocol& protocol() const { return proto_; }
    const Vector& w0() const { return w0_; }
    const Activation& sigma() const { return sigma_; }
    const Matrix& points() const { return *points_; }

    NeuronRealization decode(const FramedMessage& msg) const;
    // z̃·h̃₁(x_i) + h̃₂(x_i).
    double eval(const NeuronRealization& n, std::size_t index) const;
    // Only the squeezer part exists off the sample set; a fired gate is an error.
    double eval_at(const NeuronRealization& n, std::span<const double> x) const;

private:
    NeuronProtocol proto_;
    Vector w0_;
    Activation sigma_;
    std::shared_ptr<const Matrix> points_;
    std::vector<double> w0_dot_x_;
};

struct H1Compression {
    std::vector<double> values;  // h₁(x_i) after clamping
    double alpha = 1.0;
    int alpha_exponent = 0;
    double C = 0.0;
    std::size_t clamped = 0;
    bool zero = true;
    H1Reference reference;
};

// h₁(x_i) = σ(⟨w, x_i⟩) − E[σ(⟨w̃^k, x_i⟩)], with RMF order 2^⌈log₂α⌉ for
// α = dm/(L²‖w − w0‖²) and bound C = L‖w − w0‖/√(dm). Zero when σ is affine
// or w = w0.
H1Compression h1_compress(const Sketcher& sketcher, std::span<const double> w,
                          std::span<const double> w0, const Matrix& points, const Activation& sigma,
                          unsigned k, const H1Options& opts, Rng& rng);

// Single-neuron compressor h̃ = z̃·h̃₁ + h̃₂ for x ↦ σ(⟨w, x⟩) on A.
class NeuronCompressor {
public:
    NeuronCompressor(std::span<const double> w, std::span<const double> w0, const SampleSet& A,
                     const Activation& sigma, const SketchConfig& cfg, Rng& rng,
                     const H1Options& opts = {});
    NeuronCompressor(std::span<const double> w, std::span<const double> w0,
                     std::shared_ptr<const Matrix> points, double B, const Activation& sigma,
                     const SketchConfig& cfg, Rng& rng, const H1Options& opts = {});

    NeuronRealization sample(Rng& rng) const;
    double eval(const NeuronRealization& n, std::size_t index) const { return decoder_.eval(n, index); }

    const NeuronDecoder& decoder() const { return decoder_; }
    const NeuronProtocol& protocol() const { return decoder_.protocol(); }
    const Sketcher& sketcher() const { return sketcher_; }
    const H1Compression& h1() const { return h1_; }
    unsigned k() const { return decoder_.protocol().k; }
    // σ(⟨w, x_i⟩).
    double target(std::size_t index) const { return target_[index]; }
    // 5L²‖w − w0‖²k.
    double variance_bound() const;
    // Exact expected physical length of one encoded realization.
    double expected_bits() const;
    EstimatorContract contract() const { return {variance_bound(), expected_bits()}; }

private:
    NeuronDecoder decoder_;
    Sketcher sketcher_;
    H1Compression h1_;
    std::vector<double> target_;
};

FramedMessage neuron_encode(const NeuronRealization& n, const NeuronProtocol& proto);

}  // namespace adl
