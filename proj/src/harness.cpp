#include "adl/harness.hpp"

#include "adl/error.hpp"
#include "adl/parallel.hpp"
#include "adl/stats.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace adl {

namespace {

struct ChunkState {
    std::vector<RunningMoments> moments;
    CompensatedSum bits;
    std::optional<std::size_t> bad_trial;
};

std::string format_criteria(const MCOptions& opts, double var_bound, std::optional<double> len_bound) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "|mean-truth| <= %.17g*SE + %.17g + 1e-12*(1+|truth|); variance <= %.17g*%.17g",
                  opts.z_gate, opts.bias_allowance, var_bound, opts.var_slack);
    std::string s = buf;
    if (len_bound) {
        std::snprintf(buf, sizeof buf, "; mean bits <= %.17g*(1+%.17g)", *len_bound, opts.len_overhead);
        s += buf;
    }
    return s;
}

MCReport finish_output(const RunningMoments& mom, double truth, double var_bound, const MCOptions& opts) {
    MCReport r;
    r.n_trials = mom.count();
    r.truth = truth;
    r.mean = mom.mean();
    r.variance = mom.variance();
    r.standard_error = mom.standard_error();
    r.var_bound = var_bound;
    double err = std::abs(r.mean - truth);
    r.z = r.standard_error > 0.0 ? (r.mean - truth) / r.standard_error
                                 : (err == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), r.mean - truth));
    r.unbiased = err <= opts.z_gate * r.standard_error + opts.bias_allowance + 1e-12 * (1.0 + std::abs(truth));
    r.variance_ok = r.variance <= var_bound * opts.var_slack;
    return r;
}

void check_trials(std::size_t n_trials) {
    if (n_trials < 1000) throw DomainError("mc_contract: at least 1000 trials required");
}

}  // namespace

MCVectorReport mc_contract_vector(const VectorSampler& sampler, std::span<const double> truth, double var_bound,
                                  std::optional<double> len_bound, std::size_t n_trials, std::uint64_t seed,
                                  const MCOptions& opts) {
    check_trials(n_trials);
    const std::size_t outputs = truth.size();
    const std::size_t n_chunks = (n_trials + kTrialChunk - 1) / kTrialChunk;
    std::vector<ChunkState> chunks(n_chunks);
    parallel_chunks(n_chunks, [&](std::size_t c) {
        ChunkState& st = chunks[c];
        st.moments.resize(outputs);
        Rng rng = make_stream(seed, c);
        const std::size_t begin = c * kTrialChunk;
        const std::size_t end = std::min(n_trials, begin + kTrialChunk);
        for (std::size_t t = begin; t < end; ++t) {
            MCVectorSample s = sampler(rng);
            if (s.values.size() != outputs) throw DimensionError("mc_contract: sampler returned wrong output count");
            bool finite = std::isfinite(s.bits);
            for (double v : s.values) finite = finite && std::isfinite(v);
            if (!finite) {
                st.bad_trial = t;
                return;
            }
            for (std::size_t o = 0; o < outputs; ++o) st.moments[o].add(s.values[o]);
            st.bits.add(s.bits);
        }
    });

    std::vector<RunningMoments> total(outputs);
    CompensatedSum bits;
    std::optional<std::size_t> bad;
    for (const auto& st : chunks) {
        if (st.bad_trial) {
            bad = st.bad_trial;
            break;
        }
        for (std::size_t o = 0; o < outputs; ++o) total[o].merge(st.moments[o]);
        bits.add(st.bits.value());
    }

    MCVectorReport rep;
    rep.len_bound = len_bound;
    const std::string criteria = format_criteria(opts, var_bound, len_bound);
    if (bad) {
        rep.outputs.resize(outputs);
        for (std::size_t o = 0; o < outputs; ++o) {
            MCReport& r = rep.outputs[o];
            r.n_trials = n_trials;
            r.truth = truth[o];
            r.var_bound = var_bound;
            r.finite = false;
            r.bad_trial = bad;
            r.len_bound = len_bound;
            r.criteria = criteria + "; non-finite sample at trial " + std::to_string(*bad);
        }
        rep.length_ok = false;
        rep.pass = false;
        return rep;
    }
    rep.mean_bits = bits.value() / static_cast<double>(n_trials);
    rep.length_ok = !len_bound || rep.mean_bits <= *len_bound * (1.0 + opts.len_overhead);
    rep.pass = rep.length_ok;
    for (std::size_t o = 0; o < outputs; ++o) {
        MCReport r = finish_output(total[o], truth[o], var_bound, opts);
        r.mean_bits = rep.mean_bits;
        r.len_bound = len_bound;
        r.length_ok = rep.length_ok;
        r.criteria = criteria;
        r.pass = r.unbiased && r.variance_ok && r.length_ok;
        rep.pass = rep.pass && r.pass;
        rep.outputs.push_back(std::move(r));
    }
    return rep;
}

MCReport mc_contract(const Sampler& sampler, double truth, double var_bound, std::optional<double> len_bound,
                     std::size_t n_trials, std::uint64_t seed, const MCOptions& opts) {
    VectorSampler vs = [&sampler](Rng& rng) {
        MCSample s = sampler(rng);
        return MCVectorSample{{s.value}, s.bits};
    };
    const double t[1] = {truth};
    return mc_contract_vector(vs, t, var_bound, len_bound, n_trials, seed, opts).outputs.front();
}

Sampler sampler_sum(Sampler a, Sampler b) {
    return [a = std::move(a), b = std::move(b)](Rng& rng) {
        Rng second(rng());
        MCSample x = a(rng);
        MCSample y = b(second);
        return MCSample{x.value + y.value, x.bits + y.bits};
    };
}

namespace {

// Weighted running moments (West 1979).
class WeightedMoments {
public:
    void add(double w, double x, double bits) {
        if (w == 0.0) return;
        double new_w = w_ + w;
        double delta = x - mean_;
        double r = delta * w / new_w;
        mean_ += r;
        s_ += w_ * delta * r;
        w_ = new_w;
        total_.add(w);
        bits_.add(w * bits);
    }
    double total() const { return total_.value(); }
    double mean() const { return mean_; }
    double variance() const { return w_ > 0.0 ? s_ / w_ : 0.0; }
    double bits() const { return bits_.value(); }

private:
    double w_ = 0.0;
    double mean_ = 0.0;
    double s_ = 0.0;
    CompensatedSum total_;
    CompensatedSum bits_;
};

ExactReport finish_exact(const WeightedMoments& wm, std::size_t count) {
    ExactReport r;
    r.outcome_count = count;
    r.total_probability = wm.total();
    if (std::abs(r.total_probability - 1.0) > 1e-12)
        throw DomainError("enumerate_exact: probabilities sum to " + std::to_string(r.total_probability));
    r.mean = wm.mean();
    r.variance = wm.variance();
    r.expected_bits = wm.bits();
    return r;
}

}  // namespace

ExactReport enumerate_exact(const std::vector<std::vector<double>>& factors,
                            const std::function<ExactOutcome(std::span<const std::size_t>)>& outcome, double limit) {
    double size = 1.0;
    for (const auto& f : factors) {
        if (f.empty()) throw DomainError("enumerate_exact: empty factor");
        CompensatedSum s;
        for (double p : f) {
            if (!(p >= 0.0)) throw DomainError("enumerate_exact: negative probability");
            s.add(p);
        }
        if (std::abs(s.value() - 1.0) > 1e-12) throw DomainError("enumerate_exact: factor does not sum to 1");
        size *= static_cast<double>(f.size());
    }
    if (size > limit)
        throw RefusalError("enumerate_exact: outcome space of " + std::to_string(size) + " exceeds limit", size);

    const std::size_t n = factors.size();
    std::vector<std::size_t> choice(n, 0);
    std::vector<double> prefix(n + 1, 1.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * factors[i][0];
    WeightedMoments wm;
    std::size_t count = 0;
    while (true) {
        ExactOutcome o = outcome(choice);
        wm.add(prefix[n], o.value, o.bits);
        ++count;
        // Odometer increment from the last factor.
        std::size_t i = n;
        while (i > 0) {
            --i;
            if (++choice[i] < factors[i].size()) break;
            choice[i] = 0;
            if (i == 0) return finish_exact(wm, count);
        }
        if (n == 0) return finish_exact(wm, count);
        for (std::size_t j = i; j < n; ++j) prefix[j + 1] = prefix[j] * factors[j][choice[j]];
    }
}

ExactReport exact_from_outcomes(std::span<const double> probs, std::span<const double> values,
                                std::span<const double> bits) {
    if (probs.size() != values.size() || (!bits.empty() && bits.size() != probs.size()))
        throw DimensionError("exact_from_outcomes: mismatched sizes");
    WeightedMoments wm;
    for (std::size_t i = 0; i < probs.size(); ++i) wm.add(probs[i], values[i], bits.empty() ? 0.0 : bits[i]);
    return finish_exact(wm, probs.size());
}

}  // namespace adl
