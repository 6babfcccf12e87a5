#include "adl/shatter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace adl {

namespace {

double dist_sq(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

bool better(const SeparationReport& a, const SeparationReport& b) {
    if (a.frobenius_ok != b.frobenius_ok) return a.frobenius_ok;
    return a.min_pair_dist_sq > b.min_pair_dist_sq;
}

}  // namespace

std::size_t shatter_sample_count(std::size_t h) { return std::max<std::size_t>(1, h / 10); }

Vector ShatterCandidate::image(std::size_t s, std::size_t i) const {
    return A[s] * x.row(static_cast<Eigen::Index>(i)).transpose();
}

ShatterCandidate sample_candidate(std::size_t d, std::size_t h, Rng& rng) {
    if (d < 1 || h < d) throw DomainError("sample_candidate: requires h >= d >= 1");
    ShatterCandidate c;
    c.d = d;
    c.h = h;
    c.m = shatter_sample_count(h);
    double bytes = std::ldexp(static_cast<double>(h * d) * sizeof(double), static_cast<int>(std::min<std::size_t>(c.m, 1000)));
    if (c.m > kMaxShatterSamples || bytes > kShatterMemoryLimit)
        throw RefusalError("sample_candidate: m = " + std::to_string(c.m) + " needs 2^m matrices, about " +
                               std::to_string(bytes / (1024.0 * 1024.0)) + " MiB",
                           bytes);
    const double xs = 1.0 / std::sqrt(static_cast<double>(d));
    const double as = 1.0 / std::sqrt(static_cast<double>(h));
    c.x.resize(static_cast<Eigen::Index>(c.m), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < c.x.rows(); ++i)
        for (Eigen::Index j = 0; j < c.x.cols(); ++j) c.x(i, j) = (rng() >> 63) ? xs : -xs;
    const std::size_t n = std::size_t{1} << c.m;
    c.A.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        Matrix a(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = gaussian(rng) * as;
        c.A.push_back(std::move(a));
    }
    return c;
}

SeparationReport check_separation(const ShatterCandidate& c) {
    SeparationReport rep;
    const double inf = std::numeric_limits<double>::infinity();
    rep.min_cross_dist_sq = inf;
    rep.min_same_dist_sq = inf;
    for (const auto& a : c.A) rep.max_frobenius_sq = std::max(rep.max_frobenius_sq, a.squaredNorm());
    const std::size_t n = c.A.size();
    std::vector<Vector> img;
    img.reserve(n * c.m);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t i = 0; i < c.m; ++i) img.push_back(c.image(s, i));
    for (std::size_t p = 0; p < img.size(); ++p) {
        for (std::size_t q = p + 1; q < img.size(); ++q) {
            double d2 = dist_sq(as_span(img[p]), as_span(img[q]));
            if (p / c.m == q / c.m)
                rep.min_same_dist_sq = std::min(rep.min_same_dist_sq, d2);
            else
                rep.min_cross_dist_sq = std::min(rep.min_cross_dist_sq, d2);
        }
    }
    rep.min_pair_dist_sq = std::min(rep.min_cross_dist_sq, rep.min_same_dist_sq);
    rep.frobenius_ok = rep.max_frobenius_sq <= 2.0 * static_cast<double>(c.d);
    rep.cross_ok = rep.min_cross_dist_sq >= kSeparationSq;
    rep.same_ok = rep.min_same_dist_sq >= kSeparationSq;
    return rep;
}

LipschitzExtension make_extension(Matrix nodes, std::vector<double> labels) {
    if (static_cast<std::size_t>(nodes.rows()) != labels.size() || labels.empty())
        throw DimensionError("make_extension: one label per node required");
    LipschitzExtension e;
    auto [lo, hi] = std::minmax_element(labels.begin(), labels.end());
    e.center = (*lo + *hi) / 2.0;
    double spread = 0.0;
    for (double y : labels) spread = std::max(spread, std::abs(y - e.center));
    double min_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index p = 0; p < nodes.rows(); ++p)
        for (Eigen::Index q = p + 1; q < nodes.rows(); ++q)
            min_d = std::min(min_d, std::sqrt(dist_sq(row_span(nodes, static_cast<std::size_t>(p)),
                                                      row_span(nodes, static_cast<std::size_t>(q)))));
    if (nodes.rows() == 1) min_d = 1.0;
    if (!(min_d > 0.0)) throw DomainError("make_extension: duplicate nodes");
    e.alpha = min_d;
    e.slope = spread / min_d;
    e.nodes = std::move(nodes);
    e.labels = std::move(labels);
    return e;
}

double eval_extension(const LipschitzExtension& e, std::span<const double> u) {
    if (u.size() != static_cast<std::size_t>(e.nodes.cols())) throw DimensionError("eval_extension: wrong dimension");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < e.labels.size(); ++k) {
        double t = (e.labels[k] - e.center) - 2.0 * e.slope * std::sqrt(dist_sq(u, row_span(e.nodes, k)));
        best = std::max(best, t);
    }
    return e.center + best;
}

ShatterInstance assemble_instance(ShatterCandidate c, std::uint64_t seed, std::size_t attempts) {
    ShatterInstance inst;
    inst.separation = check_separation(c);
    const std::size_t n = c.A.size();
    Matrix nodes(static_cast<Eigen::Index>(n * c.m), static_cast<Eigen::Index>(c.h));
    std::vector<double> labels;
    labels.reserve(n * c.m);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < c.m; ++i) {
            nodes.row(static_cast<Eigen::Index>(k * c.m + i)) = c.image(k, i).transpose();
            labels.push_back(ShatterInstance::in_subset(k, i) ? 1.0 : -1.0);
        }
    }
    inst.extension = make_extension(std::move(nodes), std::move(labels));
    inst.candidate = std::move(c);
    inst.seed = seed;
    inst.attempts = attempts;
    return inst;
}

ShatterInstance build_instance(std::size_t d, std::size_t h, std::uint64_t seed, std::size_t max_retries) {
    if (max_retries < 1) throw DomainError("build_instance: max_retries must be >= 1");
    SeparationReport best;
    bool have_best = false;
    for (std::size_t a = 0; a < max_retries; ++a) {
        Rng rng = make_stream(seed, a);
        ShatterCandidate c = sample_candidate(d, h, rng);
        SeparationReport rep = check_separation(c);
        if (rep.pass()) return assemble_instance(std::move(c), seed, a + 1);
        if (!have_best || better(rep, best)) {
            best = rep;
            have_best = true;
        }
    }
    throw ShatterSearchError("build_instance: no separated candidate in " + std::to_string(max_retries) +
                                 " attempts (best min squared distance " + std::to_string(best.min_pair_dist_sq) +
                                 ", max squared Frobenius norm " + std::to_string(best.max_frobenius_sq) + ")",
                             best);
}

ShatterReport verify_shatter(const ShatterInstance& inst) {
    ShatterReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const auto& c = inst.candidate;
    for (std::size_t k = 0; k < c.A.size(); ++k) {
        for (std::size_t i = 0; i < c.m; ++i) {
            Vector u = c.image(k, i);
            double value = eval_extension(inst.extension, as_span(u));
            double margin = ShatterInstance::in_subset(k, i) ? value : -value;
            rep.min_margin = std::min(rep.min_margin, margin);
            ++rep.cells;
            if (margin < 1.0 - kMarginTolerance) rep.failures.push_back({k, i, value});
        }
    }
    return rep;
}

LipschitzReport verify_lipschitz(const ShatterInstance& inst, std::size_t n_random_pairs, Rng& rng) {
    if (n_random_pairs < 1) throw DomainError("verify_lipschitz: n_random_pairs must be >= 1");
    const auto& e = inst.extension;
    LipschitzReport rep;
    rep.lipschitz = e.lipschitz();
    auto consider = [&](std::span<const double> a, std::span<const double> b, double fa, double fb) {
        double dist = std::sqrt(dist_sq(a, b));
        if (dist == 0.0) return;
        rep.max_ratio = std::max(rep.max_ratio, std::abs(fa - fb) / dist);
        ++rep.pairs;
    };
    const std::size_t n = e.labels.size();
    const std::size_t h = static_cast<std::size_t>(e.nodes.cols());
    std::vector<double> f_nodes(n);
    for (std::size_t k = 0; k < n; ++k) f_nodes[k] = eval_extension(e, row_span(e.nodes, k));
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
            consider(row_span(e.nodes, p), row_span(e.nodes, q), f_nodes[p], f_nodes[q]);
    const double s = 1.0 / std::sqrt(static_cast<double>(h));
    std::vector<double> a(h), b(h);
    for (std::size_t t = 0; t < n_random_pairs; ++t) {
        if (t % 2 == 0) {
            for (auto& z : a) z = gaussian(rng) * s;
            for (auto& z : b) z = gaussian(rng) * s;
        } else {
            auto pa = row_span(e.nodes, static_cast<std::size_t>(rng() % n));
            auto pb = row_span(e.nodes, static_cast<std::size_t>(rng() % n));
            for (std::size_t i = 0; i < h; ++i) a[i] = pa[i] + 0.1 * gaussian(rng) * s;
            for (std::size_t i = 0; i < h; ++i) b[i] = pb[i] + 0.1 * gaussian(rng) * s;
        }
        consider(a, b, eval_extension(e, a), eval_extension(e, b));
    }
    return rep;
}

}  // namespace adl
