#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "qecw/codes.hpp"
#include "qecw/ir.hpp"
#include "qecw/noise_model.hpp"
#include "qecw/rng.hpp"
#include "qecw/simulate.hpp"
#include "qecw/transform.hpp"

namespace qecw {

namespace detail {

inline double beta_cont_frac(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace detail

/// Regularized incomplete beta function I_x(a, b).
inline double reg_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log1p(-x);
    const double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cont_frac(a, b, x) / a;
    return 1.0 - front * detail::beta_cont_frac(b, a, 1.0 - x) / b;
}

/// Quantile of Beta(a, b) by bisection; monotone and deterministic.
inline double beta_quantile(double q, double a, double b) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (reg_incomplete_beta(a, b, mid) < q) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Exact (Clopper-Pearson) 95% interval for k errors in n trials.
inline std::pair<double, double> binomial_ci95(std::uint64_t k, std::uint64_t n) {
    const double kk = static_cast<double>(k), nn = static_cast<double>(n);
    const double lo = (k == 0) ? 0.0 : beta_quantile(0.025, kk, nn - kk + 1.0);
    const double hi = (k == n) ? 1.0 : beta_quantile(0.975, kk + 1.0, nn - kk);
    return {lo, hi};
}

struct RateEstimate {
    double rate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t errors = 0;
    std::uint64_t aborted = 0; // trials ended by a circuit-contract error
};

/// Monte Carlo comparison of a plain program against its encoded rewrite.
struct TrialReport {
    std::string code;
    Channel channel = Channel::none;
    double p = 0.0;
    NoiseLocation location = NoiseLocation::per_fragment_boundary;
    std::string policy;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    /// "modal" for programs with a deterministic noiseless outcome, else
    /// "tv_distance": rates are total-variation distances between the
    /// empirical and exact distributions.
    std::string metric;
    ResultValue modal_outcome;
    double tv_threshold = 0.05;
    bool plain_tv_exceeded = false;
    bool encoded_tv_exceeded = false;

    RateEstimate plain;
    RateEstimate encoded;
    std::map<ResultValue, std::uint64_t> plain_tally;
    std::map<ResultValue, std::uint64_t> encoded_tally;
};

inline std::string policy_string(const TransformOptions& opts) {
    switch (opts.policy) {
    case CorrectionPolicy::after_each_op: return "after-each-op";
    case CorrectionPolicy::every_k: return "every-k:" + std::to_string(opts.k);
    default: return "never";
    }
}

inline std::string channel_string(Channel c) {
    switch (c) {
    case Channel::bit_flip: return "bit_flip";
    case Channel::phase_flip: return "phase_flip";
    case Channel::depolarizing: return "depolarizing";
    default: return "none";
    }
}

inline std::string location_string(NoiseLocation l) {
    return l == NoiseLocation::per_gate ? "per_gate" : "per_fragment_boundary";
}

namespace detail {

struct LaneResult {
    std::map<ResultValue, std::uint64_t> tally;
    std::uint64_t aborted = 0;
};

inline LaneResult run_lane(const QProgram& prog, const NoiseSpec& noise, std::uint64_t trials,
                           std::uint64_t seed, std::uint64_t lane) {
    LaneResult out;
    RunOptions opts{noise};
    for (std::uint64_t i = 0; i < trials; ++i) {
        try {
            out.tally[evaluate_run_details(prog, Rng::derive(seed, lane, i), opts).result] += 1;
        } catch (const AncillaNotReturned&) {
            // Per-gate noise can break a scratch qubit's return contract
            // mid-circuit; that is a failed trial, not a harness bug.
            out.aborted += 1;
        }
    }
    return out;
}

inline double tv_against_exact(const LaneResult& lane, const OutcomeDistribution& exact,
                               std::uint64_t trials) {
    double acc = 0.0;
    for (const auto& [k, v] : lane.tally)
        acc += std::abs(static_cast<double>(v) / static_cast<double>(trials) - exact.prob(k));
    for (const auto& [k, v] : exact.entries)
        if (!lane.tally.count(k)) acc += v;
    acc += static_cast<double>(lane.aborted) / static_cast<double>(trials);
    return acc / 2.0;
}

} // namespace detail

/// Runs `trials` independent seeded evaluations of the plain program (with
/// boundary markers) and of its encoded rewrite, with the channel active
/// at the configured locations. Trial i of each lane uses a generator
/// derived from (seed, lane, i), so results are independent of execution
/// order and parallelism.
///
/// For programs whose noiseless outcome is deterministic, an error is a
/// trial that deviates from that modal outcome and rates carry exact
/// binomial 95% intervals. Programs with intrinsically random outcomes are
/// scored by total-variation distance against the exact distribution
/// instead (the interval columns then repeat the point value).
inline TrialReport estimate_logical_error_rate(const QProgram& plain, const CodeScheme& code,
                                               const NoiseSpec& noise, std::uint64_t trials,
                                               std::uint64_t seed,
                                               const TransformOptions& topts = {},
                                               double tv_threshold = 0.05) {
    if (trials < 1) throw Error("trials must be at least 1");
    require_valid(plain);

    const OutcomeDistribution exact = evaluate_exact(plain);
    const QProgram plain_marked = insert_noise_sites(plain);
    const QProgram encoded = transform(plain, code, topts);
    require_valid(plain_marked);
    require_valid(encoded);

    double max_prob = 0.0;
    ResultValue modal;
    for (const auto& [k, v] : exact.entries) {
        if (v > max_prob) {
            max_prob = v;
            modal = k;
        }
    }
    const bool modal_metric = max_prob >= 1.0 - 1e-9;

    const detail::LaneResult plain_lane = detail::run_lane(plain_marked, noise, trials, seed, 0);
    const detail::LaneResult enc_lane = detail::run_lane(encoded, noise, trials, seed, 1);

    TrialReport report;
    report.code = code.name;
    report.channel = noise.channel;
    report.p = noise.p;
    report.location = noise.location;
    report.policy = policy_string(topts);
    report.trials = trials;
    report.seed = seed;
    report.tv_threshold = tv_threshold;
    report.plain_tally = plain_lane.tally;
    report.encoded_tally = enc_lane.tally;
    report.plain.aborted = plain_lane.aborted;
    report.encoded.aborted = enc_lane.aborted;

    if (modal_metric) {
        report.metric = "modal";
        report.modal_outcome = modal;
        auto fill = [&](RateEstimate& est, const detail::LaneResult& lane) {
            std::uint64_t hits = 0;
            if (auto it = lane.tally.find(modal); it != lane.tally.end()) hits = it->second;
            est.errors = trials - hits;
            est.rate = static_cast<double>(est.errors) / static_cast<double>(trials);
            auto [lo, hi] = binomial_ci95(est.errors, trials);
            est.ci_lo = lo;
            est.ci_hi = hi;
        };
        fill(report.plain, plain_lane);
        fill(report.encoded, enc_lane);
    } else {
        report.metric = "tv_distance";
        auto fill = [&](RateEstimate& est, const detail::LaneResult& lane, bool& exceeded) {
            est.rate = detail::tv_against_exact(lane, exact, trials);
            est.ci_lo = est.rate;
            est.ci_hi = est.rate;
            exceeded = est.rate > tv_threshold;
        };
        fill(report.plain, plain_lane, report.plain_tv_exceeded);
        fill(report.encoded, enc_lane, report.encoded_tv_exceeded);
    }
    return report;
}

} // namespace qecw
