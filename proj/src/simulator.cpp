#include "ionrep/simulator.hpp"

#include "parallel.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace ionrep {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-pair first-success round by inversion of the geometric law.
class LinkSampler {
public:
    LinkSampler(double p, long attempts, int ions)
        : p_(p)
        , attempts_(attempts)
        , ions_(ions)
        , log_miss_(p < 1.0 ? std::log1p(-p) : 0.0)
        , pair_up_(p >= 1.0 ? 1.0 : -std::expm1(static_cast<double>(attempts) * log_miss_))
    {
    }

    /// Same event as sample().success from the same draws, without the
    /// per-pair logarithm: a pair comes up within n rounds iff u < 1-(1-p)^n.
    bool up(TrialRng& rng) const
    {
        bool any = false;
        for (int j = 0; j < ions_; ++j)
            any |= rng.uniform() < pair_up_;
        return any && p_ > 0.0;
    }

    LinkOutcome sample(TrialRng& rng) const
    {
        if (p_ <= 0.0) {
            // Still consume one draw per pair so streams line up across p.
            for (int j = 0; j < ions_; ++j)
                rng.uniform();
            return {false, attempts_};
        }
        long first = attempts_ + 1;
        for (int j = 0; j < ions_; ++j) {
            const double u = rng.uniform();
            if (p_ >= 1.0) {
                first = 1;
                continue;
            }
            // Rounds before the first success: floor(log(1-u)/log(1-p)).
            const double failures = std::floor(std::log1p(-u) / log_miss_);
            if (failures < static_cast<double>(first - 1))
                first = static_cast<long>(failures) + 1;
        }
        if (first <= attempts_)
            return {true, first};
        return {false, attempts_};
    }

private:
    double p_;
    long attempts_;
    int ions_;
    double log_miss_;
    double pair_up_;
};

struct Tally {
    std::uint64_t successes = 0;
    std::uint64_t flips = 0;       // sum over successes of (x + z)
    std::uint64_t flips_sq = 0;    // sum of (x + z)^2
};

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial)
    : state_(mix64(seed + kGolden) ^ mix64(trial * kGolden + 0xD1B54A32D192ED03ULL))
{
}

TrialRng::result_type TrialRng::operator()()
{
    state_ += kGolden;
    return mix64(state_);
}

double TrialRng::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

LinkOutcome simulate_link_attempts(double p, long attempts, int ions, TrialRng& rng)
{
    detail::require_probability(p, "p");
    if (attempts < 1 || ions < 1)
        throw DomainError(fmt::format("need n_eg >= 1 and ions >= 1, got {} and {}", attempts, ions));
    return LinkSampler(p, attempts, ions).sample(rng);
}

long simulated_links(double total_km, double spacing_km)
{
    const double ratio = total_km / spacing_km;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio))
        return static_cast<long>(nearest);
    return static_cast<long>(std::ceil(ratio));
}

SimEstimate simulate_chain(const SimConfig& config, const Conventions& conv)
{
    const auto& params = config.params;
    params.validate();
    config.arch.validate_against(params);
    if (config.trials < 1)
        throw DomainError("trials must be at least 1");

    const long links = simulated_links(params.total_km, params.spacing_km);
    const long stations = links - 1;
    const double p = link_success_prob(params.coupling, params.spacing_km, params.attenuation_km);
    const double eps = effective_station_error(params.gate_error, params.initial_fidelity);
    const LinkSampler sampler(p, params.attempts, ions_per_link(config.arch, conv));

    const unsigned workers = detail::resolve_workers(config.workers, config.trials);
    std::vector<Tally> tallies(workers);
    const std::uint64_t block = (config.trials + workers - 1) / workers;
    detail::parallel_for(workers, workers, [&](std::size_t w) {
        Tally& tally = tallies[w];
        const std::uint64_t begin = w * block;
        const std::uint64_t end = std::min<std::uint64_t>(config.trials, begin + block);
        for (std::uint64_t t = begin; t < end; ++t) {
            TrialRng rng(config.seed, t);
            bool up = true;
            for (long l = 0; l < links && up; ++l)
                up = sampler.up(rng);
            if (!up)
                continue;
            unsigned x = 0, z = 0;
            for (long s = 0; s < stations; ++s) {
                x ^= rng.uniform() < eps ? 1u : 0u;
                z ^= rng.uniform() < eps ? 1u : 0u;
            }
            ++tally.successes;
            tally.flips += x + z;
            tally.flips_sq += (x + z) * (x + z);
        }
    });

    Tally total;
    for (const auto& t : tallies) {
        total.successes += t.successes;
        total.flips += t.flips;
        total.flips_sq += t.flips_sq;
    }

    SimEstimate est;
    est.trials_used = config.trials;
    est.successes = total.successes;
    est.seed = config.seed;
    est.links = links;
    est.stations = stations;
    const double n = static_cast<double>(config.trials);
    const double ph = static_cast<double>(total.successes) / n;
    est.p_success = {ph, std::sqrt(ph * (1.0 - ph) / n)};

    if (total.successes > 0) {
        // Per-trial QBER sample is (x + z) / 2.
        const double s = static_cast<double>(total.successes);
        const double mean = 0.5 * static_cast<double>(total.flips) / s;
        double se = 0.0;
        if (total.successes > 1) {
            const double ss = 0.25 * static_cast<double>(total.flips_sq) - s * mean * mean;
            se = std::sqrt(std::max(0.0, ss) / (s - 1.0) / s);
        }
        est.qber = Estimate{mean, se};
    }

    const double sequential = config.arch.variant == Variant::TypeI &&
                                      conv.type1_denominator == Type1Denominator::TwoT
                                  ? 2.0
                                  : 1.0;
    est.cycle_s = cycle_time(params.spacing_km, params.attempts, params.gate_time_s, params.fiber_speed_km_s);
    const double scale = 1.0 / (sequential * est.cycle_s);
    est.raw_rate = {ph * scale, est.p_success.std_error * scale};
    return est;
}

}  // namespace ionrep
