#pragma once

// Monte Carlo simulation of the Type I (sequential) and Type II (parallel)
// repeater protocols. Serves as a statistical cross-check of the closed-form
// rates: it samples individual generation attempts and per-station Pauli
// flips instead of evaluating the formulas.

#include "ionrep/rates.hpp"

#include <cstdint>
#include <optional>

namespace ionrep {

/// SplitMix64 stream. Trial i of a run seeded with s draws from
/// TrialRng(s, i), so results never depend on how trials are scheduled.
class TrialRng {
public:
    using result_type = std::uint64_t;

    TrialRng(std::uint64_t seed, std::uint64_t trial);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t state_;
};

struct SimConfig {
    RepeaterParams params;
    ArchitectureSpec arch;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    /// 0 picks hardware concurrency. Does not affect the result.
    unsigned workers = 0;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;

    bool operator==(const Estimate&) const = default;
};

struct SimEstimate {
    Estimate p_success;
    /// Absent when no trial produced an end-to-end pair.
    std::optional<Estimate> qber;
    Estimate raw_rate;
    std::uint64_t trials_used = 0;
    std::uint64_t successes = 0;
    std::uint64_t seed = 0;
    /// Integer geometry actually simulated.
    long links = 0;
    long stations = 0;
    double cycle_s = 0.0;

    bool operator==(const SimEstimate&) const = default;
};

struct LinkOutcome {
    bool success = false;
    long attempts_used = 0;
};

/// One elementary link: `ions` independent pairs each try up to `attempts`
/// rounds with per-round success p; the link is up at the first round in
/// which any pair succeeds.
LinkOutcome simulate_link_attempts(double p, long attempts, int ions, TrialRng& rng);

/// ceil(L_tot / L0), tolerant of round-off in the ratio.
long simulated_links(double total_km, double spacing_km);

SimEstimate simulate_chain(const SimConfig& config, const Conventions& conv = {});

}  // namespace ionrep
