#pragma once

// Grid searches over the number of generation attempts and the repeater
// spacing, plus the distance at which a repeater chain beats direct
// transmission.

#include "ionrep/rates.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ionrep {

enum class Objective { MaxRsec, MaxRsecPerQubit };

std::string to_string(Objective o);
Objective objective_from_string(const std::string& s);

/// Sweepable scalar of RepeaterParams.
enum class Parameter { TotalKm, SpacingKm, AttenuationKm, Coupling, GateError, GateTime, InitialFidelity,
                       FiberSpeed, SourceRate };

std::string to_string(Parameter p);
Parameter parameter_from_string(const std::string& s);
void set_parameter(RepeaterParams& params, Parameter p, double value);
double get_parameter(const RepeaterParams& params, Parameter p);

/// Named, strictly increasing, nonempty list of values.
class SweepAxis {
public:
    SweepAxis(Parameter parameter, std::vector<double> values);

    static SweepAxis linear(Parameter parameter, double first, double last, std::size_t count);
    static SweepAxis log_spaced(Parameter parameter, double first, double last, std::size_t count);
    /// first, first+step, ... up to last (inclusive within step/1e6).
    static SweepAxis stepped(Parameter parameter, double first, double last, double step);

    Parameter parameter() const { return parameter_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    Parameter parameter_;
    std::vector<double> values_;
};

struct SearchOptions {
    long max_attempts = 100000;   // n_max
    /// Worker threads for grid evaluation; 0 picks hardware concurrency.
    unsigned workers = 0;
};

struct AttemptOptimum {
    long attempts = 1;
    RateReport report;
    /// The optimum sits on max_attempts; a larger bound may do better.
    bool at_bound = false;
};

struct OptimizationResult {
    RepeaterParams best_params;
    RateReport best_report;
    long attempts_opt = 1;
    double spacing_opt_km = 0.0;
    Objective objective = Objective::MaxRsec;
    double objective_value = 0.0;
    bool at_bound = false;
};

/// Number of stations counted by the per-qubit metric.
double deployed_stations(double total_km, double spacing_km, bool include_endpoints);

double objective_value(const RateReport& report, const RepeaterParams& params, const ArchitectureSpec& arch,
                       Objective objective, const Conventions& conv);

/// Exhaustive scan of n_eg in [1, max_attempts] for the largest secret rate,
/// ties going to the smaller n_eg. Zero-key points return the largest raw
/// rate with report.zero_key set.
AttemptOptimum optimize_attempts(const RepeaterParams& params, const ArchitectureSpec& arch,
                                 const Conventions& conv = {}, const SearchOptions& opts = {});

/// Grid argmax over L0 of the objective with n_eg optimized at every point.
OptimizationResult optimize_spacing(const RepeaterParams& params, const ArchitectureSpec& arch,
                                    const SweepAxis& spacing_grid, Objective objective,
                                    const Conventions& conv = {}, const SearchOptions& opts = {});

/// Coarse 0.5 km scan over [0.5, min(100, L_tot)] then a 0.1 km scan around
/// the coarse optimum.
OptimizationResult optimize_spacing_refined(const RepeaterParams& params, const ArchitectureSpec& arch,
                                            Objective objective, const Conventions& conv = {},
                                            const SearchOptions& opts = {});

/// Smallest grid spacing whose n_eg-optimized secret rate is positive.
std::optional<double> min_viable_spacing(const RepeaterParams& params, const ArchitectureSpec& arch,
                                         const SweepAxis& spacing_grid, const Conventions& conv = {},
                                         const SearchOptions& opts = {});

/// Smallest L_tot at which the n_eg-optimized secret rate exceeds the PLOB
/// rate, refined by bisection to `resolution_km` between bracketing grid
/// points. L0 stays fixed at params.spacing_km.
std::optional<double> crossover_distance(const RepeaterParams& params, const ArchitectureSpec& arch,
                                         const SweepAxis& total_grid, const Conventions& conv = {},
                                         const SearchOptions& opts = {}, double resolution_km = 1.0);

struct SweepRow {
    RepeaterParams params;  // n_eg holds the optimized value
    RateReport report;
    double objective_value = 0.0;
    bool at_bound = false;
};

inline constexpr std::size_t kMaxSweepPoints = 1'000'000;

/// Cartesian product of at most two axes, outer axis major, n_eg optimized
/// at every point.
std::vector<SweepRow> sweep(const RepeaterParams& params, const ArchitectureSpec& arch,
                            const std::vector<SweepAxis>& axes, Objective objective,
                            const Conventions& conv = {}, const SearchOptions& opts = {});

}  // namespace ionrep
