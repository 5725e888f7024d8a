#include "ionrep/optimizer.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace ionrep {

namespace {

constexpr double kTieTolerance = 1e-12;

bool strictly_better(double candidate, double incumbent)
{
    return candidate > incumbent * (1.0 + kTieTolerance) && candidate > incumbent;
}

void require_grid_within(const SweepAxis& grid, double lo_exclusive, double hi_inclusive, const char* what)
{
    for (double v : grid.values())
        if (!(v > lo_exclusive && v <= hi_inclusive))
            throw DomainError(fmt::format("{} grid value {} outside ({}, {}]", what, v, lo_exclusive, hi_inclusive));
}

}  // namespace

std::string to_string(Objective o)
{
    return o == Objective::MaxRsec ? "rsec" : "rsec-per-qubit";
}

Objective objective_from_string(const std::string& s)
{
    if (s == "rsec")
        return Objective::MaxRsec;
    if (s == "rsec-per-qubit")
        return Objective::MaxRsecPerQubit;
    throw DomainError(fmt::format("objective must be rsec or rsec-per-qubit, got '{}'", s));
}

std::string to_string(Parameter p)
{
    switch (p) {
    case Parameter::TotalKm: return "L_tot";
    case Parameter::SpacingKm: return "L0";
    case Parameter::AttenuationKm: return "L_att";
    case Parameter::Coupling: return "eta_c";
    case Parameter::GateError: return "eps_g";
    case Parameter::GateTime: return "t0";
    case Parameter::InitialFidelity: return "F0";
    case Parameter::FiberSpeed: return "c";
    case Parameter::SourceRate: return "R_source";
    }
    return "?";
}

Parameter parameter_from_string(const std::string& s)
{
    for (auto p : {Parameter::TotalKm, Parameter::SpacingKm, Parameter::AttenuationKm, Parameter::Coupling,
                   Parameter::GateError, Parameter::GateTime, Parameter::InitialFidelity, Parameter::FiberSpeed,
                   Parameter::SourceRate})
        if (to_string(p) == s)
            return p;
    throw DomainError(fmt::format("unknown sweep parameter '{}'", s));
}

void set_parameter(RepeaterParams& params, Parameter p, double value)
{
    switch (p) {
    case Parameter::TotalKm: params.total_km = value; break;
    case Parameter::SpacingKm: params.spacing_km = value; break;
    case Parameter::AttenuationKm: params.attenuation_km = value; break;
    case Parameter::Coupling: params.coupling = value; break;
    case Parameter::GateError: params.gate_error = value; break;
    case Parameter::GateTime: params.gate_time_s = value; break;
    case Parameter::InitialFidelity: params.initial_fidelity = value; break;
    case Parameter::FiberSpeed: params.fiber_speed_km_s = value; break;
    case Parameter::SourceRate: params.source_rate_hz = value; break;
    }
}

double get_parameter(const RepeaterParams& params, Parameter p)
{
    switch (p) {
    case Parameter::TotalKm: return params.total_km;
    case Parameter::SpacingKm: return params.spacing_km;
    case Parameter::AttenuationKm: return params.attenuation_km;
    case Parameter::Coupling: return params.coupling;
    case Parameter::GateError: return params.gate_error;
    case Parameter::GateTime: return params.gate_time_s;
    case Parameter::InitialFidelity: return params.initial_fidelity;
    case Parameter::FiberSpeed: return params.fiber_speed_km_s;
    case Parameter::SourceRate: return params.source_rate_hz;
    }
    return 0.0;
}

SweepAxis::SweepAxis(Parameter parameter, std::vector<double> values)
    : parameter_(parameter)
    , values_(std::move(values))
{
    if (values_.empty())
        throw DomainError(fmt::format("sweep axis {} is empty", to_string(parameter_)));
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (!(values_[i] > values_[i - 1]))
            throw DomainError(fmt::format("sweep axis {} is not strictly increasing at index {}", to_string(parameter_), i));
}

SweepAxis SweepAxis::linear(Parameter parameter, double first, double last, std::size_t count)
{
    if (count == 0)
        throw DomainError("linear axis needs at least one point");
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = count == 1 ? first : first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
    return SweepAxis(parameter, std::move(v));
}

SweepAxis SweepAxis::log_spaced(Parameter parameter, double first, double last, std::size_t count)
{
    if (!(first > 0.0 && last > 0.0))
        throw DomainError("log-spaced axis needs positive bounds");
    auto axis = linear(parameter, std::log10(first), std::log10(last), count);
    std::vector<double> v;
    v.reserve(count);
    for (double x : axis.values())
        v.push_back(std::pow(10.0, x));
    return SweepAxis(parameter, std::move(v));
}

SweepAxis SweepAxis::stepped(Parameter parameter, double first, double last, double step)
{
    if (!(step > 0.0))
        throw DomainError("axis step must be positive");
    std::vector<double> v;
    for (long k = 0;; ++k) {
        const double x = first + static_cast<double>(k) * step;
        if (x > last + step * 1e-6)
            break;
        v.push_back(x);
    }
    return SweepAxis(parameter, std::move(v));
}

double deployed_stations(double total_km, double spacing_km, bool include_endpoints)
{
    const double links = total_km / spacing_km;
    // A single link has no intermediate station; count it as one.
    return include_endpoints ? links + 1.0 : std::max(links - 1.0, 1.0);
}

double objective_value(const RateReport& report, const RepeaterParams& params, const ArchitectureSpec& arch,
                       Objective objective, const Conventions& conv)
{
    if (objective == Objective::MaxRsec)
        return report.secret_rate;
    const double stations = deployed_stations(params.total_km, params.spacing_km, conv.stations_include_endpoints);
    return report.secret_rate / (stations * arch.qubits_per_station());
}

AttemptOptimum optimize_attempts(const RepeaterParams& params, const ArchitectureSpec& arch,
                                 const Conventions& conv, const SearchOptions& opts)
{
    if (opts.max_attempts < 1)
        throw DomainError(fmt::format("n_max must be at least 1, got {}", opts.max_attempts));
    arch.validate_against(params);

    // The secret fraction does not depend on n_eg, so the secret-rate argmax
    // is the raw-rate argmax. Since P_success <= 1, 1/(kT(n)) bounds the rate
    // of every n' >= n; the scan stops once that bound cannot beat the best.
    const double sequential =
        arch.variant == Variant::TypeI && conv.type1_denominator == Type1Denominator::TwoT ? 2.0 : 1.0;
    RepeaterParams trial = params;
    long best_n = 1;
    double best_rate = -1.0;
    for (long n = 1; n <= opts.max_attempts; ++n) {
        trial.attempts = n;
        const double cycle = cycle_time(trial.spacing_km, n, trial.gate_time_s, trial.fiber_speed_km_s);
        if (best_rate >= 0.0 && 1.0 / (sequential * cycle) <= best_rate)
            break;
        const double rate = raw_rate(trial, arch, conv).rate;
        if (best_rate < 0.0 || strictly_better(rate, best_rate)) {
            best_rate = rate;
            best_n = n;
        }
    }

    AttemptOptimum out;
    out.attempts = best_n;
    trial.attempts = best_n;
    out.report = evaluate_point(trial, arch, conv);
    out.at_bound = best_n == opts.max_attempts;
    return out;
}

OptimizationResult optimize_spacing(const RepeaterParams& params, const ArchitectureSpec& arch,
                                    const SweepAxis& spacing_grid, Objective objective, const Conventions& conv,
                                    const SearchOptions& opts)
{
    require_grid_within(spacing_grid, 0.0, params.total_km, "L0");
    const auto& grid = spacing_grid.values();

    std::vector<AttemptOptimum> optima(grid.size());
    detail::parallel_for(grid.size(), opts.workers, [&](std::size_t i) {
        RepeaterParams point = params;
        point.spacing_km = grid[i];
        optima[i] = optimize_attempts(point, arch, conv, opts);
    });

    OptimizationResult best;
    best.objective = objective;
    bool have = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        RepeaterParams point = params;
        point.spacing_km = grid[i];
        point.attempts = optima[i].attempts;
        const double value = objective_value(optima[i].report, point, arch, objective, conv);
        if (!have || strictly_better(value, best.objective_value)) {
            have = true;
            best.best_params = point;
            best.best_report = optima[i].report;
            best.attempts_opt = optima[i].attempts;
            best.spacing_opt_km = grid[i];
            best.objective_value = value;
            best.at_bound = optima[i].at_bound;
        }
    }
    return best;
}

OptimizationResult optimize_spacing_refined(const RepeaterParams& params, const ArchitectureSpec& arch,
                                            Objective objective, const Conventions& conv, const SearchOptions& opts)
{
    constexpr double kCoarseLo = 0.5, kCoarseHi = 100.0, kCoarseStep = 0.5, kFineStep = 0.1;
    const double hi = std::min(kCoarseHi, params.total_km);
    if (hi < kCoarseLo)
        return optimize_spacing(params, arch, SweepAxis(Parameter::SpacingKm, {params.total_km}), objective, conv,
                                opts);
    const auto coarse = optimize_spacing(params, arch, SweepAxis::stepped(Parameter::SpacingKm, kCoarseLo, hi, kCoarseStep),
                                         objective, conv, opts);
    const double lo_fine = std::max(kCoarseLo, coarse.spacing_opt_km - kCoarseStep);
    const double hi_fine = std::min(hi, coarse.spacing_opt_km + kCoarseStep);
    auto fine_axis = SweepAxis::stepped(Parameter::SpacingKm, lo_fine, hi_fine, kFineStep);
    std::vector<double> values;
    for (double v : fine_axis.values())
        values.push_back(std::min(v, hi));
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return optimize_spacing(params, arch, SweepAxis(Parameter::SpacingKm, std::move(values)), objective, conv, opts);
}

std::optional<double> min_viable_spacing(const RepeaterParams& params, const ArchitectureSpec& arch,
                                         const SweepAxis& spacing_grid, const Conventions& conv,
                                         const SearchOptions& opts)
{
    require_grid_within(spacing_grid, 0.0, params.total_km, "L0");
    for (double spacing : spacing_grid.values()) {
        RepeaterParams point = params;
        point.spacing_km = spacing;
        // The QBER does not depend on n_eg, so skip the search where no key survives.
        if (evaluate_point(point, arch, conv).zero_key)
            continue;
        if (optimize_attempts(point, arch, conv, opts).report.secret_rate > 0.0)
            return spacing;
    }
    return std::nullopt;
}

std::optional<double> crossover_distance(const RepeaterParams& params, const ArchitectureSpec& arch,
                                         const SweepAxis& total_grid, const Conventions& conv,
                                         const SearchOptions& opts, double resolution_km)
{
    if (!(resolution_km > 0.0))
        throw DomainError("crossover resolution must be positive");
    require_grid_within(total_grid, params.spacing_km - 1e-12, std::numeric_limits<double>::infinity(), "L_tot");

    auto advantage = [&](double total) {
        RepeaterParams point = params;
        point.total_km = total;
        const auto opt = optimize_attempts(point, arch, conv, opts);
        return opt.report.secret_rate - opt.report.plob_rate;
    };

    const auto& grid = total_grid.values();
    std::vector<double> margin(grid.size());
    detail::parallel_for(grid.size(), opts.workers, [&](std::size_t i) { margin[i] = advantage(grid[i]); });

    const auto first = std::find_if(margin.begin(), margin.end(), [](double m) { return m > 0.0; });
    if (first == margin.end())
        return std::nullopt;
    const auto idx = static_cast<std::size_t>(first - margin.begin());
    if (idx == 0)
        return grid[0];
    double lo = grid[idx - 1], hi = grid[idx];
    while (hi - lo > resolution_km) {
        const double mid = 0.5 * (lo + hi);
        (advantage(mid) > 0.0 ? hi : lo) = mid;
    }
    return hi;
}

std::vector<SweepRow> sweep(const RepeaterParams& params, const ArchitectureSpec& arch,
                            const std::vector<SweepAxis>& axes, Objective objective, const Conventions& conv,
                            const SearchOptions& opts)
{
    if (axes.empty() || axes.size() > 2)
        throw DomainError(fmt::format("a sweep takes one or two axes, got {}", axes.size()));
    if (axes.size() == 2 && axes[0].parameter() == axes[1].parameter())
        throw DomainError("both sweep axes name the same parameter");
    const std::size_t inner = axes.size() == 2 ? axes[1].size() : 1;
    const std::size_t total = axes[0].size() * inner;
    if (total > kMaxSweepPoints)
        throw DomainError(fmt::format("sweep of {} points exceeds the limit of {}", total, kMaxSweepPoints));

    std::vector<SweepRow> rows(total);
    detail::parallel_for(total, opts.workers, [&](std::size_t k) {
        RepeaterParams point = params;
        set_parameter(point, axes[0].parameter(), axes[0].values()[k / inner]);
        if (axes.size() == 2)
            set_parameter(point, axes[1].parameter(), axes[1].values()[k % inner]);
        point.validate();
        const auto opt = optimize_attempts(point, arch, conv, opts);
        point.attempts = opt.attempts;
        rows[k] = SweepRow{point, opt.report, objective_value(opt.report, point, arch, objective, conv), opt.at_bound};
    });
    return rows;
}

}  // namespace ionrep
