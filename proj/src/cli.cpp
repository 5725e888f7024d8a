#include "ionrep/cli.hpp"

#include "ionrep/config.hpp"
#include "ionrep/report_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace ionrep {

using nlohmann::json;

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string config_path;
    std::string out_path;
    std::string format;
    std::string objective;
    std::string type1_denominator;
    std::string type2_link_ions;
    std::string stations_include_endpoints;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::optional<double> fiber_speed;
    std::optional<unsigned> workers;
};

void apply_overrides(RunConfig& cfg, const Flags& f)
{
    try {
        if (!f.format.empty())
            cfg.output.format = output_format_from_string(f.format);
        if (!f.objective.empty())
            cfg.sweep.objective = objective_from_string(f.objective);
        if (!f.type1_denominator.empty())
            cfg.conv.type1_denominator = type1_denominator_from_string(f.type1_denominator);
        if (!f.type2_link_ions.empty())
            cfg.conv.type2_link_ions = type2_link_ions_from_string(f.type2_link_ions);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (!f.stations_include_endpoints.empty()) {
        if (f.stations_include_endpoints == "true")
            cfg.conv.stations_include_endpoints = true;
        else if (f.stations_include_endpoints == "false")
            cfg.conv.stations_include_endpoints = false;
        else
            throw ConfigError("--stations-include-endpoints expects true or false");
    }
    if (!f.out_path.empty())
        cfg.output.path = f.out_path;
    if (f.seed)
        cfg.simulate.seed = f.seed;
    if (f.trials) {
        if (*f.trials < 1)
            throw ConfigError("--trials must be at least 1");
        cfg.simulate.trials = *f.trials;
    }
    if (f.fiber_speed) {
        if (!(*f.fiber_speed > 0.0))
            throw ConfigError("--fiber-speed must be positive");
        cfg.params.fiber_speed_km_s = *f.fiber_speed;
    }
    if (f.workers) {
        cfg.simulate.workers = *f.workers;
        cfg.sweep.search.workers = *f.workers;
    }
}

std::string z_score(double estimate, double se, double analytic)
{
    if (se > 0.0)
        return format_number((estimate - analytic) / se);
    return estimate == analytic ? "0" : (estimate > analytic ? "inf" : "-inf");
}

double z_value(double estimate, double se, double analytic)
{
    if (se > 0.0)
        return (estimate - analytic) / se;
    if (estimate == analytic)
        return 0.0;
    return estimate > analytic ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

json z_json(double z)
{
    return std::isfinite(z) ? json(z) : json(z > 0 ? "inf" : "-inf");
}

int cmd_rate(const RunConfig& cfg, std::ostream& out)
{
    const auto report = evaluate_point(cfg.params, cfg.arch, cfg.conv);
    if (cfg.output.format == OutputFormat::Json)
        out << json{{"params", cfg.params}, {"architecture", cfg.arch}, {"conventions", cfg.conv}, {"report", report}}
                   .dump(2)
            << '\n';
    else
        out << rate_csv_header() << '\n' << rate_csv_row(cfg.params, report) << '\n';
    return report.zero_key ? kExitZeroKey : kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.sweep.axes.empty())
        throw ConfigError("sweep.axis1: required by the sweep command");
    const auto rows = sweep(cfg.params, cfg.arch, cfg.sweep.axes, cfg.sweep.objective, cfg.conv, cfg.sweep.search);
    if (cfg.output.format == OutputFormat::Json)
        out << json(rows).dump(2) << '\n';
    else
        write_sweep_csv(out, rows);
    return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const auto result =
        cfg.sweep.spacing_grid
            ? optimize_spacing(cfg.params, cfg.arch, *cfg.sweep.spacing_grid, cfg.sweep.objective, cfg.conv,
                               cfg.sweep.search)
            : optimize_spacing_refined(cfg.params, cfg.arch, cfg.sweep.objective, cfg.conv, cfg.sweep.search);
    if (result.at_bound)
        err << fmt::format("warning: optimal n_eg sits on the search bound n_max = {}\n",
                           cfg.sweep.search.max_attempts);
    if (cfg.output.format == OutputFormat::Json) {
        out << json(result).dump(2) << '\n';
    } else {
        out << rate_csv_header() << ",objective,objective_value\n"
            << rate_csv_row(result.best_params, result.best_report) << ',' << to_string(result.objective) << ','
            << format_number(result.objective_value) << '\n';
    }
    return result.best_report.zero_key ? kExitZeroKey : kExitOk;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const double spacing = cfg.params.spacing_km;
    const SweepAxis grid = cfg.sweep.total_grid
                               ? *cfg.sweep.total_grid
                               : SweepAxis::stepped(Parameter::TotalKm, spacing, std::max(400.0, spacing), 5.0);
    const auto rows = sweep(cfg.params, cfg.arch, {grid}, Objective::MaxRsec, cfg.conv, cfg.sweep.search);
    const auto crossover = crossover_distance(cfg.params, cfg.arch, grid, cfg.conv, cfg.sweep.search);

    if (cfg.output.format == OutputFormat::Json) {
        json j_rows = json::array();
        for (const auto& r : rows)
            j_rows.push_back({{"L_tot", r.params.total_km},
                              {"n_eg", r.params.attempts},
                              {"R_sec", r.report.secret_rate},
                              {"R_rci", r.report.rci_rate},
                              {"R_plob", r.report.plob_rate},
                              {"beats_plob", r.report.secret_rate > r.report.plob_rate}});
        out << json{{"rows", j_rows}, {"crossover_km", crossover ? json(*crossover) : json(nullptr)}}.dump(2)
            << '\n';
    } else {
        out << "L_tot,n_eg,R_sec,R_rci,R_plob,beats_plob\n";
        for (const auto& r : rows)
            out << fmt::format("{},{},{},{},{},{}\n", format_number(r.params.total_km), r.params.attempts,
                               format_number(r.report.secret_rate), format_number(r.report.rci_rate),
                               format_number(r.report.plob_rate),
                               r.report.secret_rate > r.report.plob_rate ? "true" : "false");
    }
    if (crossover)
        err << "crossover_km=" << format_number(*crossover) << '\n';
    else
        err << "crossover_km=none\n";
    return kExitOk;
}

int cmd_simulate(RunConfig cfg, std::ostream& out, std::ostream& err)
{
    if (!cfg.simulate.seed) {
        std::random_device rd;
        cfg.simulate.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        err << "seed=" << *cfg.simulate.seed << '\n';
    }
    SimConfig sim{cfg.params, cfg.arch, cfg.simulate.trials, *cfg.simulate.seed, cfg.simulate.workers};
    const auto est = simulate_chain(sim, cfg.conv);

    // Analytic reference at the simulated integer geometry.
    RepeaterParams geom = cfg.params;
    geom.total_km = static_cast<double>(est.links) * geom.spacing_km;
    const auto analytic = evaluate_point(geom, cfg.arch, cfg.conv);

    if (!est.qber)
        err << "warning: no trial produced an end-to-end pair; QBER estimate absent\n";

    const double zp = z_value(est.p_success.value, est.p_success.std_error, analytic.p_success);
    const double zr = z_value(est.raw_rate.value, est.raw_rate.std_error, analytic.raw_rate);
    if (cfg.output.format == OutputFormat::Json) {
        json z{{"P_success", z_json(zp)}, {"R_raw", z_json(zr)}, {"Q", nullptr}};
        if (est.qber)
            z["Q"] = z_json(z_value(est.qber->value, est.qber->std_error, analytic.qber));
        out << json{{"params", geom}, {"estimate", est}, {"analytic", analytic}, {"z_scores", z}}.dump(2) << '\n';
    } else {
        out << "quantity,analytic,estimate,std_error,z_score\n";
        out << fmt::format("P_success,{},{},{},{}\n", format_number(analytic.p_success),
                           format_number(est.p_success.value), format_number(est.p_success.std_error),
                           z_score(est.p_success.value, est.p_success.std_error, analytic.p_success));
        if (est.qber)
            out << fmt::format("Q,{},{},{},{}\n", format_number(analytic.qber), format_number(est.qber->value),
                               format_number(est.qber->std_error),
                               z_score(est.qber->value, est.qber->std_error, analytic.qber));
        else
            out << fmt::format("Q,{},,,\n", format_number(analytic.qber));
        out << fmt::format("R_raw,{},{},{},{}\n", format_number(analytic.raw_rate), format_number(est.raw_rate.value),
                           format_number(est.raw_rate.std_error),
                           z_score(est.raw_rate.value, est.raw_rate.std_error, analytic.raw_rate));
    }
    return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Key rates, optimization and simulation of trapped-ion repeater chains", "ionrep"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", f.out_path, "Write the report to this file instead of stdout");
    app.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", f.seed, "Simulation seed (random and printed when absent)");
    app.add_option("--trials", f.trials, "Simulation trials");
    app.add_option("--objective", f.objective, "rsec or rsec-per-qubit")
        ->check(CLI::IsMember({"rsec", "rsec-per-qubit"}));
    app.add_option("--type1-denominator", f.type1_denominator, "Type I raw rate denominator: 2T or T")
        ->check(CLI::IsMember({"2T", "T"}));
    app.add_option("--type2-link-ions", f.type2_link_ions, "Type II ions per link: half or all")
        ->check(CLI::IsMember({"half", "all"}));
    app.add_option("--stations-include-endpoints", f.stations_include_endpoints,
                   "Count end nodes in the per-qubit metric: true or false")
        ->check(CLI::IsMember({"true", "false"}));
    app.add_option("--fiber-speed", f.fiber_speed, "Signal speed in fiber, km/s");
    app.add_option("--workers", f.workers, "Worker threads (0 = hardware concurrency)");
    app.fallthrough();

    auto* rate = app.add_subcommand("rate", "Evaluate one parameter point");
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate the [sweep] axes with n_eg optimized per point");
    auto* optimize = app.add_subcommand("optimize", "Optimize L0 and n_eg");
    auto* benchmark = app.add_subcommand("benchmark", "Secret, RCI and PLOB rates versus L_tot");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate against the closed form");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        RunConfig cfg = load_config(f.config_path);
        apply_overrides(cfg, f);

        std::ofstream file;
        std::ostream* sink = &out;
        if (cfg.output.path) {
            file.open(*cfg.output.path, std::ios::binary);
            if (!file)
                throw IoError(fmt::format("cannot open output file '{}'", *cfg.output.path));
            sink = &file;
        }

        int code = kExitOk;
        if (rate->parsed())
            code = cmd_rate(cfg, *sink);
        else if (sweep_cmd->parsed())
            code = cmd_sweep(cfg, *sink);
        else if (optimize->parsed())
            code = cmd_optimize(cfg, *sink, err);
        else if (benchmark->parsed())
            code = cmd_benchmark(cfg, *sink, err);
        else if (simulate->parsed())
            code = cmd_simulate(cfg, *sink, err);

        sink->flush();
        if (!*sink)
            throw IoError("failed writing the report");
        if (code == kExitZeroKey)
            err << "no secret key at this point (secret fraction clamped to 0)\n";
        return code;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::logic_error& e) {  // DomainError, ArchitectureMismatch
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
}

}  // namespace ionrep
