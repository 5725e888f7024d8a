#include "ionrep/report_io.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace ionrep {

using nlohmann::json;

std::string format_number(double v)
{
    if (v != 0.0 && std::isfinite(v) && std::abs(v) < 1e-3)
        return fmt::format("{:.5e}", v);
    return fmt::format("{:.6g}", v);
}

const std::vector<std::string>& parameter_columns()
{
    static const std::vector<std::string> cols{"L_tot", "L0", "L_att", "eta_c", "eps_g", "t0",
                                               "F0", "c", "m", "n_eg", "R_source"};
    return cols;
}

const std::vector<std::string>& report_columns()
{
    static const std::vector<std::string> cols{"p_link", "P_success", "T_cycle", "R_raw", "Q",
                                               "secret_fraction", "R_sec", "I_R", "R_rci", "R_plob"};
    return cols;
}

namespace {

std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += ',';
        out += parts[i];
    }
    return out;
}

std::vector<std::string> parameter_cells(const RepeaterParams& p)
{
    return {format_number(p.total_km),         format_number(p.spacing_km),     format_number(p.attenuation_km),
            format_number(p.coupling),         format_number(p.gate_error),     format_number(p.gate_time_s),
            format_number(p.initial_fidelity), format_number(p.fiber_speed_km_s), std::to_string(p.comm_ions),
            std::to_string(p.attempts),        format_number(p.source_rate_hz)};
}

std::vector<std::string> report_cells(const RateReport& r)
{
    return {format_number(r.p_link),          format_number(r.p_success),   format_number(r.cycle_s),
            format_number(r.raw_rate),        format_number(r.qber),        format_number(r.secret_fraction),
            format_number(r.secret_rate),     format_number(r.rci),         format_number(r.rci_rate),
            format_number(r.plob_rate)};
}

}  // namespace

std::string rate_csv_header()
{
    auto cols = parameter_columns();
    cols.insert(cols.end(), report_columns().begin(), report_columns().end());
    cols.push_back("zero_key");
    return join(cols);
}

std::string rate_csv_row(const RepeaterParams& params, const RateReport& report)
{
    auto cells = parameter_cells(params);
    auto rc = report_cells(report);
    cells.insert(cells.end(), rc.begin(), rc.end());
    cells.push_back(report.zero_key ? "true" : "false");
    return join(cells);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << rate_csv_header() << ",objective,n_eg_at_bound\n";
    for (const auto& row : rows)
        out << rate_csv_row(row.params, row.report) << ',' << format_number(row.objective_value) << ','
            << (row.at_bound ? "true" : "false") << '\n';
}

void to_json(json& j, const RepeaterParams& p)
{
    j = json{{"L_tot", p.total_km},         {"L0", p.spacing_km},    {"L_att", p.attenuation_km},
             {"eta_c", p.coupling},         {"eps_g", p.gate_error}, {"t0", p.gate_time_s},
             {"F0", p.initial_fidelity},    {"c", p.fiber_speed_km_s}, {"m", p.comm_ions},
             {"n_eg", p.attempts},          {"R_source", p.source_rate_hz}};
}

void from_json(const json& j, RepeaterParams& p)
{
    j.at("L_tot").get_to(p.total_km);
    j.at("L0").get_to(p.spacing_km);
    j.at("L_att").get_to(p.attenuation_km);
    j.at("eta_c").get_to(p.coupling);
    j.at("eps_g").get_to(p.gate_error);
    j.at("t0").get_to(p.gate_time_s);
    j.at("F0").get_to(p.initial_fidelity);
    j.at("c").get_to(p.fiber_speed_km_s);
    j.at("m").get_to(p.comm_ions);
    j.at("n_eg").get_to(p.attempts);
    j.at("R_source").get_to(p.source_rate_hz);
}

void to_json(json& j, const ArchitectureSpec& a)
{
    j = json{{"variant", to_string(a.variant)}, {"comm_ions", a.comm_ions}, {"mem_ions", a.mem_ions}};
}

void from_json(const json& j, ArchitectureSpec& a)
{
    a.variant = variant_from_string(j.at("variant").get<std::string>());
    j.at("comm_ions").get_to(a.comm_ions);
    j.at("mem_ions").get_to(a.mem_ions);
}

void to_json(json& j, const Conventions& c)
{
    j = json{{"type1_denominator", to_string(c.type1_denominator)},
             {"type2_link_ions", to_string(c.type2_link_ions)},
             {"stations_include_endpoints", c.stations_include_endpoints}};
}

void from_json(const json& j, Conventions& c)
{
    c.type1_denominator = type1_denominator_from_string(j.at("type1_denominator").get<std::string>());
    c.type2_link_ions = type2_link_ions_from_string(j.at("type2_link_ions").get<std::string>());
    j.at("stations_include_endpoints").get_to(c.stations_include_endpoints);
}

void to_json(json& j, const RateReport& r)
{
    j = json{{"p_link", r.p_link},
             {"P_success", r.p_success},
             {"T_cycle", r.cycle_s},
             {"R_raw", r.raw_rate},
             {"Q", r.qber},
             {"secret_fraction", r.secret_fraction},
             {"R_sec", r.secret_rate},
             {"I_R", r.rci},
             {"R_rci", r.rci_rate},
             {"R_plob", r.plob_rate},
             {"zero_key", r.zero_key}};
}

void from_json(const json& j, RateReport& r)
{
    j.at("p_link").get_to(r.p_link);
    j.at("P_success").get_to(r.p_success);
    j.at("T_cycle").get_to(r.cycle_s);
    j.at("R_raw").get_to(r.raw_rate);
    j.at("Q").get_to(r.qber);
    j.at("secret_fraction").get_to(r.secret_fraction);
    j.at("R_sec").get_to(r.secret_rate);
    j.at("I_R").get_to(r.rci);
    j.at("R_rci").get_to(r.rci_rate);
    j.at("R_plob").get_to(r.plob_rate);
    j.at("zero_key").get_to(r.zero_key);
}

void to_json(json& j, const Estimate& e)
{
    j = json{{"value", e.value}, {"std_error", e.std_error}};
}

void from_json(const json& j, Estimate& e)
{
    j.at("value").get_to(e.value);
    j.at("std_error").get_to(e.std_error);
}

void to_json(json& j, const SimEstimate& s)
{
    j = json{{"P_success", s.p_success},
             {"Q", s.qber ? json(*s.qber) : json(nullptr)},
             {"R_raw", s.raw_rate},
             {"trials", s.trials_used},
             {"successes", s.successes},
             {"seed", s.seed},
             {"links", s.links},
             {"stations", s.stations},
             {"T_cycle", s.cycle_s}};
}

void from_json(const json& j, SimEstimate& s)
{
    j.at("P_success").get_to(s.p_success);
    if (j.at("Q").is_null())
        s.qber.reset();
    else
        s.qber = j.at("Q").get<Estimate>();
    j.at("R_raw").get_to(s.raw_rate);
    j.at("trials").get_to(s.trials_used);
    j.at("successes").get_to(s.successes);
    j.at("seed").get_to(s.seed);
    j.at("links").get_to(s.links);
    j.at("stations").get_to(s.stations);
    j.at("T_cycle").get_to(s.cycle_s);
}

void to_json(json& j, const OptimizationResult& r)
{
    j = json{{"params", r.best_params},         {"report", r.best_report},
             {"n_eg_opt", r.attempts_opt},      {"L0_opt", r.spacing_opt_km},
             {"objective", to_string(r.objective)}, {"objective_value", r.objective_value},
             {"n_eg_at_bound", r.at_bound}};
}

void from_json(const json& j, OptimizationResult& r)
{
    j.at("params").get_to(r.best_params);
    j.at("report").get_to(r.best_report);
    j.at("n_eg_opt").get_to(r.attempts_opt);
    j.at("L0_opt").get_to(r.spacing_opt_km);
    r.objective = objective_from_string(j.at("objective").get<std::string>());
    j.at("objective_value").get_to(r.objective_value);
    j.at("n_eg_at_bound").get_to(r.at_bound);
}

void to_json(json& j, const SweepRow& r)
{
    j = json{{"params", r.params}, {"report", r.report}, {"objective", r.objective_value}, {"n_eg_at_bound", r.at_bound}};
}

void from_json(const json& j, SweepRow& r)
{
    j.at("params").get_to(r.params);
    j.at("report").get_to(r.report);
    j.at("objective").get_to(r.objective_value);
    j.at("n_eg_at_bound").get_to(r.at_bound);
}

}  // namespace ionrep
