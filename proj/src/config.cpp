#include "ionrep/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace ionrep {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"repeater", {"L_tot", "L0", "L_att", "eta_c", "eps_g", "t0", "F0", "c", "m", "n_eg", "R_source"}},
        {"architecture", {"variant", "comm_ions", "mem_ions", "type1_denominator", "type2_link_ions"}},
        {"sweep",
         {"axis1", "axis1_values", "axis1_range", "axis1_spacing", "axis2", "axis2_values", "axis2_range",
          "axis2_spacing", "L0_grid", "L_tot_grid", "objective", "n_max", "stations_include_endpoints", "workers"}},
        {"simulate", {"trials", "seed", "workers"}},
        {"output", {"format", "path"}},
    };
    return keys;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Section {
public:
    Section(const pt::ptree* tree, std::string name)
        : tree_(tree)
        , name_(std::move(name))
    {
    }

    std::optional<std::string> raw(const std::string& key) const
    {
        if (!tree_)
            return std::nullopt;
        if (auto v = tree_->get_optional<std::string>(key))
            return trim(*v);
        return std::nullopt;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        throw ConfigError(fmt::format("{}.{}: {}", name_, key, what));
    }

    std::optional<double> real(const std::string& key) const
    {
        auto s = raw(key);
        if (!s)
            return std::nullopt;
        return parse_real(key, *s);
    }

    double parse_real(const std::string& key, const std::string& s) const
    {
        double v = 0.0;
        const auto t = trim(s);
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
            fail(key, fmt::format("expected a number, got '{}'", t));
        return v;
    }

    template <class Int>
    std::optional<Int> integer(const std::string& key) const
    {
        auto s = raw(key);
        if (!s)
            return std::nullopt;
        Int v{};
        auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
        if (ec != std::errc{} || ptr != s->data() + s->size() || s->empty())
            fail(key, fmt::format("expected an integer, got '{}'", *s));
        return v;
    }

    std::optional<bool> boolean(const std::string& key) const
    {
        auto s = raw(key);
        if (!s)
            return std::nullopt;
        if (*s == "true" || *s == "1" || *s == "yes")
            return true;
        if (*s == "false" || *s == "0" || *s == "no")
            return false;
        fail(key, fmt::format("expected true or false, got '{}'", *s));
    }

    std::vector<double> list(const std::string& key, const std::string& s) const
    {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ','))
            out.push_back(parse_real(key, item));
        return out;
    }

    template <class Fn>
    auto convert(const std::string& key, Fn&& fn) const -> std::optional<decltype(fn(std::string{}))>
    {
        auto s = raw(key);
        if (!s)
            return std::nullopt;
        try {
            return fn(*s);
        } catch (const DomainError& e) {
            fail(key, e.what());
        }
    }

private:
    const pt::ptree* tree_;
    std::string name_;
};

std::optional<SweepAxis> read_stepped(const Section& sec, const std::string& key, Parameter param)
{
    auto s = sec.raw(key);
    if (!s)
        return std::nullopt;
    auto v = sec.list(key, *s);
    if (v.size() != 3)
        sec.fail(key, "expected 'first, last, step'");
    try {
        return SweepAxis::stepped(param, v[0], v[1], v[2]);
    } catch (const DomainError& e) {
        sec.fail(key, e.what());
    }
}

std::optional<SweepAxis> read_axis(const Section& sec, const std::string& prefix)
{
    auto name = sec.raw(prefix);
    auto values = sec.raw(prefix + "_values");
    auto range = sec.raw(prefix + "_range");
    auto spacing = sec.raw(prefix + "_spacing");
    if (!name) {
        if (values || range || spacing)
            sec.fail(prefix, "axis values given without an axis name");
        return std::nullopt;
    }
    const Parameter param = *sec.convert(prefix, parameter_from_string);
    if (values.has_value() == range.has_value())
        sec.fail(prefix, fmt::format("give exactly one of {0}_values or {0}_range", prefix));
    try {
        if (values)
            return SweepAxis(param, sec.list(prefix + "_values", *values));
        auto r = sec.list(prefix + "_range", *range);
        if (r.size() != 3 || r[2] < 1 || r[2] != std::floor(r[2]))
            sec.fail(prefix + "_range", "expected 'first, last, count' with integer count >= 1");
        const auto count = static_cast<std::size_t>(r[2]);
        if (!spacing || *spacing == "linear")
            return SweepAxis::linear(param, r[0], r[1], count);
        if (*spacing == "log")
            return SweepAxis::log_spaced(param, r[0], r[1], count);
        sec.fail(prefix + "_spacing", fmt::format("expected linear or log, got '{}'", *spacing));
    } catch (const DomainError& e) {
        sec.fail(prefix, e.what());
    }
}

// Maps a failed RepeaterParams invariant back to its config key.
void validate_params(const RepeaterParams& p)
{
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("repeater: {}", e.what()));
    }
}

}  // namespace

OutputFormat output_format_from_string(const std::string& s)
{
    if (s == "csv")
        return OutputFormat::Csv;
    if (s == "json")
        return OutputFormat::Json;
    throw DomainError(fmt::format("format must be csv or json, got '{}'", s));
}

RunConfig parse_config(const std::string& text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
    }

    for (const auto& [section, body] : tree) {
        auto it = schema().find(section);
        if (it == schema().end())
            throw ConfigError(fmt::format("unknown section or top-level key '{}'", section));
        for (const auto& [key, value] : body)
            if (!it->second.count(key))
                throw ConfigError(fmt::format("{}.{}: unknown key", section, key));
    }

    auto section = [&](const char* name) {
        auto child = tree.get_child_optional(name);
        return Section(child ? &*child : nullptr, name);
    };

    RunConfig cfg;
    const Section rep = section("repeater");
    auto& p = cfg.params;

    auto total = rep.real("L_tot");
    auto spacing = rep.real("L0");
    auto coupling = rep.real("eta_c");
    if (!total)
        rep.fail("L_tot", "required");
    if (!spacing)
        rep.fail("L0", "required");
    if (!coupling)
        rep.fail("eta_c", "required");
    p.total_km = *total;
    p.spacing_km = *spacing;
    p.coupling = *coupling;

    auto check = [&](const char* key, bool ok, const std::string& constraint) {
        if (!ok)
            rep.fail(key, constraint);
    };
    check("L0", p.spacing_km > 0.0, fmt::format("must be > 0, got {}", p.spacing_km));
    check("eta_c", p.coupling >= 0.0 && p.coupling <= 1.0,
          fmt::format("must lie in [0,1], got {}", p.coupling));

    if (auto v = rep.real("L_att")) {
        p.attenuation_km = *v;
        check("L_att", *v > 0.0, fmt::format("must be > 0, got {}", *v));
    }
    if (auto v = rep.real("eps_g")) {
        p.gate_error = *v;
        check("eps_g", *v >= 0.0 && *v <= 1.0, fmt::format("must lie in [0,1], got {}", *v));
    }
    if (auto v = rep.real("t0")) {
        p.gate_time_s = *v;
        check("t0", *v >= 0.0, fmt::format("must be >= 0, got {}", *v));
    }
    if (auto v = rep.real("F0")) {
        p.initial_fidelity = *v;
        check("F0", *v >= 0.0 && *v <= 1.0, fmt::format("must lie in [0,1], got {}", *v));
    }
    if (auto v = rep.real("c")) {
        p.fiber_speed_km_s = *v;
        check("c", *v > 0.0, fmt::format("must be > 0, got {}", *v));
    }
    if (auto v = rep.real("R_source")) {
        p.source_rate_hz = *v;
        check("R_source", *v >= 0.0, fmt::format("must be >= 0, got {}", *v));
    }
    if (auto v = rep.integer<long>("n_eg")) {
        p.attempts = *v;
        check("n_eg", *v >= 1, fmt::format("must be >= 1, got {}", *v));
    }
    check("L_tot", p.total_km >= p.spacing_km,
          fmt::format("must be >= L0 ({}), got {}", p.spacing_km, p.total_km));
    const auto m = rep.integer<int>("m");
    if (m)
        check("m", *m >= 1, fmt::format("must be >= 1, got {}", *m));

    const Section arch = section("architecture");
    const auto comm = arch.integer<int>("comm_ions");
    if (m && comm && *m != *comm)
        arch.fail("comm_ions", fmt::format("disagrees with repeater.m = {}", *m));
    const int ions = comm ? *comm : (m ? *m : 1);
    if (auto v = arch.convert("variant", variant_from_string))
        cfg.arch.variant = *v;
    else
        cfg.arch.variant = ions == 1 ? Variant::TypeI : Variant::TypeII;
    cfg.arch.comm_ions = ions;
    if (auto v = arch.integer<int>("mem_ions"))
        cfg.arch.mem_ions = *v;
    try {
        cfg.arch.validate();
    } catch (const ArchitectureMismatch& e) {
        arch.fail(comm ? "comm_ions" : "variant", e.what());
    }
    p.comm_ions = ions;
    if (auto v = arch.convert("type1_denominator", type1_denominator_from_string))
        cfg.conv.type1_denominator = *v;
    if (auto v = arch.convert("type2_link_ions", type2_link_ions_from_string))
        cfg.conv.type2_link_ions = *v;
    validate_params(p);

    const Section sw = section("sweep");
    if (auto a = read_axis(sw, "axis1"))
        cfg.sweep.axes.push_back(*a);
    if (auto a = read_axis(sw, "axis2")) {
        if (cfg.sweep.axes.empty())
            sw.fail("axis2", "given without axis1");
        if (a->parameter() == cfg.sweep.axes[0].parameter())
            sw.fail("axis2", "names the same parameter as axis1");
        cfg.sweep.axes.push_back(*a);
    }
    cfg.sweep.spacing_grid = read_stepped(sw, "L0_grid", Parameter::SpacingKm);
    cfg.sweep.total_grid = read_stepped(sw, "L_tot_grid", Parameter::TotalKm);
    if (auto v = sw.convert("objective", objective_from_string))
        cfg.sweep.objective = *v;
    if (auto v = sw.integer<long>("n_max")) {
        if (*v < 1)
            sw.fail("n_max", fmt::format("must be >= 1, got {}", *v));
        cfg.sweep.search.max_attempts = *v;
    }
    if (auto v = sw.boolean("stations_include_endpoints"))
        cfg.conv.stations_include_endpoints = *v;
    if (auto v = sw.integer<unsigned>("workers"))
        cfg.sweep.search.workers = *v;

    const Section sim = section("simulate");
    if (auto v = sim.integer<std::uint64_t>("trials")) {
        if (*v < 1)
            sim.fail("trials", "must be >= 1");
        cfg.simulate.trials = *v;
    }
    cfg.simulate.seed = sim.integer<std::uint64_t>("seed");
    if (auto v = sim.integer<unsigned>("workers"))
        cfg.simulate.workers = *v;

    const Section out = section("output");
    if (auto v = out.convert("format", output_format_from_string))
        cfg.output.format = *v;
    cfg.output.path = out.raw("path");

    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open config file '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace ionrep
