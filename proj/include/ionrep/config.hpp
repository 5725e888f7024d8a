#pragma once

// INI run configuration. Sections and keys:
//
//   [repeater]      L_tot L0 L_att eta_c eps_g t0 F0 c m n_eg R_source
//   [architecture]  variant comm_ions mem_ions type1_denominator type2_link_ions
//   [sweep]         axis1 axis1_values | axis1_range axis1_spacing
//                   axis2 axis2_values | axis2_range axis2_spacing
//                   L0_grid L_tot_grid objective n_max stations_include_endpoints workers
//   [simulate]      trials seed workers
//   [output]        format path
//
// Unknown sections and keys are rejected.

#include "ionrep/optimizer.hpp"
#include "ionrep/simulator.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ionrep {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

OutputFormat output_format_from_string(const std::string& s);

struct SweepSettings {
    std::vector<SweepAxis> axes;
    std::optional<SweepAxis> spacing_grid;  // optimize; default is the two-stage search
    std::optional<SweepAxis> total_grid;    // benchmark
    Objective objective = Objective::MaxRsec;
    SearchOptions search;
};

struct SimulateSettings {
    std::uint64_t trials = 100000;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
};

struct OutputSettings {
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::string> path;
};

struct RunConfig {
    RepeaterParams params;
    ArchitectureSpec arch;
    Conventions conv;
    SweepSettings sweep;
    SimulateSettings simulate;
    OutputSettings output;
};

/// Parses and validates an INI document. Syntax errors carry the line
/// number; validation errors name "section.key" and the violated constraint.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

}  // namespace ionrep
