#pragma once

// CSV and JSON emission of reports. CSV numbers carry 6 significant digits
// (scientific below 1e-3); JSON keeps full double precision so documents
// read back into equal values.

#include "ionrep/optimizer.hpp"
#include "ionrep/simulator.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ionrep {

std::string format_number(double v);

/// Parameter columns followed by the report columns, in this order.
const std::vector<std::string>& parameter_columns();
const std::vector<std::string>& report_columns();

/// Header and rows share the layout: parameters, report, zero_key.
std::string rate_csv_header();
std::string rate_csv_row(const RepeaterParams& params, const RateReport& report);

/// Rate layout plus objective and n_eg_at_bound.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

void to_json(nlohmann::json& j, const RepeaterParams& p);
void from_json(const nlohmann::json& j, RepeaterParams& p);
void to_json(nlohmann::json& j, const ArchitectureSpec& a);
void from_json(const nlohmann::json& j, ArchitectureSpec& a);
void to_json(nlohmann::json& j, const Conventions& c);
void from_json(const nlohmann::json& j, Conventions& c);
void to_json(nlohmann::json& j, const RateReport& r);
void from_json(const nlohmann::json& j, RateReport& r);
void to_json(nlohmann::json& j, const Estimate& e);
void from_json(const nlohmann::json& j, Estimate& e);
void to_json(nlohmann::json& j, const SimEstimate& s);
void from_json(const nlohmann::json& j, SimEstimate& s);
void to_json(nlohmann::json& j, const OptimizationResult& r);
void from_json(const nlohmann::json& j, OptimizationResult& r);
void to_json(nlohmann::json& j, const SweepRow& r);
void from_json(const nlohmann::json& j, SweepRow& r);

}  // namespace ionrep
