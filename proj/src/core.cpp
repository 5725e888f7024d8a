#include "ionrep/core.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace ionrep {

namespace detail {

void require_probability(double v, const char* name)
{
    if (!(v >= 0.0 && v <= 1.0))
        throw DomainError(fmt::format("{} must lie in [0,1], got {}", name, v));
}

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(fmt::format("{} must be positive, got {}", name, v));
}

void require_nonnegative(double v, const char* name)
{
    if (!(v >= 0.0) || !std::isfinite(v))
        throw DomainError(fmt::format("{} must be non-negative, got {}", name, v));
}

}  // namespace detail

using detail::require_nonnegative;
using detail::require_positive;
using detail::require_probability;

std::string to_string(Variant v)
{
    return v == Variant::TypeI ? "TypeI" : "TypeII";
}

Variant variant_from_string(const std::string& s)
{
    if (s == "TypeI" || s == "I" || s == "type1" || s == "1")
        return Variant::TypeI;
    if (s == "TypeII" || s == "II" || s == "type2" || s == "2")
        return Variant::TypeII;
    throw DomainError(fmt::format("unknown architecture variant '{}'", s));
}

void RepeaterParams::validate() const
{
    require_positive(spacing_km, "L0");
    require_positive(attenuation_km, "L_att");
    require_positive(total_km, "L_tot");
    if (total_km < spacing_km)
        throw DomainError(fmt::format("L_tot ({}) must be at least L0 ({})", total_km, spacing_km));
    require_probability(coupling, "eta_c");
    require_probability(gate_error, "eps_g");
    require_probability(initial_fidelity, "F0");
    require_nonnegative(gate_time_s, "t0");
    require_positive(fiber_speed_km_s, "c");
    require_nonnegative(source_rate_hz, "R_source");
    if (comm_ions < 1)
        throw DomainError(fmt::format("m must be at least 1, got {}", comm_ions));
    if (attempts < 1)
        throw DomainError(fmt::format("n_eg must be at least 1, got {}", attempts));
}

void ArchitectureSpec::validate() const
{
    if (mem_ions < 2)
        throw ArchitectureMismatch(fmt::format("mem_ions must be at least 2, got {}", mem_ions));
    if (variant == Variant::TypeI && comm_ions != 1)
        throw ArchitectureMismatch(fmt::format("TypeI modules have exactly 1 communication ion, got {}", comm_ions));
    if (variant == Variant::TypeII && comm_ions < 2)
        throw ArchitectureMismatch(fmt::format("TypeII modules need at least 2 communication ions, got {}", comm_ions));
}

void ArchitectureSpec::validate_against(const RepeaterParams& params) const
{
    validate();
    if (params.comm_ions != comm_ions)
        throw ArchitectureMismatch(
            fmt::format("m = {} disagrees with the architecture's {} communication ions", params.comm_ions, comm_ions));
}

BellDiagonalState::BellDiagonalState(double phi_plus, double phi_minus, double psi_plus, double psi_minus)
    : BellDiagonalState(std::array<double, 4>{phi_plus, phi_minus, psi_plus, psi_minus})
{
}

BellDiagonalState::BellDiagonalState(const std::array<double, 4>& probs)
    : probs_(probs)
{
    double sum = 0.0;
    for (double p : probs_) {
        require_probability(p, "Bell-diagonal weight");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTolerance)
        throw DomainError(fmt::format("Bell-diagonal weights sum to {:.17g}, expected 1", sum));
}

ChainGeometry ChainGeometry::from(double total_km, double spacing_km)
{
    require_positive(spacing_km, "L0");
    if (!(total_km >= spacing_km))
        throw DomainError(fmt::format("L_tot ({}) must be at least L0 ({})", total_km, spacing_km));
    const double links = total_km / spacing_km;
    return {links, links - 1.0};
}

double link_success_prob(double coupling, double spacing_km, double attenuation_km)
{
    require_probability(coupling, "eta_c");
    require_nonnegative(spacing_km, "L0");
    require_positive(attenuation_km, "L_att");
    return 0.5 * coupling * coupling * std::exp(-spacing_km / attenuation_km);
}

BellDiagonalState initial_bell_state(double fidelity)
{
    require_probability(fidelity, "F0");
    const double rest = (1.0 - fidelity) / 3.0;
    // Written so the weights sum to 1 exactly up to one rounding.
    return BellDiagonalState(1.0 - 3.0 * rest, rest, rest, rest);
}

BellDiagonalState swap_transfer_channel(const BellDiagonalState& state, double gate_error)
{
    require_probability(gate_error, "eps_g");
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < 4; ++i)
        out[i] = (1.0 - gate_error) * state[i] + 0.25 * gate_error;
    return BellDiagonalState(out);
}

double effective_station_error(double gate_error, double fidelity)
{
    require_probability(gate_error, "eps_g");
    require_probability(fidelity, "F0");
    const double eps = gate_error + (2.0 / 3.0) * (1.0 - fidelity);
    return std::clamp(eps, 0.0, 0.5);
}

double chain_qber(double station_error, double stations)
{
    if (!(station_error >= 0.0 && station_error <= 0.5))
        throw DomainError(fmt::format("station error must lie in [0, 1/2], got {}", station_error));
    require_nonnegative(stations, "R");
    if (station_error == 0.5)
        return stations > 0.0 ? 0.5 : 0.0;
    // -expm1/log1p keeps precision when R * eps is small.
    return -0.5 * std::expm1(stations * std::log1p(-2.0 * station_error));
}

}  // namespace ionrep
