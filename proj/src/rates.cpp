#include "ionrep/rates.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace ionrep {

using detail::require_nonnegative;
using detail::require_positive;
using detail::require_probability;

namespace {

// x log2 x with 0 log2 0 = 0.
double xlog2x(double x)
{
    return x > 0.0 ? x * std::log2(x) : 0.0;
}

// (1-p)^n without losing the tail for small p.
double miss_prob(double p, double rounds)
{
    if (p >= 1.0)
        return 0.0;
    return std::exp(rounds * std::log1p(-p));
}

double pow_real(double base, double exponent)
{
    // exponent >= 1 in all callers, so 0^exponent = 0.
    if (base <= 0.0)
        return 0.0;
    return std::exp(exponent * std::log(base));
}

}  // namespace

std::string to_string(Type1Denominator d)
{
    return d == Type1Denominator::TwoT ? "2T" : "T";
}

std::string to_string(Type2LinkIons i)
{
    return i == Type2LinkIons::Half ? "half" : "all";
}

Type1Denominator type1_denominator_from_string(const std::string& s)
{
    if (s == "2T")
        return Type1Denominator::TwoT;
    if (s == "T")
        return Type1Denominator::T;
    throw DomainError(fmt::format("type1 denominator must be 2T or T, got '{}'", s));
}

Type2LinkIons type2_link_ions_from_string(const std::string& s)
{
    if (s == "half")
        return Type2LinkIons::Half;
    if (s == "all")
        return Type2LinkIons::All;
    throw DomainError(fmt::format("type2 link ions must be half or all, got '{}'", s));
}

double chain_success_prob(double p, long attempts, double links)
{
    require_probability(p, "p");
    if (attempts < 1)
        throw DomainError(fmt::format("n_eg must be at least 1, got {}", attempts));
    if (!(links >= 1.0))
        throw DomainError(fmt::format("link count must be at least 1, got {}", links));
    return pow_real(1.0 - miss_prob(p, static_cast<double>(attempts)), links);
}

double cycle_time(double spacing_km, long attempts, double gate_time_s, double fiber_speed_km_s)
{
    require_nonnegative(spacing_km, "L0");
    require_nonnegative(gate_time_s, "t0");
    require_positive(fiber_speed_km_s, "c");
    if (attempts < 1)
        throw DomainError(fmt::format("n_eg must be at least 1, got {}", attempts));
    return spacing_km * 3.0 * static_cast<double>(attempts) / (2.0 * fiber_speed_km_s) + 2.0 * gate_time_s;
}

double prob_links(int ions, int linked, long rounds, double p)
{
    require_probability(p, "p");
    if (ions < 1 || linked < 0 || linked > ions)
        throw DomainError(fmt::format("need 0 <= i <= m with m >= 1, got m={} i={}", ions, linked));
    if (rounds < 1)
        throw DomainError(fmt::format("n0 must be at least 1, got {}", rounds));
    const double miss = miss_prob(p, static_cast<double>(rounds));
    double binom = 1.0;
    for (int k = 1; k <= linked; ++k)
        binom = binom * static_cast<double>(ions - linked + k) / static_cast<double>(k);
    return binom * std::pow(1.0 - miss, linked) * std::pow(miss, ions - linked);
}

int ions_per_link(const ArchitectureSpec& arch, const Conventions& conv)
{
    if (arch.variant == Variant::TypeI)
        return 1;
    return conv.type2_link_ions == Type2LinkIons::Half ? arch.comm_ions / 2 : arch.comm_ions;
}

RawRate raw_rate_type1(const RepeaterParams& params, const Conventions& conv)
{
    params.validate();
    if (params.comm_ions != 1)
        throw ArchitectureMismatch(fmt::format("Type I rate needs m = 1, got m = {}", params.comm_ions));
    const auto geom = ChainGeometry::from(params.total_km, params.spacing_km);
    const double p = link_success_prob(params.coupling, params.spacing_km, params.attenuation_km);
    RawRate out;
    out.p_success = chain_success_prob(p, params.attempts, geom.links);
    out.cycle_s = cycle_time(params.spacing_km, params.attempts, params.gate_time_s, params.fiber_speed_km_s);
    const double sequential = conv.type1_denominator == Type1Denominator::TwoT ? 2.0 : 1.0;
    out.rate = out.p_success / (sequential * out.cycle_s);
    return out;
}

RawRate raw_rate_type2(const RepeaterParams& params, const Conventions& conv)
{
    params.validate();
    if (params.comm_ions < 2)
        throw ArchitectureMismatch(fmt::format("Type II rate needs m >= 2, got m = {}", params.comm_ions));
    const auto geom = ChainGeometry::from(params.total_km, params.spacing_km);
    const double p = link_success_prob(params.coupling, params.spacing_km, params.attenuation_km);
    const int ions = ions_per_link(ArchitectureSpec::type_ii(params.comm_ions), conv);
    RawRate out;
    const double any_linked = 1.0 - prob_links(ions, 0, params.attempts, p);
    out.p_success = pow_real(any_linked, geom.links);
    out.cycle_s = cycle_time(params.spacing_km, params.attempts, params.gate_time_s, params.fiber_speed_km_s);
    out.rate = out.p_success / out.cycle_s;
    return out;
}

RawRate raw_rate(const RepeaterParams& params, const ArchitectureSpec& arch, const Conventions& conv)
{
    arch.validate_against(params);
    return arch.variant == Variant::TypeI ? raw_rate_type1(params, conv) : raw_rate_type2(params, conv);
}

double binary_entropy(double q)
{
    require_probability(q, "Q");
    return -xlog2x(q) - xlog2x(1.0 - q);
}

double secret_fraction(double q)
{
    return std::max(0.0, 1.0 - 2.0 * binary_entropy(q));
}

double secret_key_rate(double raw_rate, double q)
{
    require_nonnegative(raw_rate, "R_raw");
    return raw_rate * secret_fraction(q);
}

double rci(double q)
{
    if (!(q >= 0.0 && q <= 2.0 / 3.0))
        throw DomainError(fmt::format("RCI needs Q in [0, 2/3], got {}", q));
    const double a = 1.0 - 1.5 * q;
    const double tail = q > 0.0 ? 1.5 * q * std::log2(0.5 * q) : 0.0;
    return 1.0 + xlog2x(a) + tail;
}

double plob_capacity(double transmissivity)
{
    if (!(transmissivity >= 0.0 && transmissivity < 1.0))
        throw DomainError(fmt::format("transmissivity must lie in [0,1), got {}", transmissivity));
    return -std::log1p(-transmissivity) / std::numbers::ln2;
}

double plob_rate(double coupling, double length_km, double attenuation_km, double source_rate_hz)
{
    require_probability(coupling, "eta_c");
    require_nonnegative(length_km, "L");
    require_positive(attenuation_km, "L_att");
    require_nonnegative(source_rate_hz, "R_source");
    const double eta = coupling * coupling * std::exp(-length_km / attenuation_km);
    return source_rate_hz * plob_capacity(eta);
}

RateReport evaluate_point(const RepeaterParams& params, const ArchitectureSpec& arch, const Conventions& conv)
{
    const RawRate raw = raw_rate(params, arch, conv);
    const auto geom = ChainGeometry::from(params.total_km, params.spacing_km);

    RateReport r;
    r.p_link = link_success_prob(params.coupling, params.spacing_km, params.attenuation_km);
    r.p_success = raw.p_success;
    r.cycle_s = raw.cycle_s;
    r.raw_rate = raw.rate;
    const double eps = effective_station_error(params.gate_error, params.initial_fidelity);
    r.qber = chain_qber(eps, geom.stations);
    r.secret_fraction = secret_fraction(r.qber);
    r.zero_key = r.secret_fraction <= 0.0;
    r.secret_rate = raw.rate * r.secret_fraction;
    r.rci = rci(r.qber);
    r.rci_rate = raw.rate * r.rci;
    // L_tot >= L0 > 0 keeps eta < 1.
    r.plob_rate = plob_rate(params.coupling, params.total_km, params.attenuation_km, params.source_rate_hz);
    return r;
}

}  // namespace ionrep
