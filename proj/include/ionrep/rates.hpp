#pragma once

// Closed-form raw and secret key rates for Type I and Type II chains, plus
// the reverse-coherent-information and repeaterless (PLOB) benchmarks.

#include "ionrep/core.hpp"

#include <string>

namespace ionrep {

/// Type I raw rate denominator: the literal sequential 2T or a bare T.
enum class Type1Denominator { TwoT, T };

/// How many of a Type II module's m communication ions serve one link.
/// Half: floor(m/2) per link, the module's ions being split between its
/// left and right neighbours. All: every one of the m ions on every link.
enum class Type2LinkIons { Half, All };

std::string to_string(Type1Denominator d);
std::string to_string(Type2LinkIons i);
Type1Denominator type1_denominator_from_string(const std::string& s);
Type2LinkIons type2_link_ions_from_string(const std::string& s);

/// Reproduction conventions for quantities the model leaves open.
struct Conventions {
    Type1Denominator type1_denominator = Type1Denominator::TwoT;
    Type2LinkIons type2_link_ions = Type2LinkIons::Half;
    /// Per-qubit metric counts L_tot/L0 + 1 nodes when true, L_tot/L0 - 1 otherwise.
    bool stations_include_endpoints = true;

    bool operator==(const Conventions&) const = default;
};

struct RawRate {
    double rate = 0.0;        // bits/s
    double p_success = 0.0;   // chain success per cycle
    double cycle_s = 0.0;     // T
};

struct RateReport {
    double p_link = 0.0;
    double p_success = 0.0;
    double cycle_s = 0.0;
    double raw_rate = 0.0;
    double qber = 0.0;
    double secret_fraction = 0.0;
    double secret_rate = 0.0;
    double rci = 0.0;
    double rci_rate = 0.0;
    double plob_rate = 0.0;
    /// 1 - 2h(Q) <= 0, so no key is distilled.
    bool zero_key = false;

    bool operator==(const RateReport&) const = default;
};

/// [1 - (1-p)^n_eg]^links.
double chain_success_prob(double p, long attempts, double links);

/// T = L0 * 3 n_eg / (2c) + 2 t0.
double cycle_time(double spacing_km, long attempts, double gate_time_s, double fiber_speed_km_s);

/// C(m,i) [1-(1-p)^n0]^i (1-p)^(n0 (m-i)): exactly i of m ion pairs linked
/// after n0 rounds.
double prob_links(int ions, int linked, long rounds, double p);

/// Communication ions that serve a single link under the given convention.
int ions_per_link(const ArchitectureSpec& arch, const Conventions& conv);

RawRate raw_rate_type1(const RepeaterParams& params, const Conventions& conv = {});
RawRate raw_rate_type2(const RepeaterParams& params, const Conventions& conv = {});

/// Dispatches on the architecture variant.
RawRate raw_rate(const RepeaterParams& params, const ArchitectureSpec& arch, const Conventions& conv = {});

double binary_entropy(double q);

/// Clamped two-basis fraction max(0, 1 - 2h(Q)).
double secret_fraction(double q);

double secret_key_rate(double raw_rate, double q);

/// Reverse coherent information per pair of the Werner-like end-to-end state
/// with phi+ weight 1 - 3Q/2. Valid for Q in [0, 2/3].
double rci(double q);

/// -log2(1 - eta), secret-key capacity of a pure-loss channel per use.
double plob_capacity(double transmissivity);

/// R_source * K(eta_c^2 exp(-L/L_att)).
double plob_rate(double coupling, double length_km, double attenuation_km, double source_rate_hz);

RateReport evaluate_point(const RepeaterParams& params, const ArchitectureSpec& arch, const Conventions& conv = {});

}  // namespace ionrep
