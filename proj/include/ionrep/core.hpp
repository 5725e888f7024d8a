#pragma once

// Domain types and the per-station error model of a chain of two-species
// trapped-ion repeater modules.

#include <array>
#include <stdexcept>
#include <string>

namespace ionrep {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when parameters do not fit the requested protocol variant
/// (e.g. a Type I rate for a module with several communication ions).
class ArchitectureMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Variant { TypeI, TypeII };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

/// Physical and protocol scalars for one operating point. Lengths in km,
/// times in s, rates in Hz.
struct RepeaterParams {
    double total_km = 1000.0;          // L_tot
    double spacing_km = 3.0;           // L0
    double attenuation_km = 20.0;      // L_att
    double coupling = 1.0;             // eta_c
    double gate_error = 1e-4;          // eps_g
    double gate_time_s = 1e-6;         // t0
    double initial_fidelity = 1.0 - 1e-4;  // F0
    double fiber_speed_km_s = 2e5;     // c
    int comm_ions = 1;                 // m
    long attempts = 1;                 // n_eg
    double source_rate_hz = 1e6;       // R_source

    /// Throws DomainError naming the first violated invariant.
    void validate() const;

    /// F0 >= 1/4; lower fidelities are accepted but not physically intended.
    bool in_physical_regime() const { return initial_fidelity >= 0.25; }

    bool operator==(const RepeaterParams&) const = default;
};

struct ArchitectureSpec {
    Variant variant = Variant::TypeI;
    int comm_ions = 1;
    int mem_ions = 2;

    static ArchitectureSpec type_i() { return {Variant::TypeI, 1, 2}; }
    static ArchitectureSpec type_ii(int comm) { return {Variant::TypeII, comm, 2}; }

    int qubits_per_station() const { return comm_ions + mem_ions; }

    void validate() const;
    /// Also checks that params.comm_ions agrees with this architecture.
    void validate_against(const RepeaterParams& params) const;

    bool operator==(const ArchitectureSpec&) const = default;
};

/// Two-qubit state diagonal in the Bell basis, ordered (phi+, phi-, psi+, psi-).
class BellDiagonalState {
public:
    static constexpr double kNormTolerance = 1e-12;

    BellDiagonalState(double phi_plus, double phi_minus, double psi_plus, double psi_minus);
    explicit BellDiagonalState(const std::array<double, 4>& probs);

    double phi_plus() const { return probs_[0]; }
    double phi_minus() const { return probs_[1]; }
    double psi_plus() const { return probs_[2]; }
    double psi_minus() const { return probs_[3]; }
    double fidelity() const { return probs_[0]; }

    const std::array<double, 4>& probs() const { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }

    bool operator==(const BellDiagonalState&) const = default;

private:
    std::array<double, 4> probs_;
};

struct ChainGeometry {
    double links;     // L_tot / L0
    double stations;  // links - 1

    static ChainGeometry from(double total_km, double spacing_km);
};

/// Per-attempt heralded entanglement probability, 0.5 * eta_c^2 * exp(-L0/L_att).
double link_success_prob(double coupling, double spacing_km, double attenuation_km);

/// Werner-form pair with fidelity F0 and the remainder split evenly.
BellDiagonalState initial_bell_state(double fidelity);

/// Channel of the pair of swap gates moving a pair from communication to
/// memory ions. With independent Paulis on both qubits the 16-term sum is
/// the maximally mixed state, so every weight maps to (1-eps)p + eps/4.
BellDiagonalState swap_transfer_channel(const BellDiagonalState& state, double gate_error);

/// X/Z flip probability per station, eps_g + 2/3 (1-F0), clamped to [0, 1/2].
double effective_station_error(double gate_error, double fidelity);

/// Odd-parity probability after `stations` independent flips,
/// 0.5 * (1 - (1-2 eps)^R). R may be non-integer.
double chain_qber(double station_error, double stations);

namespace detail {
void require_probability(double v, const char* name);
void require_positive(double v, const char* name);
void require_nonnegative(double v, const char* name);
}  // namespace detail

}  // namespace ionrep
