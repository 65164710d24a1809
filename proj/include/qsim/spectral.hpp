#pragma once

#include "qsim/core.hpp"
#include "qsim/rng.hpp"

#include <functional>

namespace qsim::spectral {

/// Gate tally for circuit-size assertions.
struct GateTally {
    std::size_t hadamards = 0;
    std::size_t controlled_phases = 0;
    std::size_t swaps = 0;
    std::size_t total() const { return hadamards + controlled_phases + swaps; }
};

/// In-place QFT over the listed sub-register: basis state |x> maps to
/// (1/sqrt(N)) sum_k exp(2 pi i x k / N) |k>, with qubits[j] carrying bit j
/// of both x and k. Built from Hadamards and controlled phase gates.
void qft(StateVector& psi, std::span<const int> qubits, GateTally* tally = nullptr);
void inverse_qft(StateVector& psi, std::span<const int> qubits, GateTally* tally = nullptr);

/// Ancilla count m = p + ceil(log2(2 + 1/(2 eps))) for p-bit precision with
/// failure probability at most eps.
int ancilla_budget(int precision_bits, double epsilon);

struct PhaseEstimate {
    std::uint64_t outcome;  // measured ancilla integer A
    double phase;           // A / 2^m, in cycles
    double probability;     // probability of that outcome
};

/// Applies controlled-W^(2^j) to the extended state; the register occupies
/// the low qubits, `control` is the ancilla index, `power_log2` is j.
using ControlledPowerFn =
    std::function<void(StateVector&, int control, int power_log2)>;

/// Builds a controlled-power applier from a register unitary. The dense path
/// squares the matrix per ancilla; the circuit-faithful path applies the
/// controlled unitary 2^j times.
ControlledPowerFn controlled_powers(const Matrix& w, int register_qubits,
                                    bool circuit_faithful = false);

/// Full phase-estimation circuit: Hadamards on m ancillas, controlled powers,
/// inverse QFT, one joint ancilla measurement. The register collapses in
/// place to the post-measurement state.
PhaseEstimate phase_estimation(const ControlledPowerFn& powers,
                               StateVector& eigen_register, int m_ancillas,
                               rng::Stream& rng);

/// Ancilla outcome distribution of the same circuit, without measuring.
std::vector<double> pea_distribution(const ControlledPowerFn& powers,
                                     const StateVector& eigen_register,
                                     int m_ancillas);

/// Analytic PEA kernel: probability of outcome A for a register eigenstate
/// of phase phi, |sin(2^m pi d)/(2^m sin(pi d))|^2 with d = phi - A/2^m.
double pea_kernel(double phi, std::uint64_t outcome, int m_ancillas);

/// Affine map between energies and PEA phases chosen so no eigenphase wraps:
/// W = exp(-i (H - e_min) tau) with tau = 2 pi (1 - 2^-m) / (e_max - e_min).
struct EnergyPhaseMap {
    double e_min;
    double e_max;
    int m;

    double tau() const;
    double decode(std::uint64_t outcome) const;
    double bin_width() const;
};

/// Map with Gershgorin spectral bounds taken from H.
EnergyPhaseMap energy_phase_map(const HermitianOperator& h, int m_ancillas);

struct ProjectionResult {
    bool accepted;
    double energy;
    PhaseEstimate estimate;
};

/// Controlled time evolution: applies controlled-exp(-i H t) on the register
/// conditioned on `control`.
using ControlledEvolverFn = std::function<void(StateVector&, int control, double t)>;

ControlledEvolverFn controlled_evolver(const HermitianOperator& h);

/// PEA-based projective ground-state filter. Runs phase estimation on the
/// trial, decodes the outcome to an energy, and accepts when it lies within
/// `energy_window` of `target_energy`. The post-measurement register is
/// written back to `trial_inout`.
ProjectionResult project_ground_state(const ControlledEvolverFn& evolver,
                                      const EnergyPhaseMap& map,
                                      double target_energy, double energy_window,
                                      StateVector& trial_inout, rng::Stream& rng);

/// Convenience overload: bounds from Gershgorin circles, target energy from
/// the dense minimum eigenvalue of H.
ProjectionResult project_ground_state(const HermitianOperator& h,
                                      const StateVector& trial, int m_ancillas,
                                      double energy_window, rng::Stream& rng,
                                      StateVector* post = nullptr);

} // namespace qsim::spectral
