#pragma once

#include "qsim/core.hpp"
#include "qsim/rng.hpp"

#include <vector>

namespace qsim::cooling {

/// Phase-gate angle and evolution time for the four-gate cooling circuit,
/// with the spectral bounds used to verify the phase window
/// phi_k = E_k t - gamma in [-pi/2 + margin, pi/2 - margin).
struct CoolingParams {
    double gamma;
    double t;
    double margin;
    double e_lo;
    double e_hi;

    double phi(double energy) const { return energy * t - gamma; }
};

/// t = (pi - 2 margin) / (E_max - E_min), gamma = t (E_max + E_min) / 2.
/// Bounds come from dense diagonalization or Gershgorin circles.
CoolingParams choose_params(const HermitianOperator& h, double margin,
                            bool dense_bounds = true);

struct StepOutcome {
    int outcome;        // 0 = cooling branch, 1 = heating branch
    double probability; // probability of the realized outcome
};

/// One pass of the four-gate circuit (ancilla H, Rz(gamma), controlled-U(t),
/// H, ancilla measurement); the state collapses to the outcome branch.
StepOutcome cooling_step(StateVector& psi, const HermitianOperator& h,
                         const CoolingParams& params, rng::Stream& rng);

/// Direct application of Lambda_j = (I + (-1)^{j+1} i e^{i gamma} U)/2,
/// normalized; branch probability optionally returned. Reference route the
/// circuit is checked against.
StateVector apply_lambda(const StateVector& psi, const HermitianOperator& h,
                         const CoolingParams& params, int j,
                         double* probability = nullptr);

struct EnergyBalance {
    double e_in;
    double p0;
    double e0_branch;
    double p1;
    double e1_branch;
};

/// The branch energies satisfy p0 E0 + p1 E1 = E_in exactly.
EnergyBalance energy_balance_check(const StateVector& psi, const HermitianOperator& h,
                                   const CoolingParams& params);

struct WalkStats {
    int restarts = 0;
    long steps = 0;
    double final_energy = 0.0;
    bool reached_stop = false;
    int x = 0;                // walker position, zeros minus ones in history
    std::vector<int> history; // outcome bits since the last restart
};

/// Rejection random walk: outcome 0 moves x -> x+1, outcome 1 moves x -> x-1;
/// x < 0 restarts from the initial state; the walk returns at x = x_stop.
/// On restart exhaustion the best state seen so far is returned.
WalkStats run_walk(StateVector& state, const HermitianOperator& h,
                   const CoolingParams& params, int x_stop, int max_restarts,
                   rng::Stream& rng);

} // namespace qsim::cooling
