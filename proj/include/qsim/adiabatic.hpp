#pragma once

#include "qsim/core.hpp"
#include "qsim/rng.hpp"

#include <functional>
#include <vector>

namespace qsim::adiabatic {

/// H(s) = (1-s) H_i + s H_f with a monotone schedule s(t/T).
struct Interpolation {
    HermitianOperator h_i;
    HermitianOperator h_f;
    std::function<double(double)> schedule; // defaults to identity

    Matrix at(double s) const;
    int n_qubits() const { return h_i.n_qubits(); }
};

Interpolation make_interpolation(HermitianOperator h_i, HermitianOperator h_f,
                                 std::function<double(double)> schedule = {});

/// Midpoint-rule stepwise propagation of the time-dependent Schroedinger
/// equation: psi <- exp(-i H(s(t_mid)) dt) psi per step.
StateVector evolve_adiabatic(const StateVector& start, const Interpolation& interp,
                             double total_time, int steps);

struct SpectralTrace {
    std::vector<double> s;
    std::vector<double> e0;
    std::vector<double> e1;
    std::vector<double> gap;
    double gap_min = 0.0;
    bool degenerate = false; // gap_min below 1e-10 somewhere on the grid
};

/// Dense diagonalization along the path; the grid doubles until gap_min
/// changes by less than 1%.
SpectralTrace spectral_trace(const Interpolation& interp, int initial_grid = 33);

/// Eigenpath length L ~ sum_i arccos |<psi(s_i)|psi(s_i+1)>|, refined until
/// stable to 1e-4 of its value. Throws on ground-state degeneracy.
double path_length(const Interpolation& interp, int initial_grid = 33);

struct TimeBounds {
    double gap2;  // ||H_f - H_i|| / gap_min^2
    double path2; // L^2 / gap_min
    double path1; // L / gap_min
};

TimeBounds time_bounds(const SpectralTrace& trace, const Interpolation& interp);

struct ProbeResult {
    double a0;                       // recovered expectation value
    double omega;                    // fitted frequency (= a0 + delta)
    std::vector<double> p0;          // P0(t) per sample time
    double min_system_fidelity;      // worst post-measurement system fidelity
    double fit_residual;             // max |model - data|
};

/// Adiabatic non-destructive measurement: probe qubit attached in |p0>,
/// Hadamard, evolution under H_f + delta |p1><p1| + A (x) |p1><p1| for each
/// sample time, Hadamard, exact P0 readout, cosine fit P0 = (1+cos wt)/2.
/// Requires [A, H_f] = 0 within 1e-10.
ProbeResult nondestructive_measure(const StateVector& system_ground,
                                   const HermitianOperator& h_f,
                                   const HermitianOperator& a_obs, double delta,
                                   std::span<const double> sample_times);

} // namespace qsim::adiabatic
