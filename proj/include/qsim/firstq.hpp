#pragma once

#include "qsim/core.hpp"

#include <functional>
#include <vector>

namespace qsim::firstq {

/// Uniform periodic grid over [x_min, x_max) with 2^m_qubits points.
struct Grid1D {
    int m_qubits;
    double x_min;
    double x_max;

    std::uint64_t points() const { return std::uint64_t(1) << m_qubits; }
    double spacing() const { return (x_max - x_min) / static_cast<double>(points()); }
    double coord(std::uint64_t j) const { return x_min + static_cast<double>(j) * spacing(); }

    /// Signed momentum of QFT index k: p = 2 pi (k - P [k >= P/2]) / (P dx).
    double momentum(std::uint64_t k) const;
};

struct Particle {
    double mass;
    double charge;
    Grid1D grid;
};

struct ParticleSystem {
    std::vector<Particle> particles;

    int total_qubits() const;
    int qubit_offset(std::size_t particle) const;
    /// Splits a full-register basis index into per-particle grid indices.
    std::vector<std::uint64_t> decompose(std::uint64_t x) const;
    void coords_of(std::uint64_t x, std::vector<double>& out) const;
};

ParticleSystem make_system(std::vector<Particle> particles);

/// Potential callback with its phase quantization width. Circuit modes
/// express phases on the grid 2 pi / 2^m_v_bits; `quantize` maps a basis
/// index to that integer grid for a given time step.
struct PotentialSpec {
    std::function<double(std::span<const double>)> v;
    int m_v_bits = 16;

    double value(const ParticleSystem& sys, std::uint64_t x) const;
    /// Integer phase image in [0, 2^m_v_bits): round(M frac((V - v_ref) dt / 2 pi)).
    std::uint64_t quantize(double v_value, double v_ref, double dt) const;
};

/// Softened pairwise Coulomb sum q_i q_j / sqrt((x_i - x_j)^2 + a^2).
PotentialSpec coulomb_potential(const ParticleSystem& sys, double softening);

enum class PhaseMode { direct, kickback, rk_ladder };

/// For the circuit modes the state must carry m_v_bits ancilla qubits above
/// the grid register; prepare them with this helper (|q> = QFT|1> for
/// kickback, |0...0> for rk_ladder).
StateVector attach_phase_ancillas(const StateVector& grid_state, int m_v_bits,
                                  PhaseMode mode);

/// Diagonal potential step exp(-i V dt). `direct` multiplies amplitudes with
/// the exact phases; `kickback` routes them through a modular adder against
/// a Fourier-eigenstate ancilla; `rk_ladder` writes the phase fraction into
/// ancillas, applies local R_k gates, and uncomputes. Circuit modes must
/// leave the ancillas exactly as prepared.
void potential_phase_step(StateVector& psi, const ParticleSystem& sys,
                          const PotentialSpec& pot, double dt, PhaseMode mode);

/// Kinetic step: per-particle QFT, diagonal exp(-i p^2/(2M) dt), inverse QFT.
void kinetic_phase_step(StateVector& psi, const ParticleSystem& sys, double dt);

/// Split-operator evolution; order 2 uses the symmetric V/2 - T - V/2 split.
void evolve_split_operator(StateVector& psi, const ParticleSystem& sys,
                           const PotentialSpec& pot, double t, int slices,
                           int order);

double mean_position(const StateVector& psi, const ParticleSystem& sys,
                     std::size_t particle);
double mean_momentum(const StateVector& psi, const ParticleSystem& sys,
                     std::size_t particle);

/// Dense discretized Hamiltonian (spectral kinetic term + diagonal potential);
/// the oracle the split-operator results are checked against.
Matrix dense_grid_hamiltonian(const ParticleSystem& sys, const PotentialSpec& pot);

double grid_energy(const StateVector& psi, const ParticleSystem& sys,
                   const PotentialSpec& pot);

} // namespace qsim::firstq
