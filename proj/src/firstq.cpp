#include "qsim/firstq.hpp"

#include "qsim/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qsim::firstq {

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

double Grid1D::momentum(std::uint64_t k) const {
    const double p = static_cast<double>(points());
    double idx = static_cast<double>(k);
    if (idx >= p / 2) idx -= p;
    return 2.0 * kPi * idx / (p * spacing());
}

int ParticleSystem::total_qubits() const {
    int n = 0;
    for (const auto& p : particles) n += p.grid.m_qubits;
    return n;
}

int ParticleSystem::qubit_offset(std::size_t particle) const {
    int off = 0;
    for (std::size_t i = 0; i < particle; ++i) off += particles[i].grid.m_qubits;
    return off;
}

std::vector<std::uint64_t> ParticleSystem::decompose(std::uint64_t x) const {
    std::vector<std::uint64_t> out(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) {
        const int m = particles[i].grid.m_qubits;
        out[i] = x & ((std::uint64_t(1) << m) - 1);
        x >>= m;
    }
    return out;
}

void ParticleSystem::coords_of(std::uint64_t x, std::vector<double>& out) const {
    out.resize(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) {
        const int m = particles[i].grid.m_qubits;
        out[i] = particles[i].grid.coord(x & ((std::uint64_t(1) << m) - 1));
        x >>= m;
    }
}

ParticleSystem make_system(std::vector<Particle> particles) {
    if (particles.empty()) throw std::invalid_argument("system needs at least one particle");
    for (const auto& p : particles) {
        if (!(p.mass > 0.0)) throw std::invalid_argument("particle mass must be positive");
        if (!(p.grid.x_max > p.grid.x_min))
            throw std::invalid_argument("grid needs x_max > x_min");
        if (p.grid.m_qubits < 1) throw std::invalid_argument("grid needs at least one qubit");
    }
    return {std::move(particles)};
}

double PotentialSpec::value(const ParticleSystem& sys, std::uint64_t x) const {
    thread_local std::vector<double> coords;
    sys.coords_of(x, coords);
    return v(coords);
}

std::uint64_t PotentialSpec::quantize(double v_value, double v_ref, double dt) const {
    const std::uint64_t m = std::uint64_t(1) << m_v_bits;
    double frac = (v_value - v_ref) * dt / (2.0 * kPi);
    frac -= std::floor(frac);
    auto q = static_cast<std::uint64_t>(std::llround(frac * static_cast<double>(m)));
    return q % m; // phases wrap mod 2 pi; the adder wraps mod 2^m to match
}

PotentialSpec coulomb_potential(const ParticleSystem& sys, double softening) {
    if (!(softening > 0.0)) throw std::invalid_argument("softening must be positive");
    std::vector<double> charges;
    for (const auto& p : sys.particles) charges.push_back(p.charge);
    PotentialSpec spec;
    spec.v = [charges, a2 = softening * softening](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = i + 1; j < x.size(); ++j) {
                const double d = x[i] - x[j];
                v += charges[i] * charges[j] / std::sqrt(d * d + a2);
            }
        return v;
    };
    return spec;
}

StateVector attach_phase_ancillas(const StateVector& grid_state, int m_v_bits,
                                  PhaseMode mode) {
    if (mode == PhaseMode::direct)
        throw std::invalid_argument("direct mode uses no ancillas");
    StateVector psi = attach_register(grid_state, m_v_bits);
    if (mode == PhaseMode::kickback) {
        // |q> = QFT|1>: amplitude e^{2 pi i s / M} / sqrt(M) at ancilla value s.
        const int ng = grid_state.n_qubits();
        const std::uint64_t m = std::uint64_t(1) << m_v_bits;
        const std::uint64_t gdim = grid_state.dim();
        std::vector<complex> amps(psi.dim(), complex(0, 0));
        const double scale = 1.0 / std::sqrt(static_cast<double>(m));
        for (std::uint64_t s = 0; s < m; ++s) {
            const complex a =
                std::exp(complex(0, 2.0 * kPi * static_cast<double>(s) / static_cast<double>(m))) *
                scale;
            for (std::uint64_t x = 0; x < gdim; ++x)
                amps[(s << ng) | x] = a * grid_state[x];
        }
        psi = StateVector::from_amplitudes(psi.n_qubits(), std::move(amps));
    }
    return psi;
}

namespace {

// Quantized potential image per grid point for one time step.
std::vector<std::uint64_t> quantized_table(const ParticleSystem& sys,
                                           const PotentialSpec& pot, double dt,
                                           double* v_ref_out) {
    const std::uint64_t gdim = std::uint64_t(1) << sys.total_qubits();
    std::vector<double> values(gdim);
    double v_ref = std::numeric_limits<double>::infinity();
    for (std::uint64_t x = 0; x < gdim; ++x) {
        values[x] = pot.value(sys, x);
        v_ref = std::min(v_ref, values[x]);
    }
    std::vector<std::uint64_t> q(gdim);
    for (std::uint64_t x = 0; x < gdim; ++x) q[x] = pot.quantize(values[x], v_ref, dt);
    if (v_ref_out) *v_ref_out = v_ref;
    return q;
}

// |x>|s> -> |x>|s + v(x) mod M>, ancillas above the grid register.
void modular_add(StateVector& psi, int grid_qubits, int m_v_bits,
                 std::span<const std::uint64_t> addend, bool subtract) {
    const std::uint64_t gdim = std::uint64_t(1) << grid_qubits;
    const std::uint64_t m = std::uint64_t(1) << m_v_bits;
    auto& amp = psi.amplitudes();
    std::vector<complex> column(m);
    for (std::uint64_t x = 0; x < gdim; ++x) {
        const std::uint64_t shift = subtract ? (m - addend[x]) % m : addend[x];
        if (shift == 0) continue;
        for (std::uint64_t s = 0; s < m; ++s) column[s] = amp[(s << grid_qubits) | x];
        for (std::uint64_t s = 0; s < m; ++s)
            amp[(((s + shift) % m) << grid_qubits) | x] = column[s];
    }
}

} // namespace

void potential_phase_step(StateVector& psi, const ParticleSystem& sys,
                          const PotentialSpec& pot, double dt, PhaseMode mode) {
    const int ng = sys.total_qubits();
    const std::uint64_t gdim = std::uint64_t(1) << ng;

    if (mode == PhaseMode::direct) {
        if (psi.n_qubits() != ng)
            throw std::invalid_argument("state dimension does not match grid register");
        thread_local std::vector<double> coords;
        auto& amp = psi.amplitudes();
        for (std::uint64_t x = 0; x < gdim; ++x) {
            sys.coords_of(x, coords);
            amp[x] *= std::exp(complex(0, -pot.v(coords) * dt));
        }
        return;
    }

    if (psi.n_qubits() != ng + pot.m_v_bits)
        throw std::invalid_argument(
            "circuit phase modes need the ancilla register attached");

    double v_ref = 0.0;
    const auto q = quantized_table(sys, pot, dt, &v_ref);

    if (mode == PhaseMode::kickback) {
        // Adder against |q> kicks back e^{-2 pi i v(x)/M} per grid point.
        modular_add(psi, ng, pot.m_v_bits, q, false);
    } else {
        // Write v(x), phase each fraction bit with an R_k gate, uncompute.
        modular_add(psi, ng, pot.m_v_bits, q, false);
        for (int k = 1; k <= pot.m_v_bits; ++k) {
            const Matrix rk = gates::r_k(k).matrix();
            const int target[] = {ng + pot.m_v_bits - k}; // bit m-k holds x_k
            apply_unitary(psi, rk, target);
        }
        modular_add(psi, ng, pot.m_v_bits, q, true);
    }

    // Classical global phase from the v_ref offset, so circuit modes line up
    // componentwise with the direct mode.
    const complex global = std::exp(complex(0, -v_ref * dt));
    for (auto& a : psi.amplitudes()) a *= global;
}

void kinetic_phase_step(StateVector& psi, const ParticleSystem& sys, double dt) {
    if (psi.n_qubits() < sys.total_qubits())
        throw std::invalid_argument("state smaller than grid register");
    for (std::size_t p = 0; p < sys.particles.size(); ++p) {
        const auto& part = sys.particles[p];
        const int off = sys.qubit_offset(p);
        const int mq = part.grid.m_qubits;
        std::vector<int> block(static_cast<std::size_t>(mq));
        for (int b = 0; b < mq; ++b) block[static_cast<std::size_t>(b)] = off + b;

        spectral::qft(psi, block);
        const std::uint64_t pts = part.grid.points();
        std::vector<complex> phase(pts);
        for (std::uint64_t k = 0; k < pts; ++k) {
            const double mom = part.grid.momentum(k);
            phase[k] = std::exp(complex(0, -mom * mom / (2.0 * part.mass) * dt));
        }
        auto& amp = psi.amplitudes();
        const std::uint64_t mask = pts - 1;
        for (std::uint64_t i = 0; i < psi.dim(); ++i)
            amp[i] *= phase[(i >> off) & mask];
        spectral::inverse_qft(psi, block);
    }
}

void evolve_split_operator(StateVector& psi, const ParticleSystem& sys,
                           const PotentialSpec& pot, double t, int slices,
                           int order) {
    if (slices < 1) throw std::invalid_argument("slices must be >= 1");
    if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
    const double dt = t / slices;
    for (int s = 0; s < slices; ++s) {
        if (order == 1) {
            potential_phase_step(psi, sys, pot, dt, PhaseMode::direct);
            kinetic_phase_step(psi, sys, dt);
        } else {
            potential_phase_step(psi, sys, pot, dt / 2, PhaseMode::direct);
            kinetic_phase_step(psi, sys, dt);
            potential_phase_step(psi, sys, pot, dt / 2, PhaseMode::direct);
        }
    }
}

double mean_position(const StateVector& psi, const ParticleSystem& sys,
                     std::size_t particle) {
    const auto& grid = sys.particles[particle].grid;
    const int off = sys.qubit_offset(particle);
    const std::uint64_t mask = grid.points() - 1;
    double acc = 0.0;
    for (std::uint64_t i = 0; i < psi.dim(); ++i)
        acc += std::norm(psi[i]) * grid.coord((i >> off) & mask);
    return acc;
}

double mean_momentum(const StateVector& psi, const ParticleSystem& sys,
                     std::size_t particle) {
    StateVector copy = psi;
    const auto& grid = sys.particles[particle].grid;
    const int off = sys.qubit_offset(particle);
    std::vector<int> block(static_cast<std::size_t>(grid.m_qubits));
    for (int b = 0; b < grid.m_qubits; ++b) block[static_cast<std::size_t>(b)] = off + b;
    spectral::qft(copy, block);
    const std::uint64_t mask = grid.points() - 1;
    double acc = 0.0;
    // Forward QFT lands plane-wave k at index M - k; read momenta mirrored.
    for (std::uint64_t i = 0; i < copy.dim(); ++i) {
        const std::uint64_t k = (i >> off) & mask;
        const std::uint64_t mirrored = (grid.points() - k) & mask;
        acc += std::norm(copy[i]) * grid.momentum(mirrored);
    }
    return acc;
}

Matrix dense_grid_hamiltonian(const ParticleSystem& sys, const PotentialSpec& pot) {
    const int n = sys.total_qubits();
    if (n > 12) throw std::invalid_argument("dense grid oracle guarded to <= 12 qubits");
    const std::uint64_t dim = std::uint64_t(1) << n;

    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    // Kinetic part per particle: F^dagger diag(p^2/2M) F on its block, where F
    // is the unitary with matrix elements e^{2 pi i j k / P} / sqrt(P).
    for (std::size_t p = 0; p < sys.particles.size(); ++p) {
        const auto& part = sys.particles[p];
        const std::uint64_t pts = part.grid.points();
        Matrix f(static_cast<Eigen::Index>(pts), static_cast<Eigen::Index>(pts));
        const double s = 1.0 / std::sqrt(static_cast<double>(pts));
        for (std::uint64_t j = 0; j < pts; ++j)
            for (std::uint64_t k = 0; k < pts; ++k)
                f(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                    s * std::exp(complex(0, 2.0 * kPi * static_cast<double>(j) *
                                                static_cast<double>(k) /
                                                static_cast<double>(pts)));
        Eigen::VectorXd kin(static_cast<Eigen::Index>(pts));
        for (std::uint64_t k = 0; k < pts; ++k) {
            const double mom = part.grid.momentum(k);
            kin(static_cast<Eigen::Index>(k)) = mom * mom / (2.0 * part.mass);
        }
        Matrix tsmall = f * kin.asDiagonal() * f.adjoint();
        const int off = sys.qubit_offset(p);
        std::vector<int> block(static_cast<std::size_t>(part.grid.m_qubits));
        for (int b = 0; b < part.grid.m_qubits; ++b)
            block[static_cast<std::size_t>(b)] = off + b;
        h += embed(tsmall, block, n);
    }
    thread_local std::vector<double> coords;
    for (std::uint64_t x = 0; x < dim; ++x) {
        sys.coords_of(x, coords);
        h(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) += pot.v(coords);
    }
    return h;
}

double grid_energy(const StateVector& psi, const ParticleSystem& sys,
                   const PotentialSpec& pot) {
    const Matrix h = dense_grid_hamiltonian(sys, pot);
    Vector v = psi.to_eigen();
    return (v.adjoint() * (h * v))(0, 0).real();
}

} // namespace qsim::firstq
