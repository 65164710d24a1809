#include "qsim/spectral.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace qsim::spectral {

namespace {
constexpr double kPi = std::numbers::pi;

void check_distinct(const StateVector& psi, std::span<const int> qubits) {
    std::uint64_t seen = 0;
    for (int q : qubits) {
        if (q < 0 || q >= psi.n_qubits()) throw std::out_of_range("qubit index out of range");
        if (seen & (std::uint64_t(1) << q)) throw std::invalid_argument("duplicate qubit index");
        seen |= std::uint64_t(1) << q;
    }
}

// Controlled phase diag(1,1,1,e^{i theta}); symmetric in control/target.
void controlled_phase(StateVector& psi, int control, int target, double theta) {
    const Matrix g = gates::phase(theta).matrix();
    const int targets[] = {target};
    const int controls[] = {control};
    apply_unitary(psi, g, targets, controls);
}

void qft_impl(StateVector& psi, std::span<const int> qubits, bool inverse, GateTally* tally) {
    check_distinct(psi, qubits);
    const int n = static_cast<int>(qubits.size());
    const Matrix h = gates::h().matrix();
    const Matrix sw = gates::swap().matrix();
    const double sign = inverse ? -1.0 : 1.0;

    if (inverse) {
        for (int i = 0; i < n / 2; ++i) {
            const int pair[] = {qubits[static_cast<std::size_t>(i)],
                                qubits[static_cast<std::size_t>(n - 1 - i)]};
            apply_unitary(psi, sw, pair);
            if (tally) ++tally->swaps;
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) {
                controlled_phase(psi, qubits[static_cast<std::size_t>(j)],
                                 qubits[static_cast<std::size_t>(i)],
                                 sign * 2.0 * kPi / std::pow(2.0, i - j + 1));
                if (tally) ++tally->controlled_phases;
            }
            const int tq[] = {qubits[static_cast<std::size_t>(i)]};
            apply_unitary(psi, h, tq);
            if (tally) ++tally->hadamards;
        }
        return;
    }

    for (int i = n - 1; i >= 0; --i) {
        const int tq[] = {qubits[static_cast<std::size_t>(i)]};
        apply_unitary(psi, h, tq);
        if (tally) ++tally->hadamards;
        for (int j = i - 1; j >= 0; --j) {
            controlled_phase(psi, qubits[static_cast<std::size_t>(j)],
                             qubits[static_cast<std::size_t>(i)],
                             sign * 2.0 * kPi / std::pow(2.0, i - j + 1));
            if (tally) ++tally->controlled_phases;
        }
    }
    for (int i = 0; i < n / 2; ++i) {
        const int pair[] = {qubits[static_cast<std::size_t>(i)],
                            qubits[static_cast<std::size_t>(n - 1 - i)]};
        apply_unitary(psi, sw, pair);
        if (tally) ++tally->swaps;
    }
}

} // namespace

void qft(StateVector& psi, std::span<const int> qubits, GateTally* tally) {
    qft_impl(psi, qubits, false, tally);
}

void inverse_qft(StateVector& psi, std::span<const int> qubits, GateTally* tally) {
    qft_impl(psi, qubits, true, tally);
}

int ancilla_budget(int precision_bits, double epsilon) {
    if (precision_bits < 1) throw std::invalid_argument("precision must be >= 1 bit");
    if (!(epsilon > 0.0) || epsilon >= 1.0)
        throw std::invalid_argument("failure probability must lie in (0, 1)");
    return precision_bits +
           static_cast<int>(std::ceil(std::log2(2.0 + 1.0 / (2.0 * epsilon))));
}

ControlledPowerFn controlled_powers(const Matrix& w, int register_qubits,
                                    bool circuit_faithful) {
    const auto d = Eigen::Index(1) << register_qubits;
    if (w.rows() != d || w.cols() != d)
        throw std::invalid_argument("unitary dimension does not match register");
    std::vector<int> reg(static_cast<std::size_t>(register_qubits));
    for (int i = 0; i < register_qubits; ++i) reg[static_cast<std::size_t>(i)] = i;

    if (circuit_faithful) {
        return [w, reg](StateVector& psi, int control, int j) {
            const int controls[] = {control};
            const std::uint64_t reps = std::uint64_t(1) << j;
            for (std::uint64_t r = 0; r < reps; ++r)
                apply_unitary(psi, w, reg, controls);
        };
    }

    auto powers = std::make_shared<std::vector<Matrix>>();
    powers->push_back(w);
    return [powers, reg](StateVector& psi, int control, int j) {
        while (static_cast<int>(powers->size()) <= j) {
            const Matrix& last = powers->back();
            powers->push_back(last * last);
        }
        const int controls[] = {control};
        apply_unitary(psi, (*powers)[static_cast<std::size_t>(j)], reg, controls);
    };
}

namespace {

StateVector run_pea_circuit(const ControlledPowerFn& powers,
                            const StateVector& eigen_register, int m) {
    if (m < 1) throw std::invalid_argument("need at least one ancilla");
    const int nr = eigen_register.n_qubits();
    StateVector psi = attach_register(eigen_register, m);
    const double before = psi.norm_sq();
    const Matrix h = gates::h().matrix();
    std::vector<int> anc(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        anc[static_cast<std::size_t>(j)] = nr + j;
        const int tq[] = {nr + j};
        apply_unitary(psi, h, tq);
    }
    for (int j = 0; j < m; ++j) powers(psi, nr + j, j);
    if (std::abs(psi.norm_sq() - before) > 1e-8)
        throw std::runtime_error("controlled-power callback drifted the state norm");
    inverse_qft(psi, anc);
    return psi;
}

} // namespace

PhaseEstimate phase_estimation(const ControlledPowerFn& powers,
                               StateVector& eigen_register, int m_ancillas,
                               rng::Stream& rng) {
    const int nr = eigen_register.n_qubits();
    StateVector psi = run_pea_circuit(powers, eigen_register, m_ancillas);
    auto meas = measure_register(psi, nr, m_ancillas, rng.uniform());
    eigen_register = extract_low_register(psi, nr, meas.outcome);
    const double phase =
        static_cast<double>(meas.outcome) / std::pow(2.0, m_ancillas);
    return {meas.outcome, phase, meas.probability};
}

std::vector<double> pea_distribution(const ControlledPowerFn& powers,
                                     const StateVector& eigen_register,
                                     int m_ancillas) {
    StateVector psi = run_pea_circuit(powers, eigen_register, m_ancillas);
    return register_distribution(psi, eigen_register.n_qubits(), m_ancillas);
}

double pea_kernel(double phi, std::uint64_t outcome, int m_ancillas) {
    const double n = std::pow(2.0, m_ancillas);
    double d = phi - static_cast<double>(outcome) / n;
    d -= std::round(d); // circular distance representative
    if (std::abs(d) < 1e-15) return 1.0;
    const double num = std::sin(n * kPi * d);
    const double den = n * std::sin(kPi * d);
    return (num * num) / (den * den);
}

double EnergyPhaseMap::tau() const {
    return 2.0 * kPi * (1.0 - std::pow(2.0, -m)) / (e_max - e_min);
}

double EnergyPhaseMap::bin_width() const {
    return (e_max - e_min) / ((1.0 - std::pow(2.0, -m)) * std::pow(2.0, m));
}

double EnergyPhaseMap::decode(std::uint64_t outcome) const {
    const std::uint64_t n = std::uint64_t(1) << m;
    const std::uint64_t wrapped = (n - (outcome % n)) % n;
    const double frac = static_cast<double>(wrapped) / static_cast<double>(n);
    return e_min + frac * 2.0 * kPi / tau();
}

EnergyPhaseMap energy_phase_map(const HermitianOperator& h, int m_ancillas) {
    auto [lo, hi] = gershgorin_bounds(h.matrix());
    if (hi - lo < 1e-12) hi = lo + 1.0; // flat spectrum: any scale works
    return {lo, hi, m_ancillas};
}

ControlledEvolverFn controlled_evolver(const HermitianOperator& h) {
    auto es = std::make_shared<EigenSystem>(h.matrix());
    const int nr = h.n_qubits();
    std::vector<int> reg(static_cast<std::size_t>(nr));
    for (int i = 0; i < nr; ++i) reg[static_cast<std::size_t>(i)] = i;
    return [es, reg](StateVector& psi, int control, double t) {
        const Matrix u = es->exponential(complex(0, -t));
        const int controls[] = {control};
        apply_unitary(psi, u, reg, controls);
    };
}

ProjectionResult project_ground_state(const ControlledEvolverFn& evolver,
                                      const EnergyPhaseMap& map,
                                      double target_energy, double energy_window,
                                      StateVector& trial_inout, rng::Stream& rng) {
    if (!(energy_window > 0.0)) throw std::invalid_argument("energy window must be positive");
    const double tau = map.tau();
    // Shift by e_min: the controlled evolution picks up a compensating phase
    // on the control so eigenphases start at zero.
    ControlledPowerFn powers = [&](StateVector& psi, int control, int j) {
        const double t = tau * std::pow(2.0, j);
        evolver(psi, control, t);
        const Matrix p = gates::phase(map.e_min * t).matrix();
        const int tq[] = {control};
        apply_unitary(psi, p, tq);
    };
    PhaseEstimate est = phase_estimation(powers, trial_inout, map.m, rng);
    const double energy = map.decode(est.outcome);
    const bool accepted = std::abs(energy - target_energy) <= energy_window;
    return {accepted, energy, est};
}

ProjectionResult project_ground_state(const HermitianOperator& h,
                                      const StateVector& trial, int m_ancillas,
                                      double energy_window, rng::Stream& rng,
                                      StateVector* post) {
    if (!trial.is_normalized()) throw std::invalid_argument("trial state must be normalized");
    EnergyPhaseMap map = energy_phase_map(h, m_ancillas);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    const double e0 = es.eigenvalues().minCoeff();
    StateVector reg = trial;
    auto res = project_ground_state(controlled_evolver(h), map, e0, energy_window, reg, rng);
    if (post) *post = std::move(reg);
    return res;
}

} // namespace qsim::spectral
