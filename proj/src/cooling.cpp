#include "qsim/cooling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qsim::cooling {

namespace {
constexpr double kPi = std::numbers::pi;

void check_window(const CoolingParams& p) {
    const double lo = p.phi(p.e_lo);
    const double hi = p.phi(p.e_hi);
    if (lo < -kPi / 2 - 1e-12 || hi >= kPi / 2 + 1e-12)
        throw std::invalid_argument("phase window violated: phi outside [-pi/2, pi/2)");
}

} // namespace

CoolingParams choose_params(const HermitianOperator& h, double margin,
                            bool dense_bounds) {
    if (margin < 0.0 || margin >= kPi / 2)
        throw std::invalid_argument("margin must lie in [0, pi/2)");
    double lo, hi;
    if (dense_bounds) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix(), Eigen::EigenvaluesOnly);
        lo = es.eigenvalues().minCoeff();
        hi = es.eigenvalues().maxCoeff();
    } else {
        std::tie(lo, hi) = gershgorin_bounds(h.matrix());
    }
    if (hi - lo < 1e-14) {
        // Flat spectrum: every phi equals zero with t = 1, gamma = E t.
        return {lo, 1.0, margin, lo, hi};
    }
    const double t = (kPi - 2.0 * margin) / (hi - lo);
    const double gamma = t * (hi + lo) / 2.0;
    CoolingParams p{gamma, t, margin, lo, hi};
    check_window(p);
    return p;
}

StepOutcome cooling_step(StateVector& psi, const HermitianOperator& h,
                         const CoolingParams& params, rng::Stream& rng) {
    check_window(params);
    if (h.n_qubits() != psi.n_qubits())
        throw std::invalid_argument("state/Hamiltonian dimension mismatch");
    const int anc = psi.n_qubits();
    StateVector ext = attach_register(psi, 1);

    const Matrix hgate = gates::h().matrix();
    const Matrix rz = gates::rz_phase(params.gamma).matrix();
    const Matrix u = dense_exponential(h, complex(0, -params.t));
    std::vector<int> reg(static_cast<std::size_t>(anc));
    for (int i = 0; i < anc; ++i) reg[static_cast<std::size_t>(i)] = i;
    const int aq[] = {anc};

    apply_unitary(ext, hgate, aq);
    apply_unitary(ext, rz, aq);
    apply_unitary(ext, u, reg, aq);
    apply_unitary(ext, hgate, aq);

    auto meas = measure_qubit(ext, anc, rng.uniform());
    psi = extract_low_register(ext, anc, static_cast<std::uint64_t>(meas.outcome));
    return {meas.outcome, meas.probability};
}

StateVector apply_lambda(const StateVector& psi, const HermitianOperator& h,
                         const CoolingParams& params, int j, double* probability) {
    if (j != 0 && j != 1) throw std::invalid_argument("branch index must be 0 or 1");
    const Matrix u = dense_exponential(h, complex(0, -params.t));
    const complex sign = j == 0 ? complex(0, -1) : complex(0, 1);
    const complex phase = sign * std::exp(complex(0, params.gamma));
    Vector v = psi.to_eigen();
    Vector branch = 0.5 * (v + phase * (u * v));
    const double p = branch.squaredNorm();
    if (probability) *probability = p;
    if (p <= 0.0) throw std::runtime_error("branch has zero probability");
    branch /= std::sqrt(p);
    return StateVector::from_eigen(psi.n_qubits(), branch);
}

EnergyBalance energy_balance_check(const StateVector& psi, const HermitianOperator& h,
                                   const CoolingParams& params) {
    check_window(params);
    EnergyBalance b{};
    b.e_in = expectation_value(psi, h);
    StateVector s0 = apply_lambda(psi, h, params, 0, &b.p0);
    StateVector s1 = apply_lambda(psi, h, params, 1, &b.p1);
    b.e0_branch = expectation_value(s0, h);
    b.e1_branch = expectation_value(s1, h);
    return b;
}

WalkStats run_walk(StateVector& state, const HermitianOperator& h,
                   const CoolingParams& params, int x_stop, int max_restarts,
                   rng::Stream& rng) {
    if (x_stop < 1) throw std::invalid_argument("x_stop must be >= 1");
    const StateVector start = state;
    WalkStats stats;
    double best_energy = expectation_value(state, h);
    StateVector best = state;

    while (true) {
        auto step = cooling_step(state, h, params, rng);
        ++stats.steps;
        stats.history.push_back(step.outcome);
        stats.x += step.outcome == 0 ? 1 : -1;
        const double e = expectation_value(state, h);
        if (e < best_energy) {
            best_energy = e;
            best = state;
        }
        if (stats.x >= x_stop) {
            stats.final_energy = e;
            stats.reached_stop = true;
            return stats;
        }
        if (stats.x < 0) {
            if (stats.restarts >= max_restarts) {
                state = best;
                stats.final_energy = best_energy;
                stats.reached_stop = false;
                return stats;
            }
            ++stats.restarts;
            state = start;
            stats.x = 0;
            stats.history.clear();
        }
    }
}

} // namespace qsim::cooling
