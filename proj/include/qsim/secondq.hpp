#pragma once

#include "qsim/core.hpp"
#include "qsim/rng.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qsim::secondq {

/// Rank-4 coefficient tensor h_pqrs over k fermionic modes.
class Rank4 {
public:
    Rank4() = default;
    explicit Rank4(int modes)
        : k_(modes), v_(static_cast<std::size_t>(modes) * modes * modes * modes) {}

    int modes() const { return k_; }
    complex& at(int p, int q, int r, int s) {
        return v_[index(p, q, r, s)];
    }
    const complex& at(int p, int q, int r, int s) const {
        return v_[index(p, q, r, s)];
    }

private:
    std::size_t index(int p, int q, int r, int s) const {
        return ((static_cast<std::size_t>(p) * k_ + q) * k_ + r) * k_ + s;
    }
    int k_ = 0;
    std::vector<complex> v_;
};

/// One- and two-body integrals: H = sum h_pq a+_p a_q
///                                 + 1/2 sum h_pqrs a+_p a+_q a_r a_s.
struct IntegralSet {
    int modes = 0;
    Matrix one_body;
    Rank4 two_body;
};

/// Parses the text integral format: header "norb <k>", a "1body" section of
/// "p q value" lines and a "2body" section of "p q r s value" lines; '#'
/// comments; Hermitian partners are auto-completed and conflicts rejected.
IntegralSet load_integrals(const std::filesystem::path& path);

/// Absorbs the one-body part into the two-body tensor via
/// a+_p a_q = 1/(N-1) sum_s a+_p a+_s a_s a_q, valid on the N-electron sector.
Rank4 reduce_to_two_body(const IntegralSet& integrals, int n_electrons);

struct PauliString {
    complex coefficient;
    std::string letters; // one of I,X,Y,Z per qubit; letters[j] acts on qubit j

    Matrix dense() const;
};

/// Product of two strings on the same register (Pauli algebra with phases).
PauliString multiply(const PauliString& a, const PauliString& b);

/// A fermionic ladder monomial as (mode, dagger) factors, leftmost first.
using LadderMonomial = std::vector<std::pair<int, bool>>;

/// Jordan-Wigner image of the monomial as a combined list of Pauli strings.
std::vector<PauliString> jordan_wigner(const LadderMonomial& monomial, int n_modes);

struct QubitHamiltonian {
    int n_qubits = 0;
    std::vector<PauliString> strings;

    Matrix dense() const;
};

/// Maps 1/2 sum h~_pqrs a+_p a+_q a_r a_s through Jordan-Wigner, combining
/// like strings and dropping |coefficient| < 1e-12. Coefficients of the
/// result are real (the input tensor must satisfy h_pqrs = conj(h_srqp)).
QubitHamiltonian build_qubit_hamiltonian(const Rank4& two_body);

/// exp(-i angle P) as a circuit: basis changes on non-Z sites, a CNOT parity
/// ladder, Rz(2 angle), and the mirror. The string's own coefficient is not
/// used; pass it through `angle`.
void evolve_pauli_string(StateVector& psi, const PauliString& str, double angle);

/// Controlled variant (controls only the central Rz; an identity string
/// becomes a controlled global phase on the control qubit).
void evolve_pauli_string(StateVector& psi, const PauliString& str, double angle,
                         int control);

struct EnergyEstimate {
    double energy;
    bool accepted;
    int trials;
};

/// PEA ground-state energy with a Trotterized evolution operator: the
/// W = exp(-i H tau) oracle is the dense product of string exponentials at
/// the given order/slices, and trials repeat until the ground-band outcome
/// appears. Throws when slice doubling moves the decoded band by more than
/// one precision bin.
EnergyEstimate estimate_ground_energy(const QubitHamiltonian& ham,
                                      const StateVector& trial, int precision_bits,
                                      double epsilon, int trotter_order,
                                      int trotter_slices, rng::Stream& rng,
                                      int max_trials = 256);

} // namespace qsim::secondq
