#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qsim {

using complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense pure state over n qubits. Qubit 0 is the least-significant bit of
/// the basis index; every module in the toolkit inherits this convention.
class StateVector {
public:
    StateVector() = default;
    explicit StateVector(int n_qubits);

    static StateVector basis_state(int n_qubits, std::uint64_t x);
    static StateVector from_amplitudes(int n_qubits, std::vector<complex> amps);

    int n_qubits() const { return n_qubits_; }
    std::uint64_t dim() const { return std::uint64_t(1) << n_qubits_; }

    complex& operator[](std::uint64_t i) { return amp_[i]; }
    const complex& operator[](std::uint64_t i) const { return amp_[i]; }
    std::vector<complex>& amplitudes() { return amp_; }
    const std::vector<complex>& amplitudes() const { return amp_; }

    double norm_sq() const;
    void normalize();
    bool is_normalized(double tol = 1e-10) const;

    Vector to_eigen() const;
    static StateVector from_eigen(int n_qubits, const Vector& v);

private:
    int n_qubits_ = 0;
    std::vector<complex> amp_;
};

/// Hermitian, trace-one, positive-semidefinite matrix over n qubits.
class DensityMatrix {
public:
    DensityMatrix() = default;
    DensityMatrix(int n_qubits, Matrix entries);

    static DensityMatrix from_pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(int n_qubits);

    int n_qubits() const { return n_qubits_; }
    std::uint64_t dim() const { return std::uint64_t(1) << n_qubits_; }
    const Matrix& entries() const { return m_; }
    Matrix& entries() { return m_; }

    /// Throws if Hermiticity/trace/positivity are violated beyond tolerances.
    void validate(double herm_tol = 1e-10, double trace_tol = 1e-10,
                  double psd_tol = 1e-10) const;

private:
    int n_qubits_ = 0;
    Matrix m_;
};

/// Unitary acting on `arity` qubits; checked to 1e-12 on construction.
class GateMatrix {
public:
    GateMatrix(int arity, Matrix entries, std::string label);

    int arity() const { return arity_; }
    const Matrix& matrix() const { return m_; }
    const std::string& label() const { return label_; }

private:
    int arity_;
    Matrix m_;
    std::string label_;
};

/// Hermitian observable / Hamiltonian on n qubits; checked to 1e-12.
class HermitianOperator {
public:
    HermitianOperator() = default;
    HermitianOperator(int n_qubits, Matrix entries);

    int n_qubits() const { return n_qubits_; }
    std::uint64_t dim() const { return std::uint64_t(1) << n_qubits_; }
    const Matrix& matrix() const { return m_; }

private:
    int n_qubits_ = 0;
    Matrix m_;
};

// ---------------------------------------------------------------------------
// Elementary gates

namespace gates {
GateMatrix h();
GateMatrix x();
GateMatrix y();
GateMatrix z();
GateMatrix cnot();           // index bit 1 = control, bit 0 = target
GateMatrix swap();
GateMatrix rx(double theta); // exp(-i X theta/2)
GateMatrix ry(double theta); // exp(-i Y theta/2)
GateMatrix rz(double theta); // exp(-i Z theta/2)
GateMatrix rz_phase(double gamma); // |0><0| - i e^{i gamma} |1><1|
GateMatrix r_k(int k);       // |0><0| + e^{-2 pi i / 2^k} |1><1|
GateMatrix phase(double theta); // |0><0| + e^{i theta} |1><1|
} // namespace gates

/// Dispatch by name; names cover H, X, Y, Z, CNOT, Rx, Ry, Rz_phase, R_k.
GateMatrix standard_gate(std::string_view name, std::span<const double> params = {});

// ---------------------------------------------------------------------------
// Gate application and measurement

/// Applies `gate` to the listed target qubits, optionally conditioned on all
/// control qubits being |1>. targets[j] carries bit j of the gate's own index.
void apply_unitary(StateVector& psi, const Matrix& gate,
                   std::span<const int> targets,
                   std::span<const int> controls = {});
void apply_unitary(StateVector& psi, const GateMatrix& gate,
                   std::span<const int> targets,
                   std::span<const int> controls = {});

/// Control-pattern variant: control qubit controls[i] must equal bit i of
/// `control_values` for the gate to act.
void apply_unitary_pattern(StateVector& psi, const Matrix& gate,
                           std::span<const int> targets,
                           std::span<const int> controls,
                           std::uint64_t control_values);

struct MeasureResult {
    int outcome;
    double probability;
};

/// Projective measurement of qubit q; collapses psi in place. `sample` is a
/// uniform draw from [0, 1).
MeasureResult measure_qubit(StateVector& psi, int q, double sample);

struct RegisterMeasureResult {
    std::uint64_t outcome;
    double probability;
};

/// Measures `count` adjacent qubits starting at `first` in one shot.
RegisterMeasureResult measure_register(StateVector& psi, int first, int count,
                                       double sample);

/// Marginal outcome distribution of the same register (no collapse).
std::vector<double> register_distribution(const StateVector& psi, int first,
                                          int count);

// ---------------------------------------------------------------------------
// Expectation values and state metrics

double expectation_value(const StateVector& psi, const HermitianOperator& a);
double expectation_value(const DensityMatrix& rho, const HermitianOperator& a);

struct StateMetrics {
    double fidelity;
    double trace_distance;
};

StateMetrics state_metrics(const StateVector& a, const StateVector& b);
StateMetrics state_metrics(const DensityMatrix& a, const DensityMatrix& b);

double fidelity(const StateVector& a, const StateVector& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_norm(const Matrix& m);

// ---------------------------------------------------------------------------
// Dense linear-algebra oracle

/// exp(scale * A) by eigendecomposition. Guarded to <= 12 qubits; for
/// scale = -i t the result is unitary to 1e-10.
Matrix dense_exponential(const HermitianOperator& a, complex scale);

/// Cached eigendecomposition for repeated exponentials of one operator.
struct EigenSystem {
    Eigen::VectorXd values;
    Matrix vectors;

    explicit EigenSystem(const Matrix& hermitian);
    Matrix exponential(complex scale) const;
    Vector apply_exponential(complex scale, const Vector& v) const;
};

// ---------------------------------------------------------------------------
// Matrix helpers

Matrix kron(const Matrix& a, const Matrix& b);
Matrix pauli(char letter); // 'I', 'X', 'Y', 'Z'

/// Tensor product of single-qubit Paulis; letters[i] acts on qubit i.
Matrix pauli_string_matrix(std::string_view letters);

/// Embeds a 2^k x 2^k operator on the given support into n qubits.
/// support[j] carries bit j of the small operator's index.
Matrix embed(const Matrix& op, std::span<const int> support, int n_qubits);

/// Full matrix of a circuit given as a state transformation.
Matrix circuit_unitary(int n_qubits,
                       const std::function<void(StateVector&)>& circuit);

/// Spectral norm (largest singular value).
double spectral_norm(const Matrix& m);

/// Gershgorin bounds [lo, hi] enclosing the spectrum of a Hermitian matrix.
std::pair<double, double> gershgorin_bounds(const Matrix& hermitian);

/// Appends `extra` qubits, all in |0>, above the existing register.
StateVector attach_register(const StateVector& psi, int extra);

/// Extracts the low `keep` qubits after the high qubits have collapsed to
/// the basis value `high_value`.
StateVector extract_low_register(const StateVector& psi, int keep,
                                 std::uint64_t high_value);

} // namespace qsim
