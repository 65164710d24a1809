#include "qsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qsim {

namespace {
constexpr double kPi = std::numbers::pi;

void check_qubit_count(int n) {
    if (n < 0 || n > 28)
        throw std::invalid_argument("qubit count out of range: " + std::to_string(n));
}
} // namespace

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
    check_qubit_count(n_qubits);
    amp_.assign(std::uint64_t(1) << n_qubits, complex(0.0, 0.0));
    amp_[0] = 1.0;
}

StateVector StateVector::basis_state(int n_qubits, std::uint64_t x) {
    check_qubit_count(n_qubits);
    if (x >= (std::uint64_t(1) << n_qubits))
        throw std::out_of_range("basis index " + std::to_string(x) +
                                " out of range for " + std::to_string(n_qubits) + " qubits");
    StateVector s(n_qubits);
    s.amp_[0] = 0.0;
    s.amp_[x] = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(int n_qubits, std::vector<complex> amps) {
    check_qubit_count(n_qubits);
    if (amps.size() != (std::uint64_t(1) << n_qubits))
        throw std::invalid_argument("amplitude array length must be 2^n");
    StateVector s;
    s.n_qubits_ = n_qubits;
    s.amp_ = std::move(amps);
    return s;
}

double StateVector::norm_sq() const {
    double acc = 0.0;
    for (const auto& a : amp_) acc += std::norm(a);
    return acc;
}

void StateVector::normalize() {
    double n = std::sqrt(norm_sq());
    if (n == 0.0) throw std::runtime_error("cannot normalize the zero vector");
    for (auto& a : amp_) a /= n;
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(norm_sq() - 1.0) < tol;
}

Vector StateVector::to_eigen() const {
    Vector v(static_cast<Eigen::Index>(amp_.size()));
    for (std::uint64_t i = 0; i < amp_.size(); ++i) v(static_cast<Eigen::Index>(i)) = amp_[i];
    return v;
}

StateVector StateVector::from_eigen(int n_qubits, const Vector& v) {
    std::vector<complex> a(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) a[static_cast<std::size_t>(i)] = v(i);
    return from_amplitudes(n_qubits, std::move(a));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(int n_qubits, Matrix entries)
    : n_qubits_(n_qubits), m_(std::move(entries)) {
    check_qubit_count(n_qubits);
    auto d = static_cast<Eigen::Index>(dim());
    if (m_.rows() != d || m_.cols() != d)
        throw std::invalid_argument("density matrix dimension mismatch");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
    Vector v = psi.to_eigen();
    return DensityMatrix(psi.n_qubits(), v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    auto d = static_cast<Eigen::Index>(std::uint64_t(1) << n_qubits);
    return DensityMatrix(n_qubits, Matrix::Identity(d, d) / static_cast<double>(d));
}

void DensityMatrix::validate(double herm_tol, double trace_tol, double psd_tol) const {
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
        throw std::runtime_error("density matrix is not Hermitian");
    if (std::abs(m_.trace() - complex(1.0)) > trace_tol)
        throw std::runtime_error("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -psd_tol)
        throw std::runtime_error("density matrix has a negative eigenvalue");
}

// ---------------------------------------------------------------------------
// GateMatrix / HermitianOperator

GateMatrix::GateMatrix(int arity, Matrix entries, std::string label)
    : arity_(arity), m_(std::move(entries)), label_(std::move(label)) {
    auto d = static_cast<Eigen::Index>(std::uint64_t(1) << arity);
    if (m_.rows() != d || m_.cols() != d)
        throw std::invalid_argument("gate dimension does not match arity");
    Matrix gram = m_.adjoint() * m_;
    if ((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("gate '" + label_ + "' is not unitary");
}

HermitianOperator::HermitianOperator(int n_qubits, Matrix entries)
    : n_qubits_(n_qubits), m_(std::move(entries)) {
    check_qubit_count(n_qubits);
    auto d = static_cast<Eigen::Index>(dim());
    if (m_.rows() != d || m_.cols() != d)
        throw std::invalid_argument("operator dimension mismatch");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("operator is not Hermitian");
}

// ---------------------------------------------------------------------------
// Gates

namespace gates {

GateMatrix h() {
    Matrix m(2, 2);
    double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return GateMatrix(1, m, "H");
}

GateMatrix x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return GateMatrix(1, m, "X");
}

GateMatrix y() {
    Matrix m(2, 2);
    m << complex(0, 0), complex(0, -1), complex(0, 1), complex(0, 0);
    return GateMatrix(1, m, "Y");
}

GateMatrix z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return GateMatrix(1, m, "Z");
}

GateMatrix cnot() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(2, 3) = 1;
    m(3, 2) = 1;
    return GateMatrix(2, m, "CNOT");
}

GateMatrix swap() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 2) = 1;
    m(2, 1) = 1;
    m(3, 3) = 1;
    return GateMatrix(2, m, "SWAP");
}

GateMatrix rx(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("Rx angle must be finite");
    Matrix m(2, 2);
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    m << complex(c, 0), complex(0, -s), complex(0, -s), complex(c, 0);
    return GateMatrix(1, m, "Rx");
}

GateMatrix ry(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("Ry angle must be finite");
    Matrix m(2, 2);
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    m << c, -s, s, c;
    return GateMatrix(1, m, "Ry");
}

GateMatrix rz(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("Rz angle must be finite");
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = std::exp(complex(0, -theta / 2));
    m(1, 1) = std::exp(complex(0, theta / 2));
    return GateMatrix(1, m, "Rz");
}

GateMatrix rz_phase(double gamma) {
    if (!std::isfinite(gamma)) throw std::invalid_argument("Rz_phase angle must be finite");
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = complex(0, -1) * std::exp(complex(0, gamma));
    return GateMatrix(1, m, "Rz_phase");
}

GateMatrix r_k(int k) {
    if (k < 1 || k > 62) throw std::invalid_argument("R_k index out of range");
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = std::exp(complex(0, -2.0 * kPi / std::pow(2.0, k)));
    return GateMatrix(1, m, "R_k");
}

GateMatrix phase(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("phase angle must be finite");
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = std::exp(complex(0, theta));
    return GateMatrix(1, m, "Phase");
}

} // namespace gates

GateMatrix standard_gate(std::string_view name, std::span<const double> params) {
    auto want = [&](std::size_t n) {
        if (params.size() != n)
            throw std::invalid_argument("gate '" + std::string(name) + "' expects " +
                                        std::to_string(n) + " parameter(s)");
    };
    if (name == "H") { want(0); return gates::h(); }
    if (name == "X") { want(0); return gates::x(); }
    if (name == "Y") { want(0); return gates::y(); }
    if (name == "Z") { want(0); return gates::z(); }
    if (name == "CNOT") { want(0); return gates::cnot(); }
    if (name == "Rx") { want(1); return gates::rx(params[0]); }
    if (name == "Ry") { want(1); return gates::ry(params[0]); }
    if (name == "Rz_phase") { want(1); return gates::rz_phase(params[0]); }
    if (name == "R_k") {
        want(1);
        double k = params[0];
        if (!std::isfinite(k) || k != std::floor(k))
            throw std::invalid_argument("R_k index must be an integer");
        return gates::r_k(static_cast<int>(k));
    }
    throw std::invalid_argument("unknown gate name: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Gate application

namespace {

// Spreads a compressed index over the bit positions *not* listed in
// `sorted_positions` (which receive zeros).
std::uint64_t expand_index(std::uint64_t c, std::span<const int> sorted_positions) {
    std::uint64_t x = c;
    for (int p : sorted_positions) {
        std::uint64_t low = x & ((std::uint64_t(1) << p) - 1);
        x = ((x >> p) << (p + 1)) | low;
    }
    return x;
}

void validate_indices(const StateVector& psi, std::span<const int> targets,
                      std::span<const int> controls) {
    const int n = psi.n_qubits();
    std::uint64_t seen = 0;
    for (int t : targets) {
        if (t < 0 || t >= n) throw std::out_of_range("target qubit out of range");
        if (seen & (std::uint64_t(1) << t))
            throw std::invalid_argument("duplicate target qubit");
        seen |= std::uint64_t(1) << t;
    }
    for (int c : controls) {
        if (c < 0 || c >= n) throw std::out_of_range("control qubit out of range");
        if (seen & (std::uint64_t(1) << c))
            throw std::invalid_argument("control overlaps another index");
        seen |= std::uint64_t(1) << c;
    }
}

} // namespace

void apply_unitary_pattern(StateVector& psi, const Matrix& gate,
                           std::span<const int> targets,
                           std::span<const int> controls,
                           std::uint64_t control_values) {
    validate_indices(psi, targets, controls);
    const int k = static_cast<int>(targets.size());
    const auto gdim = std::uint64_t(1) << k;
    if (gate.rows() != static_cast<Eigen::Index>(gdim) ||
        gate.cols() != static_cast<Eigen::Index>(gdim))
        throw std::invalid_argument("gate arity does not match target count");

    std::uint64_t cmask = 0, cwant = 0;
    for (std::size_t i = 0; i < controls.size(); ++i) {
        cmask |= std::uint64_t(1) << controls[i];
        if ((control_values >> i) & 1) cwant |= std::uint64_t(1) << controls[i];
    }

    std::vector<int> sorted(targets.begin(), targets.end());
    std::sort(sorted.begin(), sorted.end());

    // Offsets of the 2^k orbit members relative to a frame base index.
    std::vector<std::uint64_t> offset(gdim, 0);
    for (std::uint64_t p = 0; p < gdim; ++p)
        for (int j = 0; j < k; ++j)
            if ((p >> j) & 1) offset[p] |= std::uint64_t(1) << targets[static_cast<std::size_t>(j)];

    auto& amp = psi.amplitudes();
    const std::uint64_t frames = psi.dim() >> k;
    std::vector<complex> in(gdim), out(gdim);
    for (std::uint64_t c = 0; c < frames; ++c) {
        const std::uint64_t base = expand_index(c, sorted);
        if ((base & cmask) != cwant) continue;
        for (std::uint64_t p = 0; p < gdim; ++p) in[p] = amp[base | offset[p]];
        for (std::uint64_t r = 0; r < gdim; ++r) {
            complex acc(0, 0);
            for (std::uint64_t p = 0; p < gdim; ++p)
                acc += gate(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p)) * in[p];
            out[r] = acc;
        }
        for (std::uint64_t r = 0; r < gdim; ++r) amp[base | offset[r]] = out[r];
    }
}

void apply_unitary(StateVector& psi, const Matrix& gate, std::span<const int> targets,
                   std::span<const int> controls) {
    apply_unitary_pattern(psi, gate, targets, controls, ~std::uint64_t(0));
}

void apply_unitary(StateVector& psi, const GateMatrix& gate, std::span<const int> targets,
                   std::span<const int> controls) {
    apply_unitary(psi, gate.matrix(), targets, controls);
}

// ---------------------------------------------------------------------------
// Measurement

MeasureResult measure_qubit(StateVector& psi, int q, double sample) {
    if (q < 0 || q >= psi.n_qubits()) throw std::out_of_range("qubit index out of range");
    if (sample < 0.0 || sample >= 1.0) throw std::invalid_argument("sample must be in [0,1)");
    const std::uint64_t bit = std::uint64_t(1) << q;
    auto& amp = psi.amplitudes();
    double p0 = 0.0;
    for (std::uint64_t i = 0; i < psi.dim(); ++i)
        if (!(i & bit)) p0 += std::norm(amp[i]);
    const int outcome = sample < p0 ? 0 : 1;
    const double p = outcome == 0 ? p0 : 1.0 - p0;
    if (p <= 0.0) throw std::runtime_error("measurement selected a zero-probability branch");
    const double scale = 1.0 / std::sqrt(p);
    for (std::uint64_t i = 0; i < psi.dim(); ++i) {
        if ((static_cast<int>((i & bit) != 0)) == outcome)
            amp[i] *= scale;
        else
            amp[i] = 0.0;
    }
    return {outcome, p};
}

std::vector<double> register_distribution(const StateVector& psi, int first, int count) {
    if (first < 0 || count < 0 || first + count > psi.n_qubits())
        throw std::out_of_range("register out of range");
    std::vector<double> dist(std::uint64_t(1) << count, 0.0);
    const std::uint64_t mask = (std::uint64_t(1) << count) - 1;
    const auto& amp = psi.amplitudes();
    for (std::uint64_t i = 0; i < psi.dim(); ++i)
        dist[(i >> first) & mask] += std::norm(amp[i]);
    return dist;
}

RegisterMeasureResult measure_register(StateVector& psi, int first, int count,
                                       double sample) {
    if (sample < 0.0 || sample >= 1.0) throw std::invalid_argument("sample must be in [0,1)");
    auto dist = register_distribution(psi, first, count);
    std::uint64_t outcome = dist.size() - 1;
    double cdf = 0.0;
    for (std::uint64_t a = 0; a < dist.size(); ++a) {
        cdf += dist[a];
        if (sample < cdf) { outcome = a; break; }
    }
    double p = dist[outcome];
    if (p <= 0.0) throw std::runtime_error("measurement selected a zero-probability branch");
    const std::uint64_t mask = (std::uint64_t(1) << count) - 1;
    auto& amp = psi.amplitudes();
    const double scale = 1.0 / std::sqrt(p);
    for (std::uint64_t i = 0; i < psi.dim(); ++i) {
        if (((i >> first) & mask) == outcome)
            amp[i] *= scale;
        else
            amp[i] = 0.0;
    }
    return {outcome, p};
}

// ---------------------------------------------------------------------------
// Expectation values and metrics

double expectation_value(const StateVector& psi, const HermitianOperator& a) {
    if (a.n_qubits() != psi.n_qubits())
        throw std::invalid_argument("operator/state dimension mismatch");
    Vector v = psi.to_eigen();
    complex e = v.adjoint() * (a.matrix() * v);
    return e.real();
}

double expectation_value(const DensityMatrix& rho, const HermitianOperator& a) {
    if (a.n_qubits() != rho.n_qubits())
        throw std::invalid_argument("operator/state dimension mismatch");
    return (a.matrix() * rho.entries()).trace().real();
}

double trace_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.n_qubits() != b.n_qubits())
        throw std::invalid_argument("state dimension mismatch");
    Matrix d = a.entries() - b.entries();
    // The difference of Hermitian matrices is Hermitian: singular values are
    // absolute eigenvalues.
    Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.n_qubits() != b.n_qubits())
        throw std::invalid_argument("state dimension mismatch");
    complex ip(0, 0);
    for (std::uint64_t i = 0; i < a.dim(); ++i) ip += std::conj(a[i]) * b[i];
    return std::norm(ip);
}

StateMetrics state_metrics(const StateVector& a, const StateVector& b) {
    double f = fidelity(a, b);
    return {f, std::sqrt(std::max(0.0, 1.0 - f))};
}

StateMetrics state_metrics(const DensityMatrix& a, const DensityMatrix& b) {
    // Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
    Eigen::SelfAdjointEigenSolver<Matrix> ea(a.entries());
    Eigen::VectorXd va = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix sq = ea.eigenvectors() * va.asDiagonal() * ea.eigenvectors().adjoint();
    Matrix inner = sq * b.entries() * sq;
    Eigen::SelfAdjointEigenSolver<Matrix> ei(inner, Eigen::EigenvaluesOnly);
    double f = ei.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return {f * f, trace_distance(a, b)};
}

// ---------------------------------------------------------------------------
// Dense exponential oracle

EigenSystem::EigenSystem(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    values = es.eigenvalues();
    vectors = es.eigenvectors();
}

Matrix EigenSystem::exponential(complex scale) const {
    Vector d(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i)
        d(i) = std::exp(scale * values(i));
    return vectors * d.asDiagonal() * vectors.adjoint();
}

Vector EigenSystem::apply_exponential(complex scale, const Vector& v) const {
    Vector c = vectors.adjoint() * v;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        c(i) *= std::exp(scale * values(i));
    return vectors * c;
}

Matrix dense_exponential(const HermitianOperator& a, complex scale) {
    if (a.n_qubits() > 12)
        throw std::invalid_argument("dense_exponential guarded to <= 12 qubits");
    return EigenSystem(a.matrix()).exponential(scale);
}

// ---------------------------------------------------------------------------
// Matrix helpers

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix pauli(char letter) {
    Matrix m(2, 2);
    switch (letter) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << complex(0, 0), complex(0, -1), complex(0, 1), complex(0, 0); break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: throw std::invalid_argument(std::string("unknown Pauli letter: ") + letter);
    }
    return m;
}

Matrix pauli_string_matrix(std::string_view letters) {
    Matrix out = Matrix::Identity(1, 1);
    // letters[i] acts on qubit i (least significant), so it is the rightmost
    // Kronecker factor.
    for (char c : letters) out = kron(pauli(c), out);
    return out;
}

Matrix embed(const Matrix& op, std::span<const int> support, int n_qubits) {
    const int k = static_cast<int>(support.size());
    if (op.rows() != (Eigen::Index(1) << k))
        throw std::invalid_argument("operator dimension does not match support size");
    std::uint64_t smask = 0;
    for (int q : support) {
        if (q < 0 || q >= n_qubits) throw std::out_of_range("support qubit out of range");
        if (smask & (std::uint64_t(1) << q)) throw std::invalid_argument("duplicate support qubit");
        smask |= std::uint64_t(1) << q;
    }
    const std::uint64_t dim = std::uint64_t(1) << n_qubits;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    auto gather = [&](std::uint64_t x) {
        std::uint64_t g = 0;
        for (int j = 0; j < k; ++j)
            if ((x >> support[static_cast<std::size_t>(j)]) & 1) g |= std::uint64_t(1) << j;
        return g;
    };
    for (std::uint64_t col = 0; col < dim; ++col) {
        const std::uint64_t rest = col & ~smask;
        const std::uint64_t gc = gather(col);
        for (std::uint64_t gr = 0; gr < (std::uint64_t(1) << k); ++gr) {
            complex v = op(static_cast<Eigen::Index>(gr), static_cast<Eigen::Index>(gc));
            if (v == complex(0.0)) continue;
            std::uint64_t row = rest;
            for (int j = 0; j < k; ++j)
                if ((gr >> j) & 1) row |= std::uint64_t(1) << support[static_cast<std::size_t>(j)];
            out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v;
        }
    }
    return out;
}

Matrix circuit_unitary(int n_qubits, const std::function<void(StateVector&)>& circuit) {
    const std::uint64_t dim = std::uint64_t(1) << n_qubits;
    Matrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::uint64_t col = 0; col < dim; ++col) {
        StateVector psi = StateVector::basis_state(n_qubits, col);
        circuit(psi);
        for (std::uint64_t row = 0; row < dim; ++row)
            out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = psi[row];
    }
    return out;
}

double spectral_norm(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

std::pair<double, double> gershgorin_bounds(const Matrix& hermitian) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < hermitian.rows(); ++i) {
        double center = hermitian(i, i).real();
        double radius = 0.0;
        for (Eigen::Index j = 0; j < hermitian.cols(); ++j)
            if (j != i) radius += std::abs(hermitian(i, j));
        lo = std::min(lo, center - radius);
        hi = std::max(hi, center + radius);
    }
    return {lo, hi};
}

StateVector attach_register(const StateVector& psi, int extra) {
    StateVector out(psi.n_qubits() + extra);
    auto& amps = out.amplitudes();
    std::fill(amps.begin(), amps.end(), complex(0, 0));
    for (std::uint64_t i = 0; i < psi.dim(); ++i) amps[i] = psi[i];
    return out;
}

StateVector extract_low_register(const StateVector& psi, int keep, std::uint64_t high_value) {
    const std::uint64_t low_dim = std::uint64_t(1) << keep;
    std::vector<complex> amps(low_dim);
    double nsq = 0.0;
    for (std::uint64_t x = 0; x < low_dim; ++x) {
        amps[x] = psi[(high_value << keep) | x];
        nsq += std::norm(amps[x]);
    }
    if (nsq <= 0.0) throw std::runtime_error("extracted register has zero weight");
    const double s = 1.0 / std::sqrt(nsq);
    for (auto& a : amps) a *= s;
    return StateVector::from_amplitudes(keep, std::move(amps));
}

} // namespace qsim
