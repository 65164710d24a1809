#include "qsim/secondq.hpp"

#include "qsim/spectral.hpp"
#include "qsim/trotter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qsim::secondq {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line_no,
                             const std::string& why) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
}

} // namespace

IntegralSet load_integrals(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open integral file: " + path.string());

    IntegralSet set;
    enum class Section { header, one_body, two_body } section = Section::header;
    std::string line;
    int line_no = 0;
    bool have_norb = false;
    std::map<std::pair<int, int>, double> seen1;
    std::map<std::array<int, 4>, double> seen2;

    auto check_mode = [&](int m) {
        if (m < 0 || m >= set.modes) parse_fail(path, line_no, "mode index out of range");
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue; // blank

        if (first == "norb") {
            int k = 0;
            if (!(ss >> k) || k < 1) parse_fail(path, line_no, "bad mode count");
            set.modes = k;
            set.one_body = Matrix::Zero(k, k);
            set.two_body = Rank4(k);
            have_norb = true;
            continue;
        }
        if (!have_norb) parse_fail(path, line_no, "missing 'norb <k>' header");
        if (first == "1body") { section = Section::one_body; continue; }
        if (first == "2body") { section = Section::two_body; continue; }

        if (section == Section::one_body) {
            std::istringstream ls(line);
            int p, q;
            double val;
            std::string extra;
            if (!(ls >> p >> q >> val) || (ls >> extra))
                parse_fail(path, line_no, "expected 'p q value'");
            check_mode(p); check_mode(q);
            auto key = std::make_pair(p, q);
            auto partner = std::make_pair(q, p);
            if (auto it = seen1.find(key); it != seen1.end() && std::abs(it->second - val) > 1e-12)
                parse_fail(path, line_no, "conflicting duplicate one-body entry");
            if (auto it = seen1.find(partner);
                it != seen1.end() && p != q && std::abs(it->second - val) > 1e-12)
                parse_fail(path, line_no, "entry conflicts with its Hermitian partner");
            seen1[key] = val;
            set.one_body(p, q) = val;
            set.one_body(q, p) = val; // real integrals: conj(val) = val
        } else if (section == Section::two_body) {
            std::istringstream ls(line);
            int p, q, r, s;
            double val;
            std::string extra;
            if (!(ls >> p >> q >> r >> s >> val) || (ls >> extra))
                parse_fail(path, line_no, "expected 'p q r s value'");
            check_mode(p); check_mode(q); check_mode(r); check_mode(s);
            std::array<int, 4> key{p, q, r, s};
            std::array<int, 4> partner{s, r, q, p};
            if (auto it = seen2.find(key); it != seen2.end() && std::abs(it->second - val) > 1e-12)
                parse_fail(path, line_no, "conflicting duplicate two-body entry");
            if (auto it = seen2.find(partner);
                it != seen2.end() && key != partner && std::abs(it->second - val) > 1e-12)
                parse_fail(path, line_no, "entry conflicts with its Hermitian partner");
            seen2[key] = val;
            set.two_body.at(p, q, r, s) = val;
            set.two_body.at(s, r, q, p) = val;
        } else {
            parse_fail(path, line_no, "data line outside any section");
        }
    }
    if (!have_norb) parse_fail(path, line_no ? line_no : 1, "missing 'norb <k>' header");
    return set;
}

Rank4 reduce_to_two_body(const IntegralSet& integrals, int n_electrons) {
    if (n_electrons < 2)
        throw std::invalid_argument("two-body reduction needs N >= 2 electrons");
    const int k = integrals.modes;
    Rank4 out = integrals.two_body;
    const double w = 2.0 / (n_electrons - 1); // the 1/2 in front of h~ eats a factor 2
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) {
            const complex h = integrals.one_body(p, q);
            if (h == complex(0.0)) continue;
            for (int s = 0; s < k; ++s) out.at(p, s, s, q) += w * h;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Pauli strings

Matrix PauliString::dense() const {
    return coefficient * pauli_string_matrix(letters);
}

PauliString multiply(const PauliString& a, const PauliString& b) {
    if (a.letters.size() != b.letters.size())
        throw std::invalid_argument("string length mismatch");
    PauliString out;
    out.coefficient = a.coefficient * b.coefficient;
    out.letters.resize(a.letters.size());
    for (std::size_t i = 0; i < a.letters.size(); ++i) {
        const char x = a.letters[i], y = b.letters[i];
        char r;
        complex phase(1.0, 0.0);
        if (x == 'I') r = y;
        else if (y == 'I') r = x;
        else if (x == y) r = 'I';
        else {
            // XY = iZ, YZ = iX, ZX = iY; reversed order flips the sign.
            auto cyc = [](char u, char v) {
                return (u == 'X' && v == 'Y') || (u == 'Y' && v == 'Z') ||
                       (u == 'Z' && v == 'X');
            };
            r = static_cast<char>('X' ^ 'Y' ^ 'Z' ^ x ^ y); // the remaining letter
            phase = cyc(x, y) ? complex(0, 1) : complex(0, -1);
        }
        out.letters[i] = r;
        out.coefficient *= phase;
    }
    return out;
}

namespace {

void combine_strings(std::vector<PauliString>& strings, double prune = 0.0) {
    std::map<std::string, complex> acc;
    for (const auto& s : strings) acc[s.letters] += s.coefficient;
    strings.clear();
    for (auto& [letters, coeff] : acc) {
        if (std::abs(coeff) <= prune) continue;
        strings.push_back({coeff, letters});
    }
}

// JW image of one ladder operator: (prod_{m<j} Z_m) (X -+ iY)_j / 2.
std::vector<PauliString> ladder_strings(int mode, bool dagger, int n_modes) {
    std::string zx(static_cast<std::size_t>(n_modes), 'I');
    for (int m = 0; m < mode; ++m) zx[static_cast<std::size_t>(m)] = 'Z';
    std::string zy = zx;
    zx[static_cast<std::size_t>(mode)] = 'X';
    zy[static_cast<std::size_t>(mode)] = 'Y';
    const complex ycoef = dagger ? complex(0, -0.5) : complex(0, 0.5);
    return {{complex(0.5, 0), zx}, {ycoef, zy}};
}

} // namespace

std::vector<PauliString> jordan_wigner(const LadderMonomial& monomial, int n_modes) {
    std::vector<PauliString> acc{
        {complex(1.0, 0.0), std::string(static_cast<std::size_t>(n_modes), 'I')}};
    for (const auto& [mode, dagger] : monomial) {
        if (mode < 0 || mode >= n_modes)
            throw std::out_of_range("mode index exceeds register");
        const auto factors = ladder_strings(mode, dagger, n_modes);
        std::vector<PauliString> next;
        next.reserve(acc.size() * 2);
        for (const auto& a : acc)
            for (const auto& b : factors) next.push_back(multiply(a, b));
        acc = std::move(next);
        combine_strings(acc);
    }
    return acc;
}

QubitHamiltonian build_qubit_hamiltonian(const Rank4& two_body) {
    const int k = two_body.modes();
    // Hermiticity of the tensor: h_pqrs = conj(h_srqp).
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s)
                    if (std::abs(two_body.at(p, q, r, s) -
                                 std::conj(two_body.at(s, r, q, p))) > 1e-10)
                        throw std::invalid_argument(
                            "two-body tensor violates h_pqrs = conj(h_srqp)");

    QubitHamiltonian ham;
    ham.n_qubits = k;
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q) {
            if (p == q) continue; // a+_p a+_p = 0
            for (int r = 0; r < k; ++r)
                for (int s = 0; s < k; ++s) {
                    if (r == s) continue;
                    const complex coeff = two_body.at(p, q, r, s);
                    if (std::abs(coeff) < 1e-14) continue;
                    auto strings = jordan_wigner(
                        {{p, true}, {q, true}, {r, false}, {s, false}}, k);
                    for (auto& str : strings) {
                        str.coefficient *= 0.5 * coeff;
                        ham.strings.push_back(std::move(str));
                    }
                }
        }
    combine_strings(ham.strings, 1e-12);
    for (auto& s : ham.strings) {
        if (std::abs(s.coefficient.imag()) > 1e-10)
            throw std::runtime_error("qubit Hamiltonian has a complex coefficient");
        s.coefficient = complex(s.coefficient.real(), 0.0);
    }
    return ham;
}

Matrix QubitHamiltonian::dense() const {
    const auto dim = Eigen::Index(1) << n_qubits;
    Matrix h = Matrix::Zero(dim, dim);
    for (const auto& s : strings) h += s.dense();
    return h;
}

// ---------------------------------------------------------------------------
// Pauli-string evolution

namespace {

void string_evolution_circuit(StateVector& psi, const PauliString& str,
                              double angle, const int* control) {
    if (static_cast<int>(str.letters.size()) > psi.n_qubits())
        throw std::invalid_argument("string exceeds register");
    std::vector<int> active;
    for (std::size_t i = 0; i < str.letters.size(); ++i)
        if (str.letters[i] != 'I') active.push_back(static_cast<int>(i));

    if (active.empty()) {
        // Global phase e^{-i angle}; observable only under a control.
        if (control) {
            const Matrix p = gates::phase(-angle).matrix();
            const int tq[] = {*control};
            apply_unitary(psi, p, tq);
        } else {
            const complex g = std::exp(complex(0, -angle));
            for (auto& a : psi.amplitudes()) a *= g;
        }
        return;
    }

    const Matrix h = gates::h().matrix();
    const Matrix rxp = gates::rx(std::numbers::pi / 2).matrix();
    const Matrix rxm = gates::rx(-std::numbers::pi / 2).matrix();
    const Matrix cx = gates::x().matrix();

    auto basis_in = [&]() {
        for (int q : active) {
            const int tq[] = {q};
            const char l = str.letters[static_cast<std::size_t>(q)];
            if (l == 'X') apply_unitary(psi, h, tq);
            else if (l == 'Y') apply_unitary(psi, rxp, tq);
        }
    };
    auto basis_out = [&]() {
        for (int q : active) {
            const int tq[] = {q};
            const char l = str.letters[static_cast<std::size_t>(q)];
            if (l == 'X') apply_unitary(psi, h, tq);
            else if (l == 'Y') apply_unitary(psi, rxm, tq);
        }
    };
    auto ladder = [&](bool undo) {
        const std::size_t n = active.size();
        if (!undo) {
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const int tq[] = {active[i + 1]};
                const int cq[] = {active[i]};
                apply_unitary(psi, cx, tq, cq);
            }
        } else {
            for (std::size_t i = n - 1; i-- > 0;) {
                const int tq[] = {active[i + 1]};
                const int cq[] = {active[i]};
                apply_unitary(psi, cx, tq, cq);
            }
        }
    };

    basis_in();
    ladder(false);
    const Matrix rz = gates::rz(2.0 * angle).matrix();
    const int tq[] = {active.back()};
    if (control) {
        const int cq[] = {*control};
        apply_unitary(psi, rz, tq, cq);
    } else {
        apply_unitary(psi, rz, tq);
    }
    ladder(true);
    basis_out();
}

} // namespace

void evolve_pauli_string(StateVector& psi, const PauliString& str, double angle) {
    string_evolution_circuit(psi, str, angle, nullptr);
}

void evolve_pauli_string(StateVector& psi, const PauliString& str, double angle,
                         int control) {
    string_evolution_circuit(psi, str, angle, &control);
}

// ---------------------------------------------------------------------------
// PEA energy estimation

namespace {

Matrix trotterized_step(const QubitHamiltonian& ham, double tau, int order,
                        int slices) {
    std::vector<trotter::HamiltonianTerm> terms;
    std::vector<int> all(static_cast<std::size_t>(ham.n_qubits));
    for (int i = 0; i < ham.n_qubits; ++i) all[static_cast<std::size_t>(i)] = i;
    for (const auto& s : ham.strings)
        terms.push_back(trotter::make_term(all, s.dense(), s.letters));
    auto plan = trotter::build_plan(terms, tau, order, slices);
    return trotter::plan_unitary(plan, terms, ham.n_qubits);
}

std::uint64_t distribution_mode(const std::vector<double>& dist) {
    std::uint64_t best = 0;
    for (std::uint64_t i = 1; i < dist.size(); ++i)
        if (dist[i] > dist[best]) best = i;
    return best;
}

} // namespace

EnergyEstimate estimate_ground_energy(const QubitHamiltonian& ham,
                                      const StateVector& trial, int precision_bits,
                                      double epsilon, int trotter_order,
                                      int trotter_slices, rng::Stream& rng,
                                      int max_trials) {
    if (!trial.is_normalized())
        throw std::invalid_argument("trial state must be normalized");
    const Matrix hdense = ham.dense();
    const HermitianOperator h(ham.n_qubits, hdense);
    const int m = spectral::ancilla_budget(precision_bits, epsilon);
    spectral::EnergyPhaseMap map = spectral::energy_phase_map(h, m);

    // Target: the lowest eigenvalue the trial actually overlaps.
    EigenSystem es(hdense);
    const Vector tv = trial.to_eigen();
    double target = es.values.maxCoeff();
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        const double overlap = std::norm(complex((es.vectors.col(i).adjoint() * tv)(0, 0)));
        if (overlap > 1e-10) { target = es.values(i); break; } // values sorted ascending
    }

    const double tau = map.tau();
    // The e_min offset of the energy-phase map enters as a scalar on W; under
    // a control that scalar is a physical controlled phase.
    const complex offset = std::exp(complex(0, map.e_min * tau));
    const Matrix w = offset * trotterized_step(ham, tau, trotter_order, trotter_slices);
    const double window = 2.0 * std::pow(2.0, -precision_bits) * (map.e_max - map.e_min);

    // Slice-doubling drift check on the most likely outcome of the full PEA.
    {
        const Matrix w2 =
            offset * trotterized_step(ham, tau, trotter_order, 2 * trotter_slices);
        auto d1 = spectral::pea_distribution(
            spectral::controlled_powers(w, ham.n_qubits), trial, m);
        auto d2 = spectral::pea_distribution(
            spectral::controlled_powers(w2, ham.n_qubits), trial, m);
        const double e1 = map.decode(distribution_mode(d1));
        const double e2 = map.decode(distribution_mode(d2));
        const double band = std::pow(2.0, -precision_bits) * (map.e_max - map.e_min);
        if (std::abs(e1 - e2) > band)
            throw std::runtime_error(
                "Trotter slicing too coarse: decoded energy drifts under slice doubling");
    }

    auto powers = spectral::controlled_powers(w, ham.n_qubits);
    EnergyEstimate result{0.0, false, 0};
    for (int trialno = 0; trialno < max_trials; ++trialno) {
        StateVector reg = trial;
        auto est = spectral::phase_estimation(powers, reg, m, rng);
        result.energy = map.decode(est.outcome);
        result.trials = trialno + 1;
        if (std::abs(result.energy - target) <= window) {
            result.accepted = true;
            break;
        }
    }
    return result;
}

} // namespace qsim::secondq
