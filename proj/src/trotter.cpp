#include "qsim/trotter.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace qsim::trotter {

namespace {

void validate_terms(std::span<const HamiltonianTerm> terms) {
    if (terms.empty()) throw std::invalid_argument("term list is empty");
}

void append_merged(std::vector<PlanStep>& steps, int term, double duration) {
    if (!steps.empty() && steps.back().term == term)
        steps.back().duration += duration;
    else
        steps.push_back({term, duration});
}

// S_2(x): forward sweep at x/2, middle term at x, backward sweep at x/2.
void emit_order2(std::vector<PlanStep>& steps, int m, double x) {
    for (int i = 0; i < m - 1; ++i) append_merged(steps, i, x / 2);
    append_merged(steps, m - 1, x);
    for (int i = m - 2; i >= 0; --i) append_merged(steps, i, x / 2);
}

void emit_suzuki(std::vector<PlanStep>& steps, int m, int order, double x) {
    if (order == 2) {
        emit_order2(steps, m, x);
        return;
    }
    const double z = suzuki_z(order / 2);
    emit_suzuki(steps, m, order - 2, z * x);
    emit_suzuki(steps, m, order - 2, z * x);
    emit_suzuki(steps, m, order - 2, (1.0 - 4.0 * z) * x);
    emit_suzuki(steps, m, order - 2, z * x);
    emit_suzuki(steps, m, order - 2, z * x);
}

} // namespace

HamiltonianTerm make_term(std::vector<int> support, Matrix m, std::string label) {
    const auto d = Eigen::Index(1) << support.size();
    if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("term matrix does not match support size");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("term matrix is not Hermitian");
    std::uint64_t seen = 0;
    for (int q : support) {
        if (q < 0) throw std::out_of_range("negative support index");
        if (seen & (std::uint64_t(1) << q))
            throw std::invalid_argument("duplicate support index");
        seen |= std::uint64_t(1) << q;
    }
    return {std::move(support), std::move(m), std::move(label)};
}

double suzuki_z(int k) {
    if (k < 2) throw std::invalid_argument("suzuki_z defined for k >= 2");
    return 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * k - 1.0)));
}

std::size_t exponential_count(int m_terms, int half_order_k) {
    if (m_terms < 1 || half_order_k < 1)
        throw std::invalid_argument("need m >= 1 and k >= 1");
    std::size_t pow5 = 1;
    for (int i = 1; i < half_order_k; ++i) pow5 *= 5;
    return 2 * static_cast<std::size_t>(m_terms - 1) * pow5 + 1;
}

TrotterPlan build_plan(std::span<const HamiltonianTerm> terms, double t,
                       int order, int slices) {
    validate_terms(terms);
    if (slices < 1) throw std::invalid_argument("slices must be >= 1");
    if (order != 1 && (order < 2 || order % 2 != 0))
        throw std::invalid_argument("order must be 1 or an even number");
    const int m = static_cast<int>(terms.size());
    const double dt = t / slices;

    TrotterPlan plan;
    plan.order = order;
    plan.slices = slices;
    for (int s = 0; s < slices; ++s) {
        if (order == 1) {
            for (int i = 0; i < m; ++i) append_merged(plan.steps, i, dt);
        } else {
            emit_suzuki(plan.steps, m, order, dt);
        }
    }
    return plan;
}

void execute_plan(StateVector& psi, const TrotterPlan& plan,
                  std::span<const HamiltonianTerm> terms) {
    validate_terms(terms);
    std::vector<EigenSystem> eig;
    eig.reserve(terms.size());
    for (const auto& term : terms) {
        for (int q : term.support)
            if (q >= psi.n_qubits()) throw std::out_of_range("term support exceeds register");
        eig.emplace_back(term.matrix);
    }
    for (const auto& step : plan.steps) {
        const auto& term = terms[static_cast<std::size_t>(step.term)];
        const Matrix u = eig[static_cast<std::size_t>(step.term)].exponential(
            complex(0, -step.duration));
        apply_unitary(psi, u, term.support);
    }
}

Matrix total_hamiltonian(std::span<const HamiltonianTerm> terms, int n_qubits) {
    validate_terms(terms);
    const auto dim = Eigen::Index(1) << n_qubits;
    Matrix h = Matrix::Zero(dim, dim);
    for (const auto& term : terms) h += embed(term.matrix, term.support, n_qubits);
    return h;
}

Matrix plan_unitary(const TrotterPlan& plan, std::span<const HamiltonianTerm> terms,
                    int n_qubits) {
    const auto dim = Eigen::Index(1) << n_qubits;
    std::vector<EigenSystem> eig;
    eig.reserve(terms.size());
    for (const auto& term : terms) eig.emplace_back(term.matrix);

    Matrix u = Matrix::Identity(dim, dim);
    for (const auto& step : plan.steps) {
        const auto& term = terms[static_cast<std::size_t>(step.term)];
        const Matrix e = eig[static_cast<std::size_t>(step.term)].exponential(
            complex(0, -step.duration));
        u = embed(e, term.support, n_qubits) * u;
    }
    return u;
}

double plan_error(std::span<const HamiltonianTerm> terms, double t,
                  const TrotterPlan& plan, int n_qubits) {
    if (n_qubits > 10)
        throw std::invalid_argument("plan_error guarded to <= 10 qubits");
    const Matrix h = total_hamiltonian(terms, n_qubits);
    const Matrix exact = EigenSystem(h).exponential(complex(0, -t));
    const Matrix approx = plan_unitary(plan, terms, n_qubits);
    return spectral_norm(approx - exact);
}

OrderSelection select_order(std::span<const HamiltonianTerm> terms, double t,
                            double target_error, int n_qubits) {
    validate_terms(terms);
    if (!(target_error > 0.0)) throw std::invalid_argument("target error must be positive");
    const int m = static_cast<int>(terms.size());
    constexpr int kMaxSlices = 1 << 14;

    OrderSelection best{0, 0, std::numeric_limits<std::size_t>::max(),
                        std::numeric_limits<double>::infinity()};
    for (int k = 1; k <= 4; ++k) {
        const int order = 2 * k;
        auto error_at = [&](int slices) {
            return plan_error(terms, t, build_plan(terms, t, order, slices), n_qubits);
        };
        // Grow an upper bracket, then binary-search the minimal slice count.
        int hi = 1;
        double err_hi = error_at(hi);
        while (err_hi > target_error && hi < kMaxSlices) {
            hi *= 2;
            err_hi = error_at(hi);
        }
        if (err_hi > target_error) continue; // unreachable at this order
        int lo = hi / 2 < 1 ? 1 : hi / 2;
        if (hi == 1) lo = 1;
        while (lo < hi) {
            const int mid = lo + (hi - lo) / 2;
            if (error_at(mid) <= target_error)
                hi = mid;
            else
                lo = mid + 1;
        }
        const int slices = hi;
        const double err = error_at(slices);
        // Count after merging across slice boundaries.
        const std::size_t per = exponential_count(m, k);
        const std::size_t count =
            static_cast<std::size_t>(slices) * (per - 1) + 1;
        if (count < best.exponentials) best = {k, slices, count, err};
    }
    if (best.half_order == 0)
        throw std::runtime_error("target error unreachable within the slice guard");
    return best;
}

} // namespace qsim::trotter
