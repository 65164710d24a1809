#include "qsim/adiabatic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qsim::adiabatic {

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

Matrix Interpolation::at(double s) const {
    return (1.0 - s) * h_i.matrix() + s * h_f.matrix();
}

Interpolation make_interpolation(HermitianOperator h_i, HermitianOperator h_f,
                                 std::function<double(double)> schedule) {
    if (h_i.n_qubits() != h_f.n_qubits())
        throw std::invalid_argument("endpoint Hamiltonians differ in size");
    Interpolation interp{std::move(h_i), std::move(h_f), std::move(schedule)};
    if (!interp.schedule) interp.schedule = [](double u) { return u; };
    if (std::abs(interp.schedule(0.0)) > 1e-12 || std::abs(interp.schedule(1.0) - 1.0) > 1e-12)
        throw std::invalid_argument("schedule must map 0 -> 0 and 1 -> 1");
    double prev = interp.schedule(0.0);
    for (int i = 1; i <= 64; ++i) {
        const double cur = interp.schedule(i / 64.0);
        if (cur < prev - 1e-12)
            throw std::invalid_argument("schedule must be monotone");
        prev = cur;
    }
    return interp;
}

StateVector evolve_adiabatic(const StateVector& start, const Interpolation& interp,
                             double total_time, int steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (!start.is_normalized()) throw std::invalid_argument("start state must be normalized");
    const double dt = total_time / steps;
    Vector v = start.to_eigen();
    for (int k = 0; k < steps; ++k) {
        const double u_mid = (k + 0.5) / steps;
        const Matrix h = interp.at(interp.schedule(u_mid));
        v = EigenSystem(h).apply_exponential(complex(0, -dt), v);
    }
    return StateVector::from_eigen(start.n_qubits(), v);
}

namespace {

struct TracePoint {
    double e0, e1;
};

TracePoint eigs_at(const Interpolation& interp, double s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(interp.at(s), Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

} // namespace

SpectralTrace spectral_trace(const Interpolation& interp, int initial_grid) {
    if (interp.n_qubits() > 10)
        throw std::invalid_argument("spectral_trace guarded to <= 10 qubits");
    if (initial_grid < 3) initial_grid = 3;
    int points = initial_grid;
    double prev_min = -1.0;
    SpectralTrace trace;
    for (int round = 0; round < 12; ++round) {
        trace = SpectralTrace{};
        double gmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < points; ++i) {
            const double s = static_cast<double>(i) / (points - 1);
            auto [e0, e1] = eigs_at(interp, s);
            trace.s.push_back(s);
            trace.e0.push_back(e0);
            trace.e1.push_back(e1);
            trace.gap.push_back(e1 - e0);
            gmin = std::min(gmin, e1 - e0);
        }
        trace.gap_min = gmin;
        trace.degenerate = gmin < 1e-10;
        if (prev_min >= 0.0 &&
            std::abs(gmin - prev_min) <= 0.01 * std::max(gmin, 1e-300))
            break;
        prev_min = gmin;
        points = 2 * points - 1;
    }
    return trace;
}

double path_length(const Interpolation& interp, int initial_grid) {
    if (initial_grid < 3) initial_grid = 3;
    auto ground_at = [&](double s) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(interp.at(s));
        const auto& vals = es.eigenvalues();
        if (vals(1) - vals(0) < 1e-10)
            throw std::runtime_error("degenerate ground state along the path");
        return Vector(es.eigenvectors().col(0));
    };
    int points = initial_grid;
    double prev = -1.0;
    for (int round = 0; round < 16; ++round) {
        double len = 0.0;
        Vector last = ground_at(0.0);
        for (int i = 1; i < points; ++i) {
            const double s = static_cast<double>(i) / (points - 1);
            Vector cur = ground_at(s);
            double overlap = std::abs(complex((last.adjoint() * cur)(0, 0)));
            overlap = std::min(1.0, overlap);
            len += std::acos(overlap);
            last = std::move(cur);
        }
        if (prev >= 0.0 && std::abs(len - prev) <= 1e-4 * std::max(1.0, std::abs(len)))
            return len;
        prev = len;
        points = 2 * points - 1;
    }
    return prev;
}

TimeBounds time_bounds(const SpectralTrace& trace, const Interpolation& interp) {
    if (trace.gap_min <= 1e-300) throw std::runtime_error("vanishing minimum gap");
    const double dnorm = spectral_norm(interp.h_f.matrix() - interp.h_i.matrix());
    const double path = path_length(interp);
    return {dnorm / (trace.gap_min * trace.gap_min),
            path * path / trace.gap_min, path / trace.gap_min};
}

namespace {

// Least-squares fit of y_k = cos(w t_k): coarse scan below Nyquist, then
// golden-section refinement.
double fit_cosine_frequency(std::span<const double> t, std::span<const double> y) {
    double dt_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i)
        dt_min = std::min(dt_min, t[i] - t[i - 1]);
    const double w_max = kPi / dt_min;
    auto sse = [&](double w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double d = std::cos(w * t[i]) - y[i];
            acc += d * d;
        }
        return acc;
    };
    const int scan = 20000;
    double best_w = 0.0, best = sse(0.0);
    for (int i = 1; i <= scan; ++i) {
        const double w = w_max * i / scan;
        const double v = sse(w);
        if (v < best) { best = v; best_w = w; }
    }
    double lo = std::max(0.0, best_w - w_max / scan);
    double hi = std::min(w_max, best_w + w_max / scan);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = sse(a), fb = sse(b);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        if (fa < fb) {
            hi = b; b = a; fb = fa;
            a = hi - gr * (hi - lo); fa = sse(a);
        } else {
            lo = a; a = b; fa = fb;
            b = lo + gr * (hi - lo); fb = sse(b);
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

ProbeResult nondestructive_measure(const StateVector& system_ground,
                                   const HermitianOperator& h_f,
                                   const HermitianOperator& a_obs, double delta,
                                   std::span<const double> sample_times) {
    const int n = system_ground.n_qubits();
    if (h_f.n_qubits() != n || a_obs.n_qubits() != n)
        throw std::invalid_argument("operator/state dimension mismatch");
    const Matrix comm = a_obs.matrix() * h_f.matrix() - h_f.matrix() * a_obs.matrix();
    if (comm.cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("observable must commute with H_f");
    if (sample_times.size() < 4)
        throw std::invalid_argument("need at least four sample times");

    const auto d = static_cast<Eigen::Index>(std::uint64_t(1) << n);
    // H_tot = H_f (x) I_probe + (delta I + A) (x) |p1><p1|; probe is the top qubit.
    Matrix htot = Matrix::Zero(2 * d, 2 * d);
    htot.topLeftCorner(d, d) = h_f.matrix();
    htot.bottomRightCorner(d, d) =
        h_f.matrix() + delta * Matrix::Identity(d, d) + a_obs.matrix();
    EigenSystem es(htot);

    const Matrix hgate = gates::h().matrix();
    const int probe = n;
    ProbeResult result;
    result.min_system_fidelity = 1.0;
    std::vector<double> ydata;

    for (double t : sample_times) {
        StateVector psi = attach_register(system_ground, 1);
        const int tq[] = {probe};
        apply_unitary(psi, hgate, tq);
        Vector v = es.apply_exponential(complex(0, -t), psi.to_eigen());
        psi = StateVector::from_eigen(n + 1, v);
        apply_unitary(psi, hgate, tq);

        double p0 = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) p0 += std::norm(psi[static_cast<std::uint64_t>(i)]);
        result.p0.push_back(p0);
        ydata.push_back(2.0 * p0 - 1.0);

        // Either probe outcome must leave the system register untouched.
        for (int outcome = 0; outcome < 2; ++outcome) {
            const double p = outcome == 0 ? p0 : 1.0 - p0;
            if (p < 1e-12) continue;
            StateVector collapsed =
                extract_low_register(psi, n, static_cast<std::uint64_t>(outcome));
            result.min_system_fidelity =
                std::min(result.min_system_fidelity, fidelity(collapsed, system_ground));
        }
    }

    result.omega = fit_cosine_frequency(sample_times, ydata);
    result.a0 = result.omega - delta;
    double resid = 0.0;
    for (std::size_t i = 0; i < ydata.size(); ++i)
        resid = std::max(resid,
                         std::abs(std::cos(result.omega * sample_times[i]) - ydata[i]));
    result.fit_residual = resid;
    if (resid > 1e-6)
        throw std::runtime_error(
            "cosine fit residual too large; sample times likely alias the frequency");
    return result;
}

} // namespace qsim::adiabatic
