#include "qsim/stateprep.hpp"

#include <cmath>
#include <stdexcept>

namespace qsim::stateprep {

AmplitudeProfile AmplitudeProfile::from_samples(int n_qubits, std::span<const double> f) {
    const std::uint64_t dim = std::uint64_t(1) << n_qubits;
    if (f.size() != dim) throw std::invalid_argument("profile length must be 2^n");
    AmplitudeProfile p;
    p.n_qubits = n_qubits;
    p.values.assign(f.begin(), f.end());
    bool any = false;
    for (double v : p.values) {
        if (v < 0.0) throw std::invalid_argument("profile values must be nonnegative");
        if (v != 0.0) any = true;
    }
    if (!any) throw std::invalid_argument("profile is identically zero");
    p.prefix_sq.resize(dim + 1, 0.0);
    for (std::uint64_t i = 0; i < dim; ++i)
        p.prefix_sq[i + 1] = p.prefix_sq[i] + p.values[i] * p.values[i];
    return p;
}

double AmplitudeProfile::block_sq(std::uint64_t lo, std::uint64_t hi) const {
    return prefix_sq[hi] - prefix_sq[lo];
}

AngleTree rotation_angles(const AmplitudeProfile& profile) {
    const int n = profile.n_qubits;
    AngleTree tree;
    tree.n_qubits = n;
    tree.theta.assign((std::uint64_t(1) << n) - 1, 0.0);
    tree.mass.assign((std::uint64_t(1) << n) - 1, 0.0);

    // Block masses are accumulated pairwise from the leaves. Differencing the
    // prefix-sum table instead would cancel catastrophically in far tails
    // that are many orders below the total mass.
    std::vector<double> level_mass(profile.values.size());
    for (std::size_t i = 0; i < profile.values.size(); ++i)
        level_mass[i] = profile.values[i] * profile.values[i];
    for (int level = n - 1; level >= 0; --level) {
        const std::uint64_t nodes = std::uint64_t(1) << level;
        std::vector<double> up(nodes);
        for (std::uint64_t b = 0; b < nodes; ++b) {
            const double left = level_mass[2 * b];
            const double right = level_mass[2 * b + 1];
            up[b] = left + right;
            tree.mass[nodes - 1 + b] = up[b];
            if (up[b] > 0.0)
                tree.theta[nodes - 1 + b] = std::atan2(std::sqrt(right), std::sqrt(left));
        }
        level_mass = std::move(up);
    }
    return tree;
}

EncodeResult amplitude_encode(const AmplitudeProfile& profile) {
    const int n = profile.n_qubits;
    AngleTree tree = rotation_angles(profile);
    StateVector psi(n);
    std::size_t rotations = 0;

    // Level l targets qubit n-1-l; the prefix bits sit on the qubits above it.
    for (int level = 0; level < n; ++level) {
        const int target = n - 1 - level;
        const std::uint64_t block = std::uint64_t(1) << (n - level);
        std::vector<int> controls;
        for (int i = 0; i < level; ++i) controls.push_back(n - 1 - i);
        for (std::uint64_t b = 0; b < (std::uint64_t(1) << level); ++b) {
            if (tree.mass_at(level, b) <= 0.0) continue;
            const double theta = tree.at(level, b);
            const Matrix ry = gates::ry(2.0 * theta).matrix();
            // Control pattern: bit i of the pattern belongs to controls[i]
            // = qubit n-1-i, which carries prefix bit i (MSB first).
            std::uint64_t pattern = 0;
            for (int i = 0; i < level; ++i)
                if ((b >> (level - 1 - i)) & 1) pattern |= std::uint64_t(1) << i;
            const int tq[] = {target};
            apply_unitary_pattern(psi, ry, tq, controls, pattern);
            ++rotations;
        }
    }
    return {std::move(psi), rotations};
}

void apply_phase_profile(StateVector& psi,
                         const std::function<double(std::uint64_t)>& phi) {
    auto& amp = psi.amplitudes();
    for (std::uint64_t x = 0; x < psi.dim(); ++x)
        amp[x] *= std::exp(complex(0, phi(x)));
}

} // namespace qsim::stateprep
