#pragma once

#include "qsim/core.hpp"

#include <functional>
#include <vector>

namespace qsim::stateprep {

/// Nonnegative amplitude profile f(x) over x in [0, 2^n) with a prefix-sum
/// table of f^2 for block-probability queries.
struct AmplitudeProfile {
    int n_qubits = 0;
    std::vector<double> values;
    std::vector<double> prefix_sq; // prefix_sq[i] = sum_{x<i} f(x)^2

    static AmplitudeProfile from_samples(int n_qubits, std::span<const double> f);

    /// Sum of f^2 over [lo, hi).
    double block_sq(std::uint64_t lo, std::uint64_t hi) const;
};

/// Binary-subdivision rotation angles: node (level l, prefix b) holds theta
/// with cos^2(theta) = (left-half block mass) / (block mass); empty blocks
/// get theta = 0. Stored heap-style at index 2^l - 1 + b, together with the
/// node's block mass (pairwise-summed, cancellation-free).
struct AngleTree {
    int n_qubits = 0;
    std::vector<double> theta;
    std::vector<double> mass;

    double at(int level, std::uint64_t prefix) const {
        return theta[(std::uint64_t(1) << level) - 1 + prefix];
    }
    double mass_at(int level, std::uint64_t prefix) const {
        return mass[(std::uint64_t(1) << level) - 1 + prefix];
    }
};

AngleTree rotation_angles(const AmplitudeProfile& profile);

struct EncodeResult {
    StateVector state;
    std::size_t rotation_count;
};

/// Prepares sum_x f(x)/||f|| |x> from |0...0> with at most 2^n - 1 pattern-
/// controlled Ry rotations; zero-mass subtrees are skipped.
EncodeResult amplitude_encode(const AmplitudeProfile& profile);

/// Diagonal phase layer: amplitude(x) *= exp(i phi(x)).
void apply_phase_profile(StateVector& psi,
                         const std::function<double(std::uint64_t)>& phi);

} // namespace qsim::stateprep
