// builtin.hpp — the reference pre-bases in H_2 and the test vector used by the CLI
// and the test suites.

#pragma once

#include <cmath>
#include <vector>

#include "genbasis/linalg.hpp"
#include "genbasis/mobius.hpp"

namespace genbasis::builtin {

inline CVector ket(Complex x0, Complex x1) {
    CVector v(2);
    v << x0, x1;
    return v;
}

// |X;0⟩, (|X;0⟩ + 2i|X;1⟩)/√5, (|X;0⟩ + |X;1⟩)/√2
inline std::vector<CVector> three_state_vectors() {
    const double r5 = 1.0 / std::sqrt(5.0), r2 = 1.0 / std::sqrt(2.0);
    return {ket(1.0, 0.0), ket(r5, Complex(0.0, 2.0 * r5)), ket(r2, r2)};
}

// The three states above plus (|X;0⟩ + 2|X;1⟩)/√5.
inline std::vector<CVector> four_state_vectors() {
    auto v = three_state_vectors();
    const double r5 = 1.0 / std::sqrt(5.0);
    v.push_back(ket(r5, 2.0 * r5));
    return v;
}

inline PreBasis three_state_prebasis() { return PreBasis(three_state_vectors()); }
inline PreBasis four_state_prebasis() { return PreBasis(four_state_vectors()); }

// (1+2i, 3-i)ᵀ/√15
inline CVector probe_vector() {
    const double r = 1.0 / std::sqrt(15.0);
    return ket(Complex(r, 2.0 * r), Complex(3.0 * r, -r));
}

// The position basis |X;0⟩, ..., |X;d-1⟩.
inline std::vector<CVector> position_basis(Eigen::Index d) {
    std::vector<CVector> out;
    for (Eigen::Index k = 0; k < d; ++k) out.push_back(CVector::Unit(d, k));
    return out;
}

}  // namespace genbasis::builtin
