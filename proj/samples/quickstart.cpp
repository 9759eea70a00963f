// Renormalize the three-state pre-basis in H_2 and inspect the result.

#include <iostream>

#include "genbasis/genbasis.hpp"

int main() {
    using namespace genbasis;

    const PreBasis pre = builtin::three_state_prebasis();
    const GeneralizedBasis gb = generalized_basis(pre);

    std::cout.setf(std::ios::fixed);
    std::cout.precision(3);
    for (std::size_t i = 0; i < gb.n; ++i) std::cout << "sigma(" << i + 1 << ") =\n" << gb[i] << "\n\n";
    std::cout << "resolution residual: " << gb.resolution_residual << "\n";

    // pseudo-probabilities and entropy of |X;0><X;0|
    CMatrix rho = CMatrix::Zero(2, 2);
    rho(0, 0) = 1.0;
    const auto s = pseudo_probabilities(rho, gb);
    std::cout << "E_3(|X;0><X;0|) = " << shannon_entropy(s) << " nats\n";

    // where the level crossing of the coupled two-level family shows up
    const auto partition = comonotonicity_partition(two_level_coupling_family(), gb);
    for (const auto& iv : partition.intervals)
        std::cout << "(" << iv.lo << ", " << iv.hi << ") -> " << to_string(iv.index) << "\n";
}
