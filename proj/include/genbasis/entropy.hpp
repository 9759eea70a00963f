// entropy.hpp — pseudo-probabilities s_θ(i) = (d/n) Tr[θ σ(i)], their Shannon
// entropy, and the redundancy indices of a generalized basis.

#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "genbasis/config.hpp"
#include "genbasis/linalg.hpp"
#include "genbasis/renorm.hpp"

namespace genbasis {

enum class SubjectKind { DensityMatrix, Hermitian };

struct PseudoProbabilities {
    std::vector<double> values;
    SubjectKind kind = SubjectKind::Hermitian;
    double sum = 0.0;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values.at(i); }
};

inline bool is_density_matrix(const CMatrix& rho, const Tolerances& tol = default_tolerances) {
    return is_hermitian(rho, tol.hermitian) && std::abs(rho.trace().real() - 1.0) <= 1e-10 &&
           min_eigenvalue(rho) >= -tol.psd_floor;
}

inline PseudoProbabilities pseudo_probabilities(const CMatrix& theta, const GeneralizedBasis& gb,
                                                const Tolerances& tol = default_tolerances) {
    if (theta.rows() != static_cast<Eigen::Index>(gb.d) || theta.cols() != static_cast<Eigen::Index>(gb.d)) {
        std::ostringstream os;
        os << "pseudo_probabilities: operator is " << theta.rows() << "x" << theta.cols()
           << ", basis dimension is " << gb.d;
        throw ValidationError(os.str());
    }
    require_hermitian(theta, tol.hermitian, "pseudo_probabilities");
    PseudoProbabilities s;
    s.kind = is_density_matrix(theta, tol) ? SubjectKind::DensityMatrix : SubjectKind::Hermitian;
    s.values.reserve(gb.n);
    for (const auto& sigma : gb.sigmas) {
        const double v = gb.weight() * trace_product(theta, sigma).real();
        s.values.push_back(v);
        s.sum += v;
    }
    return s;
}

// (d/n)·𝔐[σ(i)]: the largest value s_ρ(i) can take over density matrices ρ.
inline std::vector<double> pseudo_probability_caps(const GeneralizedBasis& gb) {
    std::vector<double> caps;
    caps.reserve(gb.n);
    for (const auto& sigma : gb.sigmas) caps.push_back(gb.weight() * max_eigenvalue(sigma));
    return caps;
}

// -Σ s log s in nats. Values within the negative band are clamped to 0 first.
inline double shannon_entropy(const std::vector<double>& s, const Tolerances& tol = default_tolerances) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < -tol.negative_prob) {
            std::ostringstream os;
            os << "shannon_entropy: s(" << i + 1 << ") = " << s[i] << " is negative";
            throw ValidationError(os.str());
        }
        const double p = s[i] <= tol.negative_prob ? 0.0 : s[i];
        e -= xlogx(p);
    }
    return e;
}

inline double shannon_entropy(const PseudoProbabilities& s, const Tolerances& tol = default_tolerances) {
    if (std::abs(s.sum - 1.0) > 1e-10) {
        std::ostringstream os;
        os << "shannon_entropy: pseudo-probabilities sum to " << s.sum << ", expected 1";
        throw ValidationError(os.str());
    }
    return shannon_entropy(s.values, tol);
}

struct RedundancyIndices {
    double ratio;    // ℛ = (n - d)/d
    double entropic; // log n - log d = log(ℛ + 1)
};

inline RedundancyIndices redundancy_indices(std::size_t n, std::size_t d) {
    if (d < 1 || n < d) throw ValidationError("redundancy_indices: need n >= d >= 1");
    const double nd = static_cast<double>(n), dd = static_cast<double>(d);
    return {(nd - dd) / dd, std::log(nd) - std::log(dd)};
}

}  // namespace genbasis
