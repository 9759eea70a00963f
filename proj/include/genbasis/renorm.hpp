// renorm.hpp — renormalization of a pre-basis into a generalized basis {σ(i)}.
//
// Two independent constructions of τ(i), with Σ_i τ(i) = 1:
//
//   Shapley form   τ(i) = Σ_{B ⊆ Ω\{i}} 𝔇(B ∪ {i}) / |B ∪ {i}|
//   marginal form  τ(i) = (1/n) Σ_{A ⊆ Ω\{i}} C(n-1,|A|)^{-1} [Π(A ∪ {i}) - Π(A)]
//
// The marginal form is a positive combination of projectors, so τ(i) ⪰ 0, and
// Tr τ(i) = d/n. The generalized basis is σ(i) = (n/d) τ(i), which satisfies
// (d/n) Σ_i σ(i) = 1.

#pragma once

#include <sstream>
#include <vector>

#include "genbasis/config.hpp"
#include "genbasis/linalg.hpp"
#include "genbasis/mobius.hpp"

namespace genbasis {

namespace detail {
inline void check_index(std::size_t i, std::size_t n, const char* who) {
    if (i >= n) {
        std::ostringstream os;
        os << who << ": index " << i + 1 << " out of range 1.." << n;
        throw ValidationError(os.str());
    }
}
}  // namespace detail

// i is 0-based here and in every library call; labels printed to users are 1-based.
inline CMatrix tau_shapley(std::size_t i, const MobiusTable& table) {
    const std::size_t n = table.lattice_size();
    detail::check_index(i, n, "tau_shapley");
    const auto dd = static_cast<Eigen::Index>(table.dim());
    CMatrix acc = CMatrix::Zero(dd, dd);
    const SubsetMask rest = SubsetMask::full(n).without(i);
    for_each_subset(rest, [&](SubsetMask b) {
        const SubsetMask owners = b.with(i);
        acc += table[owners] / static_cast<double>(owners.cardinality());
    });
    return acc;
}

inline CMatrix tau_shapley(std::size_t i, const ProjectorCache& cache) {
    return tau_shapley(i, mobius_table(cache));
}

// Weight of ϖ(i|A) for |A| = k in a lattice of n elements: 1 / (n · C(n-1, k)).
inline double marginal_weight(std::size_t n, std::size_t k) {
    return 1.0 / (static_cast<double>(n) * static_cast<double>(binomial(n - 1, k)));
}

// ϖ(i|A) = Π(A ∪ {i}) - Π(A), a projector commuting with both terms.
inline CMatrix marginal_projector(std::size_t i, SubsetMask a, const ProjectorCache& cache) {
    detail::check_index(i, cache.lattice_size(), "marginal_projector");
    if (a.contains(i)) throw ValidationError("marginal_projector: A must not contain i");
    return cache[a.with(i)] - cache[a];
}

inline CMatrix tau_varpi(std::size_t i, const ProjectorCache& cache) {
    const std::size_t n = cache.lattice_size();
    detail::check_index(i, n, "tau_varpi");
    const auto dd = static_cast<Eigen::Index>(cache.dim());
    std::vector<double> weight(n);
    for (std::size_t k = 0; k < n; ++k) weight[k] = marginal_weight(n, k);
    CMatrix acc = CMatrix::Zero(dd, dd);
    const SubsetMask rest = SubsetMask::full(n).without(i);
    for_each_subset(rest, [&](SubsetMask a) {
        const CMatrix& lower = cache[a];
        const CMatrix& upper = cache[a.with(i)];
        acc += weight[static_cast<std::size_t>(a.cardinality())] * (upper - lower);
    });
    return (acc + acc.adjoint()) * 0.5;
}

// ----------------------------- generalized basis ----------------------------

struct GeneralizedBasis {
    std::size_t d = 0;
    std::size_t n = 0;
    std::vector<CMatrix> sigmas;      // density matrices σ(i), 0-based
    double resolution_residual = 0.0; // max |(d/n)Σσ(i) - 1|
    std::vector<CVector> source;      // the pre-basis vectors |i⟩

    double weight() const { return static_cast<double>(d) / static_cast<double>(n); }
    const CMatrix& operator[](std::size_t i) const { return sigmas.at(i); }
    std::size_t size() const { return sigmas.size(); }
};

inline double resolution_residual(const std::vector<CMatrix>& sigmas, std::size_t d) {
    const auto dd = static_cast<Eigen::Index>(d);
    CMatrix sum = CMatrix::Zero(dd, dd);
    for (const auto& s : sigmas) sum += s;
    sum *= static_cast<double>(d) / static_cast<double>(sigmas.size());
    return max_abs(sum - identity(dd));
}

namespace detail {
inline void require_resolution(double residual, const Tolerances& tol, const char* who) {
    if (residual > tol.resolution) {
        std::ostringstream os;
        os << who << ": resolution of the identity fails, residual " << residual << " > "
           << tol.resolution << " (numerically degenerate pre-basis?)";
        throw ResidualError(os.str(), residual);
    }
}
}  // namespace detail

// Builds σ(i) = (n/d) τ(i) with both constructions and requires them to agree.
inline GeneralizedBasis generalized_basis(const PreBasis& basis, const Tolerances& tol = default_tolerances) {
    if (!basis.validation().all_independent) {
        std::ostringstream os;
        os << "generalized_basis: pre-basis has a linearly dependent d-subset (smallest singular value "
           << basis.validation().min_singular_value << ")";
        throw ValidationError(os.str());
    }
    const ProjectorCache cache = build_projector_cache(basis, false, tol);
    const MobiusTable table = mobius_table(cache);
    const std::size_t n = basis.size(), d = basis.dim();
    const double scale = static_cast<double>(n) / static_cast<double>(d);

    GeneralizedBasis gb;
    gb.d = d;
    gb.n = n;
    gb.source = basis.vectors();
    gb.sigmas.reserve(n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const CMatrix marginal = tau_varpi(i, cache);
        const CMatrix shapley = tau_shapley(i, table);
        worst = std::max(worst, max_abs(marginal - shapley));
        gb.sigmas.push_back(scale * marginal);
    }
    if (worst > tol.construction) {
        std::ostringstream os;
        os << "generalized_basis: Shapley and marginal constructions disagree by " << worst;
        throw ResidualError(os.str(), worst);
    }
    gb.resolution_residual = resolution_residual(gb.sigmas, d);
    detail::require_resolution(gb.resolution_residual, tol, "generalized_basis");
    return gb;
}

// {U σ(i) U†}; equal to rebuilding from {U|i⟩}.
inline GeneralizedBasis conjugate_basis(const GeneralizedBasis& gb, const CMatrix& u,
                                        const Tolerances& tol = default_tolerances) {
    if (u.rows() != static_cast<Eigen::Index>(gb.d) || !is_unitary(u, tol.unitary))
        throw ValidationError("conjugate_basis: U must be a d x d unitary");
    GeneralizedBasis out;
    out.d = gb.d;
    out.n = gb.n;
    for (const auto& s : gb.sigmas) out.sigmas.push_back(u * s * u.adjoint());
    for (const auto& v : gb.source) out.source.push_back(u * v);
    out.resolution_residual = resolution_residual(out.sigmas, out.d);
    detail::require_resolution(out.resolution_residual, tol, "conjugate_basis");
    return out;
}

}  // namespace genbasis
