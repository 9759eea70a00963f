// mobius.hpp — pre-bases, the subset lattice of Ω = {1..n}, span-projector cache
// Π(A) keyed by bitmask, and Möbius operators 𝔇(B) = Σ_{A⊆B} (-1)^{|A|-|B|} Π(A).

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "genbasis/config.hpp"
#include "genbasis/linalg.hpp"

namespace genbasis {

// ------------------------------- combinatorics ------------------------------

// Exact C(n, k) for n ≤ 62; saturates at uint64 max beyond that.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t j = 1; j <= k; ++j) {
        const std::uint64_t num = n - k + j;
        // r * num / j is always an integer; divide by gcd first to stay in range
        const std::uint64_t g = std::gcd(r, j);
        const std::uint64_t rr = r / g, jj = j / g;
        const std::uint64_t nn = num / jj;
        if (rr != 0 && nn > std::numeric_limits<std::uint64_t>::max() / rr)
            return std::numeric_limits<std::uint64_t>::max();
        r = rr * nn;
    }
    return r;
}

// ------------------------------- subset masks -------------------------------

// A ⊆ Ω as a bitmask: bit k set ⇔ element k+1 ∈ A.
class SubsetMask {
public:
    using bits_type = std::uint32_t;

    constexpr SubsetMask() = default;
    constexpr explicit SubsetMask(bits_type bits) : bits_(bits) {}

    // From 1-based element labels, e.g. {1,2} → 0b11.
    static SubsetMask of(std::initializer_list<int> labels) {
        bits_type b = 0;
        for (int l : labels) {
            if (l < 1 || l > 32) throw ValidationError("SubsetMask: label out of range");
            b |= bits_type{1} << (l - 1);
        }
        return SubsetMask(b);
    }

    static constexpr SubsetMask full(std::size_t n) {
        return SubsetMask(n >= 32 ? ~bits_type{0} : ((bits_type{1} << n) - 1));
    }

    constexpr bits_type bits() const { return bits_; }
    constexpr int cardinality() const { return std::popcount(bits_); }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool contains(std::size_t k) const { return (bits_ >> k) & 1u; }
    constexpr bool subset_of(SubsetMask other) const { return (bits_ & ~other.bits_) == 0; }
    constexpr SubsetMask with(std::size_t k) const { return SubsetMask(bits_ | (bits_type{1} << k)); }
    constexpr SubsetMask without(std::size_t k) const { return SubsetMask(bits_ & ~(bits_type{1} << k)); }
    constexpr bool fits(std::size_t n) const { return subset_of(full(n)); }

    friend constexpr bool operator==(SubsetMask, SubsetMask) = default;

private:
    bits_type bits_ = 0;
};

// Visit every A ⊆ B (including ∅ and B) with the (sub - 1) & B walk, B first.
template <class F>
void for_each_subset(SubsetMask b, F&& f) {
    const auto full = b.bits();
    auto sub = full;
    while (true) {
        f(SubsetMask(sub));
        if (sub == 0) break;
        sub = (sub - 1) & full;
    }
}

// -------------------------------- pre-basis ---------------------------------

struct ValidationReport {
    bool all_independent = false;        // every checked d-subset has σ_min above threshold
    double min_singular_value = 0.0;     // smallest σ_min over checked d-subsets
    std::size_t subsets_checked = 0;
    bool sampled = false;                // C(n,d) too large, uniform sample checked
    bool degenerate_orthonormal = false; // n == d admitted as a test case
};

// n unit vectors in H_d with n ≥ d.
class PreBasis {
public:
    explicit PreBasis(std::vector<CVector> vectors, const Tolerances& tol = default_tolerances)
        : vectors_(std::move(vectors)) {
        if (vectors_.empty()) throw ValidationError("PreBasis: no vectors");
        d_ = vectors_.front().size();
        if (d_ < 1) throw ValidationError("PreBasis: dimension must be >= 1");
        for (std::size_t k = 0; k < vectors_.size(); ++k) {
            if (vectors_[k].size() != d_) {
                std::ostringstream os;
                os << "PreBasis: vector " << k + 1 << " has dimension " << vectors_[k].size()
                   << ", expected " << d_;
                throw ValidationError(os.str());
            }
            const double norm = vectors_[k].norm();
            if (std::abs(norm - 1.0) > tol.unit_norm) {
                std::ostringstream os;
                os << "PreBasis: vector " << k + 1 << " has norm " << norm << ", expected 1";
                throw ValidationError(os.str());
            }
        }
        if (size() < dim()) {
            std::ostringstream os;
            os << "PreBasis: n = " << size() << " vectors cannot span d = " << dim();
            throw ValidationError(os.str());
        }
        report_ = validate(tol);
    }

    // Normalizes each vector first; zero vectors are rejected.
    static PreBasis normalized(std::vector<CVector> vectors, const Tolerances& tol = default_tolerances) {
        for (auto& v : vectors) {
            const double norm = v.norm();
            if (norm == 0.0) throw ValidationError("PreBasis: zero vector");
            v /= norm;
        }
        return PreBasis(std::move(vectors), tol);
    }

    std::size_t dim() const { return static_cast<std::size_t>(d_); }
    std::size_t size() const { return vectors_.size(); }
    const CVector& operator[](std::size_t i) const { return vectors_.at(i); }
    const std::vector<CVector>& vectors() const { return vectors_; }
    const ValidationReport& validation() const { return report_; }

    std::vector<CVector> members(SubsetMask a) const {
        std::vector<CVector> out;
        for (std::size_t k = 0; k < vectors_.size(); ++k)
            if (a.contains(k)) out.push_back(vectors_[k]);
        return out;
    }

    PreBasis transformed(const CMatrix& u) const {
        std::vector<CVector> out;
        out.reserve(vectors_.size());
        for (const auto& v : vectors_) out.push_back(u * v);
        return PreBasis::normalized(std::move(out));
    }

private:
    // Every d-subset must be linearly independent. Exhaustive when C(n,d) ≤ 1e5,
    // otherwise 1e4 uniformly sampled subsets with a fixed seed.
    ValidationReport validate(const Tolerances& tol) const {
        ValidationReport r;
        const std::size_t n = size(), d = dim();
        r.degenerate_orthonormal = (n == d);
        r.min_singular_value = std::numeric_limits<double>::infinity();

        auto check = [&](const std::vector<std::size_t>& idx) {
            CMatrix m(d_, static_cast<Eigen::Index>(d));
            for (std::size_t c = 0; c < d; ++c) m.col(static_cast<Eigen::Index>(c)) = vectors_[idx[c]];
            Eigen::JacobiSVD<CMatrix> svd(m);
            r.min_singular_value = std::min(r.min_singular_value, svd.singularValues().minCoeff());
            ++r.subsets_checked;
        };

        const std::uint64_t total = binomial(n, d);
        if (total <= 100000) {
            std::vector<std::size_t> idx(d);
            for (std::size_t c = 0; c < d; ++c) idx[c] = c;
            while (true) {
                check(idx);
                std::size_t c = d;
                while (c > 0 && idx[c - 1] == n - d + (c - 1)) --c;
                if (c == 0) break;
                ++idx[c - 1];
                for (std::size_t j = c; j < d; ++j) idx[j] = idx[j - 1] + 1;
            }
        } else {
            r.sampled = true;
            std::mt19937_64 rng(0x5eedULL);
            std::vector<std::size_t> pool(n);
            for (std::size_t k = 0; k < n; ++k) pool[k] = k;
            for (int t = 0; t < 10000; ++t) {
                // partial Fisher-Yates: first d entries form a uniform d-subset
                for (std::size_t c = 0; c < d; ++c) {
                    std::uniform_int_distribution<std::size_t> pick(c, n - 1);
                    std::swap(pool[c], pool[pick(rng)]);
                }
                check(std::vector<std::size_t>(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(d)));
            }
        }
        r.all_independent = r.min_singular_value > tol.independence;
        return r;
    }

    std::vector<CVector> vectors_;
    Eigen::Index d_ = 0;
    ValidationReport report_;
};

// ----------------------------- projector cache ------------------------------

// Π(A) for every A ⊆ Ω, indexed by mask. Immutable once built.
class ProjectorCache {
public:
    ProjectorCache(std::size_t n, std::size_t d, std::vector<CMatrix> projectors)
        : n_(n), d_(d), projectors_(std::move(projectors)) {}

    std::size_t size() const { return projectors_.size(); }
    std::size_t lattice_size() const { return n_; }
    std::size_t dim() const { return d_; }

    const CMatrix& operator[](SubsetMask a) const {
        if (!a.fits(n_)) throw ValidationError("ProjectorCache: mask has bits beyond n");
        return projectors_[a.bits()];
    }

private:
    std::size_t n_, d_;
    std::vector<CMatrix> projectors_;
};

inline void check_lattice_caps(std::size_t n, std::size_t d) {
    if (n > max_lattice_size) {
        std::ostringstream os;
        os << "subset lattice: n = " << n << " exceeds the cap of " << max_lattice_size;
        throw ValidationError(os.str());
    }
    if ((std::size_t{1} << n) * d * d > max_cache_entries) {
        std::ostringstream os;
        os << "subset lattice: 2^" << n << " * " << d << "^2 entries exceed the cache budget";
        throw ValidationError(os.str());
    }
}

// Π(A) for all 2^n subsets. Masks are visited in increasing order; once the span of
// A minus its top element is already H_d, Π(A) is the identity without another SVD.
inline ProjectorCache build_projector_cache(const PreBasis& basis, bool strict = false,
                                            const Tolerances& tol = default_tolerances) {
    const std::size_t n = basis.size(), d = basis.dim();
    check_lattice_caps(n, d);
    if (strict && !basis.validation().all_independent) {
        std::ostringstream os;
        os << "build_projector_cache: pre-basis has a d-subset with smallest singular value "
           << basis.validation().min_singular_value << " <= " << tol.independence;
        throw ValidationError(os.str());
    }
    const auto dd = static_cast<Eigen::Index>(d);
    const std::size_t count = std::size_t{1} << n;
    std::vector<CMatrix> proj(count);
    std::vector<char> full(count, 0);
    proj[0] = CMatrix::Zero(dd, dd);
    for (std::size_t m = 1; m < count; ++m) {
        const std::size_t parent = m & ~(std::size_t{1} << (std::bit_width(m) - 1));
        if (full[parent]) {
            proj[m] = identity(dd);
            full[m] = 1;
            continue;
        }
        const auto members = basis.members(SubsetMask(static_cast<SubsetMask::bits_type>(m)));
        proj[m] = projector_onto_span(dd, members, tol.rank_relative);
        full[m] = proj[m].isIdentity(0.0) ? 1 : 0;
    }
    return ProjectorCache(n, d, std::move(proj));
}

// ------------------------------ Möbius operators ----------------------------

inline CMatrix mobius_operator(SubsetMask b, const ProjectorCache& cache) {
    if (b.empty()) throw ValidationError("mobius_operator: B must be non-empty");
    if (!b.fits(cache.lattice_size())) throw ValidationError("mobius_operator: B has bits beyond n");
    const auto dd = static_cast<Eigen::Index>(cache.dim());
    CMatrix acc = CMatrix::Zero(dd, dd);
    const int top = b.cardinality();
    for_each_subset(b, [&](SubsetMask a) {
        if ((top - a.cardinality()) % 2 == 0) acc += cache[a];
        else acc -= cache[a];
    });
    return acc;
}

// 𝔇(B) for every B, indexed by mask (entry 0 is 𝔇(∅) = Π(∅) = 0).
class MobiusTable {
public:
    MobiusTable(std::size_t n, std::size_t d, std::vector<CMatrix> values)
        : n_(n), d_(d), values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    std::size_t lattice_size() const { return n_; }
    std::size_t dim() const { return d_; }

    const CMatrix& operator[](SubsetMask b) const {
        if (b.bits() >= values_.size()) throw ValidationError("MobiusTable: subset not available");
        return values_[b.bits()];
    }

private:
    std::size_t n_, d_;
    std::vector<CMatrix> values_;
};

// Whole-lattice Möbius transform, one element dimension at a time: n·2^(n-1) matrix
// subtractions instead of the 3^n of per-B sub-mask sums.
inline MobiusTable mobius_table(const ProjectorCache& cache) {
    const std::size_t n = cache.lattice_size(), count = cache.size();
    std::vector<CMatrix> v(count);
    for (std::size_t m = 0; m < count; ++m) v[m] = cache[SubsetMask(static_cast<SubsetMask::bits_type>(m))];
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t bit = std::size_t{1} << k;
        for (std::size_t m = 0; m < count; ++m)
            if (m & bit) v[m] -= v[m ^ bit];
    }
    return MobiusTable(n, cache.dim(), std::move(v));
}

// Σ_{B⊆A} 𝔇(B); equals Π(A).
inline CMatrix inverse_mobius(SubsetMask a, const MobiusTable& table) {
    if (a.bits() >= table.size())
        throw ValidationError("inverse_mobius: Möbius values missing for some B ⊆ A");
    const auto dd = static_cast<Eigen::Index>(table.dim());
    CMatrix acc = CMatrix::Zero(dd, dd);
    for_each_subset(a, [&](SubsetMask b) { acc += table[b]; });
    return acc;
}

// Tr 𝔇(B) as a function of |B| and d alone.
inline std::int64_t mobius_trace_closed_form(std::uint64_t card, std::uint64_t d) {
    if (card < 1 || d < 1) throw ValidationError("mobius_trace_closed_form: card and d must be >= 1");
    if (card == 1) return 1;
    if (card <= d) return 0;
    const auto mag = static_cast<std::int64_t>(binomial(card - 2, d - 1));
    return ((card - d) % 2 == 0) ? mag : -mag;
}

}  // namespace genbasis
