// detect.hpp — location indices and comonotonicity partitions of Hamiltonian
// families θ(λ) with respect to a generalized basis, thermal quantities, the
// closed-form noisy two-level eigen-analysis, and entropy scans over λ.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "genbasis/config.hpp"
#include "genbasis/entropy.hpp"
#include "genbasis/linalg.hpp"
#include "genbasis/renorm.hpp"
#include "genbasis/represent.hpp"

namespace genbasis {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// ----------------------------- Hamiltonian family ---------------------------

// θ(λ) = H0 + λ H1 on [lambda_min, lambda_max] (either end may be infinite).
class AffineHamiltonianFamily {
public:
    AffineHamiltonianFamily(CMatrix h0, CMatrix h1, double lambda_min = -inf, double lambda_max = inf,
                            std::string description = {})
        : h0_(std::move(h0)), h1_(std::move(h1)), lo_(lambda_min), hi_(lambda_max),
          description_(std::move(description)) {
        require_hermitian(h0_, default_tolerances.hermitian, "AffineHamiltonianFamily H0");
        require_hermitian(h1_, default_tolerances.hermitian, "AffineHamiltonianFamily H1");
        if (h0_.rows() != h1_.rows()) throw ValidationError("AffineHamiltonianFamily: H0 and H1 differ in dimension");
        if (!(lo_ < hi_)) throw ValidationError("AffineHamiltonianFamily: empty lambda range");
    }

    CMatrix at(double lambda) const { return h0_ + lambda * h1_; }
    const CMatrix& h0() const { return h0_; }
    const CMatrix& h1() const { return h1_; }
    double lambda_min() const { return lo_; }
    double lambda_max() const { return hi_; }
    const std::string& description() const { return description_; }
    std::size_t dim() const { return static_cast<std::size_t>(h0_.rows()); }

    AffineHamiltonianFamily with_range(double lo, double hi) const {
        return AffineHamiltonianFamily(h0_, h1_, lo, hi, description_);
    }

    // Adds diag(noise) to H0.
    AffineHamiltonianFamily with_diagonal_noise(std::span<const double> noise) const {
        if (noise.size() != dim()) throw ValidationError("with_diagonal_noise: one value per diagonal entry");
        CMatrix h0 = h0_;
        for (std::size_t k = 0; k < noise.size(); ++k) h0(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += noise[k];
        return AffineHamiltonianFamily(std::move(h0), h1_, lo_, hi_, description_ + " (noisy)");
    }

private:
    CMatrix h0_, h1_;
    double lo_, hi_;
    std::string description_;
};

// Two-level system 1 + λ [[0, 1+i], [1-i, 0]], with level crossing at λ = 0.
inline AffineHamiltonianFamily two_level_coupling_family() {
    CMatrix h1(2, 2);
    h1 << Complex(0, 0), Complex(1, 1), Complex(1, -1), Complex(0, 0);
    return AffineHamiltonianFamily(identity(2), h1, -inf, inf, "two-level coupling 1 + lambda*H1");
}

// Same family with diag(𝔑1, 𝔑2) added to the free part; 𝔑1 = S + D, 𝔑2 = S - D.
inline AffineHamiltonianFamily noisy_two_level_coupling_family(double s, double d) {
    const double noise[2] = {s + d, s - d};
    return two_level_coupling_family().with_diagonal_noise(noise);
}

// ---------------------------- affine coefficients ---------------------------

struct AffineCoefficient {
    double a = 0.0;  // (d/n) Tr[H0 σ(i)]
    double b = 0.0;  // (d/n) Tr[H1 σ(i)]

    double at(double lambda) const { return a + b * lambda; }
};

inline std::vector<AffineCoefficient> s_affine_coefficients(const AffineHamiltonianFamily& family,
                                                            const GeneralizedBasis& gb) {
    if (family.dim() != gb.d) throw ValidationError("s_affine_coefficients: dimension mismatch");
    std::vector<AffineCoefficient> out;
    out.reserve(gb.n);
    for (const auto& sigma : gb.sigmas)
        out.push_back({gb.weight() * trace_product(family.h0(), sigma).real(),
                       gb.weight() * trace_product(family.h1(), sigma).real()});
    return out;
}

inline std::vector<double> evaluate(std::span<const AffineCoefficient> coeffs, double lambda) {
    std::vector<double> s;
    s.reserve(coeffs.size());
    for (const auto& c : coeffs) s.push_back(c.at(lambda));
    return s;
}

// ------------------------------- location index -----------------------------

struct LocationIndex {
    std::vector<int> order;  // 1-based labels, s descending
    bool tie = false;

    friend bool operator==(const LocationIndex& x, const LocationIndex& y) { return x.order == y.order; }
};

inline LocationIndex location_index(std::span<const double> s, double tie_tol = default_tolerances.tie) {
    LocationIndex li;
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return s[x] > s[y]; });
    li.order.reserve(idx.size());
    for (std::size_t k : idx) li.order.push_back(static_cast<int>(k) + 1);
    // after sorting, the closest pair is adjacent
    for (std::size_t k = 1; k < idx.size(); ++k)
        if (std::abs(s[idx[k - 1]] - s[idx[k]]) <= tie_tol) li.tie = true;
    return li;
}

inline std::string to_string(const LocationIndex& li) {
    std::ostringstream os;
    os << "(";
    for (std::size_t k = 0; k < li.order.size(); ++k) os << (k ? "," : "") << li.order[k];
    os << ")";
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const LocationIndex& li) {
    return os << to_string(li) << (li.tie ? " tie" : "");
}

// ------------------------- comonotonicity partitions -------------------------

struct ComonotonicInterval {
    double lo = -inf;
    double hi = inf;
    LocationIndex index;
    bool degenerate = false;  // the index ties (or changes) inside the interval
};

struct ComonotonicityPartition {
    std::vector<double> crossings;  // ascending
    std::vector<ComonotonicInterval> intervals;

    bool degenerate() const {
        return std::any_of(intervals.begin(), intervals.end(), [](const auto& iv) { return iv.degenerate; });
    }

    // Interval whose open range contains lambda, or nullptr at a crossing point.
    const ComonotonicInterval* find(double lambda) const {
        for (const auto& iv : intervals)
            if (lambda > iv.lo && lambda < iv.hi) return &iv;
        return nullptr;
    }
};

namespace detail {
// A point strictly inside (lo, hi) at relative position t ∈ (0,1); unbounded sides
// step away from the finite end.
inline double interior_point(double lo, double hi, double t) {
    if (std::isfinite(lo) && std::isfinite(hi)) return lo + t * (hi - lo);
    if (std::isfinite(hi)) return hi - (1.0 + std::abs(hi)) * (2.0 - t);
    if (std::isfinite(lo)) return lo + (1.0 + std::abs(lo)) * (1.0 + t);
    return 4.0 * (t - 0.5);
}

template <class IndexAt>
ComonotonicityPartition assemble_partition(std::vector<double> cuts, double lo, double hi, IndexAt&& index_at) {
    ComonotonicityPartition p;
    std::vector<double> edges;
    edges.push_back(lo);
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(hi);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        ComonotonicInterval iv;
        iv.lo = edges[k];
        iv.hi = edges[k + 1];
        iv.index = index_at(interior_point(iv.lo, iv.hi, 0.5));
        iv.degenerate = iv.index.tie;
        for (double t : {0.25, 0.75}) {
            const LocationIndex probe = index_at(interior_point(iv.lo, iv.hi, t));
            if (!(probe == iv.index) || probe.tie) iv.degenerate = true;
        }
        if (!p.intervals.empty() && p.intervals.back().index == iv.index && !iv.degenerate &&
            !p.intervals.back().degenerate) {
            p.intervals.back().hi = iv.hi;  // spurious cut: same ordering on both sides
            continue;
        }
        if (!p.intervals.empty()) p.crossings.push_back(iv.lo);
        p.intervals.push_back(iv);
    }
    return p;
}
}  // namespace detail

// Exact partition for affine s(i|λ) = a_i + b_i λ: the crossing points are the
// pairwise solutions λ* = (a_i - a_j)/(b_j - b_i) inside (lo, hi).
inline ComonotonicityPartition comonotonicity_partition(std::span<const AffineCoefficient> coeffs, double lo,
                                                        double hi, const Tolerances& tol = default_tolerances) {
    if (!(lo < hi)) throw ValidationError("comonotonicity_partition: empty lambda range");
    std::vector<double> cuts;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        for (std::size_t j = i + 1; j < coeffs.size(); ++j) {
            const double db = coeffs[j].b - coeffs[i].b;
            if (db == 0.0) continue;
            const double x = (coeffs[i].a - coeffs[j].a) / db;
            if (x > lo && x < hi) cuts.push_back(x);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> unique;
    for (double x : cuts)
        if (unique.empty() || x - unique.back() > tol.crossing_dedup) unique.push_back(x);
    return detail::assemble_partition(std::move(unique), lo, hi, [&](double lambda) {
        const auto s = evaluate(coeffs, lambda);
        return location_index(s, tol.tie);
    });
}

inline ComonotonicityPartition comonotonicity_partition(const AffineHamiltonianFamily& family,
                                                        const GeneralizedBasis& gb,
                                                        const Tolerances& tol = default_tolerances) {
    const auto coeffs = s_affine_coefficients(family, gb);
    return comonotonicity_partition(coeffs, family.lambda_min(), family.lambda_max(), tol);
}

// Grid fallback for arbitrary θ(λ): scan tol.grid_points uniform points on the finite
// range [lo, hi], then bisect every change of the location index to tol.bisection.
inline ComonotonicityPartition partition_by_grid(const std::function<CMatrix(double)>& theta,
                                                 const GeneralizedBasis& gb, double lo, double hi,
                                                 const Tolerances& tol = default_tolerances) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ValidationError("partition_by_grid: needs a finite, non-empty lambda range");
    if (tol.grid_points < 2) throw ValidationError("partition_by_grid: need at least 2 grid points");
    auto index_at = [&](double lambda) {
        const auto s = pseudo_probabilities(theta(lambda), gb, tol);
        return location_index(s.values, tol.tie);
    };
    const std::size_t steps = tol.grid_points - 1;
    auto grid = [&](std::size_t k) { return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps); };

    std::vector<double> cuts;
    LocationIndex prev = index_at(grid(0));
    for (std::size_t k = 1; k <= steps; ++k) {
        const LocationIndex cur = index_at(grid(k));
        if (!(cur == prev)) {
            double a = grid(k - 1), b = grid(k);
            while (b - a > tol.bisection) {
                const double m = 0.5 * (a + b);
                if (index_at(m) == prev) a = m;
                else b = m;
            }
            cuts.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    return detail::assemble_partition(std::move(cuts), lo, hi, index_at);
}

inline ComonotonicityPartition partition_by_grid(const AffineHamiltonianFamily& family, const GeneralizedBasis& gb,
                                                 double lo, double hi, const Tolerances& tol = default_tolerances) {
    return partition_by_grid([&](double lambda) { return family.at(lambda); }, gb, lo, hi, tol);
}

// Coefficient-wise mean over several realizations of a noisy family.
inline std::vector<AffineCoefficient> average_coefficients(std::span<const std::vector<AffineCoefficient>> runs) {
    if (runs.empty()) throw ValidationError("average_coefficients: no realizations");
    std::vector<AffineCoefficient> mean(runs.front().size());
    for (const auto& run : runs) {
        if (run.size() != mean.size()) throw ValidationError("average_coefficients: size mismatch");
        for (std::size_t i = 0; i < mean.size(); ++i) {
            mean[i].a += run[i].a;
            mean[i].b += run[i].b;
        }
    }
    for (auto& c : mean) {
        c.a /= static_cast<double>(runs.size());
        c.b /= static_cast<double>(runs.size());
    }
    return mean;
}

// ----------------------------- thermal quantities ---------------------------

struct ThermalQuantities {
    CMatrix boltzmann;          // 𝓔 = exp(-β θ(λ))
    double partition = 0.0;     // Z = Tr 𝓔
    std::vector<double> s;      // s_𝓔(i), Σ s = Z
    double mean_energy = 0.0;   // Tr[θ 𝓔] / Z
};

inline ThermalQuantities thermal_quantities(const AffineHamiltonianFamily& family, const GeneralizedBasis& gb,
                                            double beta, double lambda) {
    if (!(beta > 0.0)) throw ValidationError("thermal_quantities: beta must be positive");
    if (family.dim() != gb.d) throw ValidationError("thermal_quantities: dimension mismatch");
    const CMatrix theta = family.at(lambda);
    ThermalQuantities q;
    q.boltzmann = hermitian_matrix_function(theta, [beta](double e) { return std::exp(-beta * e); });
    q.partition = q.boltzmann.trace().real();
    for (const auto& sigma : gb.sigmas) q.s.push_back(gb.weight() * trace_product(q.boltzmann, sigma).real());
    q.mean_energy = trace_product(theta, q.boltzmann).real() / q.partition;
    return q;
}

// ------------------------ noisy two-level eigen-analysis ---------------------

// Closed-form spectrum of 1 + diag(S+D, S-D) + λ [[0,1+i],[1-i,0]]. Eigenvectors are
// the unnormalized closed forms; at λ = 0 they are the D-dominated limits.
struct NoisyEigenSystem {
    double e_ground = 0.0;   // 1 + S - √(D² + 2λ²)
    double e_excited = 0.0;  // 1 + S + √(D² + 2λ²)
    CVector ground;
    CVector excited;
    bool degenerate = false;  // λ = 0 and D = 0
};

inline NoisyEigenSystem noisy_eigensystem(double lambda, double s, double d) {
    NoisyEigenSystem es;
    const double root = std::sqrt(d * d + 2.0 * lambda * lambda);
    es.e_ground = 1.0 + s - root;
    es.e_excited = 1.0 + s + root;
    es.ground = CVector::Zero(2);
    es.excited = CVector::Zero(2);
    if (lambda == 0.0) {
        es.degenerate = (d == 0.0);
        // diag(1+S+D, 1+S-D): the lower level sits in the second slot when D > 0
        const bool second_lower = d >= 0.0;
        es.ground(second_lower ? 1 : 0) = 1.0;
        es.excited(second_lower ? 0 : 1) = 1.0;
        return es;
    }
    const double ratio = d / std::abs(lambda);
    const double sign = lambda > 0.0 ? 1.0 : -1.0;
    const double tail = std::sqrt(2.0 + ratio * ratio);
    es.ground << -sign * Complex(1.0, 1.0), Complex(ratio + tail, 0.0);
    es.excited << -sign * Complex(1.0, 1.0), Complex(ratio - tail, 0.0);
    return es;
}

// r(|λ|) = ⟨𝔢_A(-|λ|)|𝔢_A(|λ|)⟩ / norms = (A² - 2)/(A² + 2), A = D/|λ| + √(2 + (D/|λ|)²).
inline double ground_state_overlap(double abs_lambda, double d) {
    if (abs_lambda == 0.0) {
        if (d == 0.0) throw ValidationError("ground_state_overlap: degenerate at lambda = 0, D = 0");
        return d > 0.0 ? 1.0 : -1.0;
    }
    const double ratio = d / std::abs(abs_lambda);
    const double a = ratio + std::sqrt(2.0 + ratio * ratio);
    return (a * a - 2.0) / (a * a + 2.0);
}

struct ExpectedEigenvalues {
    double ground;
    double excited;
};

// Second-order moment expansion E[g(D)] ≈ g(0) + g''(0) σ²/2 of the noisy levels,
// with E[S] = E[D] = 0 and std(D) = sigma.
inline ExpectedEigenvalues expected_eigenvalue_approx(double lambda, double sigma) {
    if (lambda == 0.0) throw ValidationError("expected_eigenvalue_approx: expansion is singular at lambda = 0");
    if (sigma < 0.0) throw ValidationError("expected_eigenvalue_approx: sigma must be >= 0");
    const double l = std::abs(lambda);
    const double shift = l * std::numbers::sqrt2 + sigma * sigma / (std::pow(2.0, 1.5) * l);
    return {1.0 - shift, 1.0 + shift};
}

// (h11 - h22)² + 4|h12|², the discriminant of the 2×2 characteristic polynomial;
// zero exactly when the two eigenvalues coincide.
inline double degeneracy_discriminant(const CMatrix& h) {
    if (h.rows() != 2 || h.cols() != 2) throw ValidationError("degeneracy_discriminant: 2x2 matrix expected");
    const double diff = (h(0, 0) - h(1, 1)).real();
    return diff * diff + 4.0 * std::norm(h(0, 1));
}

// -------------------------------- entropy scan ------------------------------

struct NormalizedEntropies {
    double von_neumann = 0.0;         // E_vN / log d
    std::vector<double> generalized;  // E_n / log n, per basis
};

// Entropies of θ/Tr θ; empty when that operator is not a density matrix or some
// pseudo-probability is negative.
inline std::optional<NormalizedEntropies> normalized_entropies(const CMatrix& theta,
                                                               std::span<const GeneralizedBasis> bases,
                                                               const Tolerances& tol = default_tolerances) {
    const double tr = theta.trace().real();
    if (!(tr > 0.0)) return std::nullopt;
    const CMatrix rho = theta / tr;
    if (min_eigenvalue(rho) < -tol.psd_floor) return std::nullopt;
    NormalizedEntropies out;
    const auto d = static_cast<double>(rho.rows());
    out.von_neumann = d > 1 ? von_neumann_entropy(rho) / std::log(d) : 0.0;
    for (const auto& gb : bases) {
        const auto s = pseudo_probabilities(rho, gb, tol);
        if (std::any_of(s.values.begin(), s.values.end(), [&](double v) { return v < -tol.negative_prob; }))
            return std::nullopt;
        out.generalized.push_back(shannon_entropy(s.values, tol) / std::log(static_cast<double>(gb.n)));
    }
    return out;
}

struct EntropyScanRow {
    double lambda = 0.0;
    std::optional<NormalizedEntropies> clean;
    std::optional<NormalizedEntropies> noisy;

    // (E - E_noise)/E for von Neumann then each basis; empty unless both sides are valid.
    std::vector<double> relative_deviation() const {
        if (!clean || !noisy) return {};
        std::vector<double> out{(clean->von_neumann - noisy->von_neumann) / clean->von_neumann};
        for (std::size_t k = 0; k < clean->generalized.size(); ++k)
            out.push_back((clean->generalized[k] - noisy->generalized[k]) / clean->generalized[k]);
        return out;
    }
};

inline std::vector<EntropyScanRow> entropy_scan(const AffineHamiltonianFamily& family,
                                                std::span<const GeneralizedBasis> bases,
                                                std::span<const double> lambdas,
                                                const std::optional<AffineHamiltonianFamily>& noisy = std::nullopt,
                                                const Tolerances& tol = default_tolerances) {
    for (const auto& gb : bases)
        if (gb.d != family.dim()) throw ValidationError("entropy_scan: basis dimension mismatch");
    std::vector<EntropyScanRow> rows;
    rows.reserve(lambdas.size());
    for (double lambda : lambdas) {
        EntropyScanRow row;
        row.lambda = lambda;
        row.clean = normalized_entropies(family.at(lambda), bases, tol);
        if (noisy) row.noisy = normalized_entropies(noisy->at(lambda), bases, tol);
        rows.push_back(std::move(row));
    }
    return rows;
}

// Spread of the relative entropy deviations under random diagonal noise: for each
// draw (𝔑1, 𝔑2) ~ U[-μ, μ] the noisy family is family + diag(𝔑1, 𝔑2), and every λ row
// where both sides are valid contributes |(E - E_noise)/E| per column. Medians are
// taken over the pooled rows, von Neumann first then each basis.
struct EntropyNoiseSummary {
    std::vector<double> median_abs_deviation;
    std::size_t draws = 0;
    std::size_t rows_used = 0;
    std::size_t rows_skipped = 0;
};

inline EntropyNoiseSummary entropy_noise_summary(const AffineHamiltonianFamily& family,
                                                 std::span<const GeneralizedBasis> bases,
                                                 std::span<const double> lambdas, double mu, std::size_t draws,
                                                 std::uint64_t seed, const Tolerances& tol = default_tolerances) {
    if (draws < 1) throw ValidationError("entropy_noise_summary: draws must be >= 1");
    EntropyNoiseSummary out;
    out.draws = draws;
    std::vector<std::vector<double>> pooled(bases.size() + 1);
    for (std::size_t k = 0; k < draws; ++k) {
        UniformNoise noise(derive_seed(seed, k), mu);
        const auto diag = noise.draw(family.dim());
        const auto rows = entropy_scan(family, bases, lambdas, family.with_diagonal_noise(diag), tol);
        for (const auto& row : rows) {
            const auto dev = row.relative_deviation();
            if (dev.empty()) {
                ++out.rows_skipped;
                continue;
            }
            ++out.rows_used;
            for (std::size_t c = 0; c < dev.size(); ++c) pooled[c].push_back(std::abs(dev[c]));
        }
    }
    for (auto& col : pooled) {
        if (col.empty()) {
            out.median_abs_deviation.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const std::size_t mid = col.size() / 2;
        std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(mid), col.end());
        double m = col[mid];
        if (col.size() % 2 == 0) m = 0.5 * (m + *std::max_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(mid)));
        out.median_abs_deviation.push_back(m);
    }
    return out;
}

}  // namespace genbasis
