// represent.hpp — expansion of vectors in a generalized basis, the operator-valued
// metric g(i,j), and noise-injection reconstruction experiments against the
// orthonormal (position-basis) baseline.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "genbasis/config.hpp"
#include "genbasis/linalg.hpp"
#include "genbasis/renorm.hpp"

namespace genbasis {

struct Expansion {
    std::vector<CVector> components;  // |V(i)⟩ = (d/n) σ(i) |V⟩
    CVector source;

    CVector sum() const {
        CVector acc = CVector::Zero(source.size());
        for (const auto& c : components) acc += c;
        return acc;
    }
};

inline Expansion expand(const CVector& v, const GeneralizedBasis& gb) {
    if (v.size() != static_cast<Eigen::Index>(gb.d)) throw ValidationError("expand: dimension mismatch");
    Expansion e;
    e.source = v;
    e.components.reserve(gb.n);
    for (const auto& s : gb.sigmas) e.components.push_back(gb.weight() * (s * v));
    return e;
}

// n×n grid of d×d operators, row-major: grid[i*n + j] = (d/n)² σ(i) σ(j).
struct Metric {
    std::size_t n = 0;
    std::vector<CMatrix> entries;

    const CMatrix& operator()(std::size_t i, std::size_t j) const { return entries.at(i * n + j); }

    CMatrix total() const {
        CMatrix acc = CMatrix::Zero(entries.front().rows(), entries.front().cols());
        for (const auto& g : entries) acc += g;
        return acc;
    }

    // Σ_{i,j} ⟨V|g(i,j)|U⟩
    Complex inner(const CVector& v, const CVector& u) const {
        Complex acc{0.0, 0.0};
        for (const auto& g : entries) acc += v.dot(g * u);
        return acc;
    }
};

inline Metric metric(const GeneralizedBasis& gb) {
    Metric g;
    g.n = gb.n;
    g.entries.reserve(gb.n * gb.n);
    const double w2 = gb.weight() * gb.weight();
    for (std::size_t i = 0; i < gb.n; ++i)
        for (std::size_t j = 0; j < gb.n; ++j) g.entries.push_back(w2 * gb.sigmas[i] * gb.sigmas[j]);
    return g;
}

// ---------------------------- noisy reconstruction --------------------------

struct ReconstructionError {
    double eps = 0.0;          // ‖W - V‖
    double eps_diag = 0.0;     // Σ_i 𝔑_i² ⟨V|g(i,i)|V⟩
    double eps_offdiag = 0.0;  // Σ_{i≠j} 𝔑_i 𝔑_j ⟨V|g(i,j)|V⟩, may be negative
};

// W = (d/n) Σ (1 + 𝔑_i) σ(i) V; ε is the direct norm, split into diagonal and
// off-diagonal parts with ε² = ε_D + ε_ND.
inline ReconstructionError reconstruct_with_noise(const CVector& v, const GeneralizedBasis& gb,
                                                  std::span<const double> noise) {
    if (noise.size() != gb.n) {
        std::ostringstream os;
        os << "reconstruct_with_noise: " << noise.size() << " noise values for " << gb.n << " components";
        throw ValidationError(os.str());
    }
    if (v.size() != static_cast<Eigen::Index>(gb.d)) throw ValidationError("reconstruct_with_noise: dimension mismatch");
    const double w = gb.weight();
    std::vector<CVector> parts;
    parts.reserve(gb.n);
    CVector wv = CVector::Zero(v.size());
    for (std::size_t i = 0; i < gb.n; ++i) {
        parts.push_back(w * (gb.sigmas[i] * v));
        wv += (1.0 + noise[i]) * parts.back();
    }
    ReconstructionError r;
    r.eps = (wv - v).norm();
    // ⟨V|g(i,j)|V⟩ = ⟨V(i)|V(j)⟩ since σ(i) is Hermitian
    for (std::size_t i = 0; i < gb.n; ++i) {
        for (std::size_t j = 0; j < gb.n; ++j) {
            const double term = noise[i] * noise[j] * parts[i].dot(parts[j]).real();
            (i == j ? r.eps_diag : r.eps_offdiag) += term;
        }
    }
    return r;
}

// ‖W_orth - V‖ with W_orth = Σ_α (1 + 𝔑_α) V(α) |X;α⟩.
inline double orthonormal_baseline(const CVector& v, std::span<const double> noise) {
    if (noise.size() != static_cast<std::size_t>(v.size())) {
        std::ostringstream os;
        os << "orthonormal_baseline: " << noise.size() << " noise values for dimension " << v.size();
        throw ValidationError(os.str());
    }
    double acc = 0.0;
    for (Eigen::Index a = 0; a < v.size(); ++a) acc += noise[static_cast<std::size_t>(a)] * noise[static_cast<std::size_t>(a)] * std::norm(v(a));
    return std::sqrt(acc);
}

// ------------------------------ seeded noise ---------------------------------

// Sub-seed for trial k: splitmix64 over (master, k), independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Uniform draws on [-μ, μ] from mt19937_64 using the top 53 bits, so the stream is
// identical across standard libraries.
class UniformNoise {
public:
    UniformNoise(std::uint64_t seed, double mu) : engine_(seed), mu_(mu) {
        if (!(mu > 0.0)) throw ValidationError("UniformNoise: mu must be positive");
    }

    double operator()() {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0,1)
        return mu_ * (2.0 * u - 1.0);
    }

    std::vector<double> draw(std::size_t count) {
        std::vector<double> out(count);
        for (auto& x : out) x = (*this)();
        return out;
    }

private:
    std::mt19937_64 engine_;
    double mu_;
};

// --------------------------------- trials ------------------------------------

struct NoiseTrialResult {
    std::uint64_t seed = 0;
    std::vector<ReconstructionError> bases;        // one per generalized basis
    std::vector<std::vector<double>> basis_noise;  // 𝔑_i per basis
    double eps_orth = 0.0;
    std::vector<double> orth_noise;                // 𝔑_α
};

struct ErrorStatistics {
    double mean = 0.0;
    double stddev = 0.0;
    double win_rate = 0.0;  // fraction of trials with ε < ε_orth (baseline: 0)
};

struct NoiseTrialSuite {
    double mu = 0.0;
    std::uint64_t seed = 0;
    std::vector<NoiseTrialResult> trials;
    std::vector<ErrorStatistics> basis_stats;
    ErrorStatistics orth_stats;
};

inline ErrorStatistics summarize(const std::vector<double>& eps, const std::vector<double>& orth) {
    ErrorStatistics s;
    const auto count = static_cast<double>(eps.size());
    for (double e : eps) s.mean += e;
    s.mean /= count;
    double var = 0.0;
    for (double e : eps) var += (e - s.mean) * (e - s.mean);
    s.stddev = eps.size() > 1 ? std::sqrt(var / (count - 1.0)) : 0.0;
    std::size_t wins = 0;
    for (std::size_t k = 0; k < eps.size(); ++k) wins += eps[k] < orth[k] ? 1 : 0;
    s.win_rate = static_cast<double>(wins) / count;
    return s;
}

// Each trial draws, in order, n_b values per basis b and then d values for the
// orthonormal baseline, all from the trial's own sub-seed.
inline NoiseTrialSuite noise_trial_suite(const CVector& v, std::span<const GeneralizedBasis> bases,
                                         double mu, std::size_t trials, std::uint64_t seed) {
    if (!(mu > 0.0)) throw ValidationError("noise_trial_suite: mu must be positive");
    if (trials < 1) throw ValidationError("noise_trial_suite: trials must be >= 1");
    NoiseTrialSuite suite;
    suite.mu = mu;
    suite.seed = seed;
    suite.trials.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        NoiseTrialResult row;
        row.seed = derive_seed(seed, t);
        UniformNoise noise(row.seed, mu);
        for (const auto& gb : bases) {
            row.basis_noise.push_back(noise.draw(gb.n));
            row.bases.push_back(reconstruct_with_noise(v, gb, row.basis_noise.back()));
        }
        row.orth_noise = noise.draw(static_cast<std::size_t>(v.size()));
        row.eps_orth = orthonormal_baseline(v, row.orth_noise);
        suite.trials.push_back(std::move(row));
    }
    std::vector<double> orth;
    for (const auto& r : suite.trials) orth.push_back(r.eps_orth);
    for (std::size_t b = 0; b < bases.size(); ++b) {
        std::vector<double> eps;
        for (const auto& r : suite.trials) eps.push_back(r.bases[b].eps);
        suite.basis_stats.push_back(summarize(eps, orth));
    }
    suite.orth_stats = summarize(orth, orth);
    return suite;
}

inline NoiseTrialSuite noise_trial_suite(const CVector& v, const GeneralizedBasis& gb, double mu,
                                         std::size_t trials, std::uint64_t seed) {
    return noise_trial_suite(v, std::span<const GeneralizedBasis>(&gb, 1), mu, trials, seed);
}

}  // namespace genbasis
