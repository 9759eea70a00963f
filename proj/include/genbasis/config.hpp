// config.hpp — numeric tolerances and error types shared by every genbasis module.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace genbasis {

// All tolerances live here so callers can tighten or relax them in one place.
struct Tolerances {
    double rank_relative   = 1e-10;  // span rank: singular values below this × σ_max are dropped
    double hermitian       = 1e-10;  // max |H - H†| entry
    double unitary         = 1e-10;  // max |U U† - 1| entry
    double unit_norm       = 1e-10;  // pre-basis vectors
    double independence    = 1e-8;   // smallest singular value of every d-subset
    double construction    = 1e-10;  // agreement of the two τ(i) constructions
    double resolution      = 1e-9;   // max |(d/n)Σσ(i) - 1| entry
    double psd_floor       = 1e-10;  // smallest admissible eigenvalue of a density matrix
    double negative_prob   = 1e-12;  // pseudo-probabilities clamped to 0 within this band
    double tie             = 1e-9;   // location-index ties, absolute s units
    double crossing_dedup  = 1e-9;   // crossing points closer than this are merged
    double bisection       = 1e-10;  // grid-fallback bisection width in λ
    std::size_t grid_points = 2001;  // grid-fallback scan resolution
};

inline constexpr Tolerances default_tolerances{};

// Hard caps on the subset lattice.
inline constexpr std::size_t max_lattice_size = 20;                 // n ≤ 20
inline constexpr std::size_t max_cache_entries = std::size_t{1} << 28;  // 2^n · d² complex entries

// Input violates a precondition (dimension mismatch, non-Hermitian, failed validation, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computed identity failed to hold within tolerance; signals numerical degeneracy.
class ResidualError : public std::runtime_error {
public:
    ResidualError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace genbasis
