// linalg.hpp — dense complex Hermitian linear algebra: span projectors,
// spectral decomposition, Hermitian matrix functions and the Fourier matrix.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "genbasis/config.hpp"

namespace genbasis {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline CMatrix identity(Eigen::Index d) { return CMatrix::Identity(d, d); }

// Largest entry modulus; the "max-entry norm" used for every residual in the library.
template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const CMatrix& m, double tol = default_tolerances.hermitian) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

inline bool is_unitary(const CMatrix& u, double tol = default_tolerances.unitary) {
    return u.rows() == u.cols() && max_abs(u * u.adjoint() - identity(u.rows())) <= tol;
}

// Throws ValidationError naming the worst entry when m is not Hermitian.
inline void require_hermitian(const CMatrix& m, double tol = default_tolerances.hermitian,
                              const char* who = "matrix") {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << who << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
        throw ValidationError(os.str());
    }
    Eigen::Index r = 0, c = 0;
    if (m.size() == 0) return;
    const double worst = (m - m.adjoint()).cwiseAbs().maxCoeff(&r, &c);
    if (worst > tol) {
        std::ostringstream os;
        os << who << ": not Hermitian, |H(" << r << "," << c << ") - conj(H(" << c << "," << r
           << "))| = " << worst << " > " << tol;
        throw ValidationError(os.str());
    }
}

// ------------------------------- span projector -----------------------------

// Orthogonal projector onto span{vectors}. Rank is decided on the singular values of
// the column matrix with a threshold relative to the largest one.
inline CMatrix projector_onto_span(std::span<const CVector> vectors,
                                   double rank_relative = default_tolerances.rank_relative) {
    if (!(rank_relative > 0.0)) throw ValidationError("projector_onto_span: tol must be positive");
    if (vectors.empty()) return CMatrix();  // dimension unknown; callers with a known d use the overload
    const Eigen::Index d = vectors.front().size();
    CMatrix cols(d, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        if (vectors[k].size() != d) {
            std::ostringstream os;
            os << "projector_onto_span: vector " << k << " has dimension " << vectors[k].size()
               << ", expected " << d;
            throw ValidationError(os.str());
        }
        cols.col(static_cast<Eigen::Index>(k)) = vectors[k];
    }
    Eigen::JacobiSVD<CMatrix> svd(cols, Eigen::ComputeThinU);
    const RVector& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return CMatrix::Zero(d, d);
    const double cut = rank_relative * sv(0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    if (rank >= d) return identity(d);
    const auto range = svd.matrixU().leftCols(rank);
    CMatrix p = range * range.adjoint();
    return (p + p.adjoint()) * 0.5;
}

// Same, but an empty input yields the d×d zero matrix.
inline CMatrix projector_onto_span(Eigen::Index d, std::span<const CVector> vectors,
                                   double rank_relative = default_tolerances.rank_relative) {
    if (vectors.empty()) return CMatrix::Zero(d, d);
    if (vectors.front().size() != d) throw ValidationError("projector_onto_span: dimension mismatch");
    return projector_onto_span(vectors, rank_relative);
}

// ------------------------------- Fourier matrix -----------------------------

// F(α,β) = ω(αβ)/√d with ω(α) = exp(2πiα/d).
inline CMatrix fourier_matrix(Eigen::Index d) {
    if (d < 1) throw ValidationError("fourier_matrix: d must be >= 1");
    CMatrix f(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            // reduce αβ mod d first so large products keep full phase accuracy
            const auto k = static_cast<double>((a * b) % d);
            f(a, b) = std::polar(norm, 2.0 * std::numbers::pi * k / static_cast<double>(d));
        }
    }
    return f;
}

// ---------------------------- spectral decomposition ------------------------

struct EigenSystem {
    RVector values;   // ascending
    CMatrix vectors;  // orthonormal columns, vectors.col(k) ↔ values(k)

    Eigen::Index dim() const { return values.size(); }

    CMatrix reconstruct() const { return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint(); }
};

// Fix the global phase of v so that its first largest-modulus component is real positive.
inline void fix_phase(Eigen::Ref<CVector> v) {
    if (v.size() == 0) return;
    const double top = v.cwiseAbs().maxCoeff();
    if (top == 0.0) return;
    Eigen::Index pick = 0;
    while (std::abs(v(pick)) < top * (1.0 - 1e-10)) ++pick;
    v *= std::conj(v(pick)) / std::abs(v(pick));
}

inline EigenSystem hermitian_eig(const CMatrix& h, double hermitian_tol = default_tolerances.hermitian) {
    require_hermitian(h, hermitian_tol, "hermitian_eig");
    const CMatrix sym = (h + h.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw ResidualError("hermitian_eig: decomposition failed", 0.0);
    EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
        CVector col = es.vectors.col(k);
        fix_phase(col);
        es.vectors.col(k) = col;
    }
    return es;
}

// Σ f(e_α) v_α v_α†.
template <class F>
CMatrix hermitian_matrix_function(const CMatrix& h, F&& f) {
    const EigenSystem es = hermitian_eig(h);
    RVector mapped(es.dim());
    for (Eigen::Index k = 0; k < es.dim(); ++k) mapped(k) = f(es.values(k));
    return es.vectors * mapped.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

// x log x with the 0·log 0 = 0 convention; non-positive arguments contribute nothing.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// -Tr[ρ log ρ] in nats.
inline double von_neumann_entropy(const CMatrix& rho) {
    const EigenSystem es = hermitian_eig(rho);
    double s = 0.0;
    for (Eigen::Index k = 0; k < es.dim(); ++k) s -= xlogx(es.values(k));
    return s;
}

inline double min_eigenvalue(const CMatrix& h) { return hermitian_eig(h).values.minCoeff(); }
inline double max_eigenvalue(const CMatrix& h) { return hermitian_eig(h).values.maxCoeff(); }

// Tr[a b] without forming the product.
inline Complex trace_product(const CMatrix& a, const CMatrix& b) {
    return (a.array() * b.transpose().array()).sum();
}

}  // namespace genbasis
