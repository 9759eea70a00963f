#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "genbasis/builtin.hpp"
#include "genbasis/detect.hpp"
#include "genbasis/entropy.hpp"
#include "support/oracles.hpp"

using namespace genbasis;
using oracle::m2;
using oracle::matrices_near;

namespace {

const GeneralizedBasis& three() {
    static const GeneralizedBasis gb = generalized_basis(builtin::three_state_prebasis());
    return gb;
}

const GeneralizedBasis& four() {
    static const GeneralizedBasis gb = generalized_basis(builtin::four_state_prebasis());
    return gb;
}

LocationIndex li(std::vector<int> order) { return LocationIndex{std::move(order), false}; }

// Every pairwise root of s_i(λ) = s_j(λ), with the affine pieces recovered from two
// evaluations of the pseudo-probabilities (no use of s_affine_coefficients).
std::vector<double> pairwise_roots(const AffineHamiltonianFamily& f, const GeneralizedBasis& gb) {
    const auto s0 = pseudo_probabilities(f.at(0.0), gb).values;
    const auto s1 = pseudo_probabilities(f.at(1.0), gb).values;
    std::vector<double> roots;
    for (std::size_t i = 0; i < s0.size(); ++i) {
        for (std::size_t j = i + 1; j < s0.size(); ++j) {
            const double g0 = s0[i] - s0[j], g1 = s1[i] - s1[j];
            if (g1 != g0) roots.push_back(g0 / (g0 - g1));
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace

TEST(Family, ConstructionAndErrors) {
    const auto f = two_level_coupling_family();
    EXPECT_TRUE(matrices_near(f.at(0.5), m2(1, Complex(0.5, 0.5), Complex(0.5, -0.5), 1), 0.0));
    EXPECT_THROW(AffineHamiltonianFamily(m2(1, 1, 0, 1), m2(0, 0, 0, 0)), ValidationError);
    EXPECT_THROW(AffineHamiltonianFamily(m2(1, 0, 0, 1), CMatrix::Identity(3, 3)), ValidationError);
    EXPECT_THROW(f.with_range(1.0, 1.0), ValidationError);
    const auto g = noisy_two_level_coupling_family(0.1, 0.3);
    EXPECT_NEAR(g.h0()(0, 0).real(), 1.4, 1e-15);
    EXPECT_NEAR(g.h0()(1, 1).real(), 0.8, 1e-15);
}

TEST(AffineCoefficients, ReferenceSlopes) {
    const auto f = two_level_coupling_family();
    const auto c3 = s_affine_coefficients(f, three());
    const double w3 = 2.0 / 3.0;
    const double b3[] = {-0.050, -0.650, 0.700};
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(c3[i].a, w3, 1e-12);
        EXPECT_NEAR(c3[i].b, w3 * b3[i], 2e-3);
    }
    const auto c4 = s_affine_coefficients(f, four());
    const double b4[] = {-0.168, -0.700, 0.500, 0.368};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(c4[i].a, 0.5, 1e-12);
        EXPECT_NEAR(c4[i].b, 0.5 * b4[i], 2e-3);
    }
}

TEST(AffineCoefficients, NoisyReferenceForms) {
    // s(i) = w[1 + 𝔑1 + c_i D + b_i λ] with 𝔑1 = S + D
    const double S = 0.07, D = 0.2;
    const auto f = noisy_two_level_coupling_family(S, D);
    const auto c3 = s_affine_coefficients(f, three());
    const double k3[] = {-0.350, -1.550, -1.100};
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(c3[i].a, 2.0 / 3.0 * (1 + S + D + k3[i] * D), 2e-3);
    const auto c4 = s_affine_coefficients(f, four());
    const double k4[] = {-0.300, -1.368, -0.968, -1.368};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c4[i].a, 0.5 * (1 + S + D + k4[i] * D), 2e-3);
}

TEST(LocationIndex, OrderAndTies) {
    const std::vector<double> s{0.2, 0.5, 0.3};
    const auto l = location_index(s);
    EXPECT_EQ(l.order, (std::vector<int>{2, 3, 1}));
    EXPECT_FALSE(l.tie);
    EXPECT_EQ(to_string(l), "(2,3,1)");
    const std::vector<double> t{0.4, 0.2, 0.4 + 1e-12};
    EXPECT_TRUE(location_index(t).tie);
}

TEST(Comonotonicity, NoiselessPartitions) {
    const auto f = two_level_coupling_family();
    const auto p3 = comonotonicity_partition(f, three());
    ASSERT_EQ(p3.intervals.size(), 2u);
    ASSERT_EQ(p3.crossings.size(), 1u);
    EXPECT_NEAR(p3.crossings[0], 0.0, 1e-12);
    EXPECT_EQ(p3.intervals[0].index, li({2, 1, 3}));
    EXPECT_EQ(p3.intervals[1].index, li({3, 1, 2}));
    EXPECT_TRUE(std::isinf(p3.intervals[0].lo));
    EXPECT_FALSE(p3.degenerate());

    // descending order of the slopes (-0.168, -0.700, 0.500, 0.368) on each side of 0
    const auto p4 = comonotonicity_partition(f, four());
    ASSERT_EQ(p4.intervals.size(), 2u);
    EXPECT_EQ(p4.intervals[0].index, li({2, 1, 4, 3}));
    EXPECT_EQ(p4.intervals[1].index, li({3, 4, 1, 2}));
    EXPECT_EQ(p4.find(-7.0)->index, li({2, 1, 4, 3}));
    EXPECT_EQ(p4.find(0.0), nullptr);
}

TEST(Comonotonicity, NoisyFourStateMatchesOracleAndReference) {
    const auto f = noisy_two_level_coupling_family(0.0, 1.0);
    const auto p = comonotonicity_partition(f, four());
    const auto oracle_roots = pairwise_roots(f, four());
    ASSERT_EQ(p.crossings.size(), 6u);
    ASSERT_EQ(oracle_roots.size(), 6u);
    // exact σ gives slopes -1/6 and 11/30 which round to -0.168 and 0.368 at three decimals
    const double exact[] = {-3.0, -2.0, -1.0 / 3.0, 0.0, 1.0, 2.0};
    const double reference[] = {-3.0, -2.0, -0.33, 0.0, 1.0, 1.99};
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_NEAR(p.crossings[k], oracle_roots[k], 1e-9);
        EXPECT_NEAR(p.crossings[k], exact[k], 1e-9);
        EXPECT_NEAR(p.crossings[k], reference[k], 0.02 * std::max(std::abs(reference[k]), 0.01));
    }
    const std::vector<std::vector<int>> want{{2, 1, 4, 3}, {2, 1, 3, 4}, {1, 2, 3, 4}, {1, 3, 2, 4},
                                             {1, 3, 4, 2}, {3, 1, 4, 2}, {3, 4, 1, 2}};
    ASSERT_EQ(p.intervals.size(), 7u);
    for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(p.intervals[k].index, li(want[k])) << "interval " << k;
}

TEST(Comonotonicity, NoisyThreeStateUsesPairwiseEqualityValue) {
    const auto f = noisy_two_level_coupling_family(0.0, 1.0);
    const auto p = comonotonicity_partition(f, three());
    const auto roots = pairwise_roots(f, three());
    ASSERT_EQ(p.crossings.size(), 3u);
    EXPECT_NEAR(p.crossings[0], -2.0, 0.02 * 2.0);
    EXPECT_NEAR(p.crossings[1], -1.0 / 3.0, 0.02 / 3.0);
    // the third crossing is where s(1) = s(3), at exactly D
    EXPECT_NEAR(p.crossings[2], roots[2], 1e-9);
    EXPECT_NEAR(p.crossings[2], 1.0, 1e-2);
    const std::vector<std::vector<int>> want{{2, 1, 3}, {1, 2, 3}, {1, 3, 2}, {3, 1, 2}};
    ASSERT_EQ(p.intervals.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(p.intervals[k].index, li(want[k]));
}

TEST(Comonotonicity, CrossingsScaleWithD) {
    for (double D : {0.05, 0.3, 2.0}) {
        const auto p = comonotonicity_partition(noisy_two_level_coupling_family(0.4, D), four());
        const auto unit = comonotonicity_partition(noisy_two_level_coupling_family(0.0, 1.0), four());
        ASSERT_EQ(p.crossings.size(), unit.crossings.size());
        for (std::size_t k = 0; k < p.crossings.size(); ++k) EXPECT_NEAR(p.crossings[k] / D, unit.crossings[k], 1e-9);
    }
}

TEST(Comonotonicity, RangeRestrictionAndDegenerateTies) {
    const auto f = noisy_two_level_coupling_family(0.0, 1.0).with_range(-1.0, 1.5);
    const auto p = comonotonicity_partition(f, four());
    EXPECT_EQ(p.crossings.size(), 3u);  // -0.333, 0, 1
    EXPECT_DOUBLE_EQ(p.intervals.front().lo, -1.0);
    EXPECT_DOUBLE_EQ(p.intervals.back().hi, 1.5);

    // identical coefficient pairs never separate
    const std::vector<AffineCoefficient> twin{{0.5, 0.1}, {0.5, 0.1}, {0.0, -0.2}};
    const auto q = comonotonicity_partition(twin, -inf, inf);
    EXPECT_TRUE(q.degenerate());
    EXPECT_THROW(comonotonicity_partition(twin, 1.0, 0.0), ValidationError);
}

TEST(Comonotonicity, GridFallbackAgreesWithExact) {
    for (const GeneralizedBasis* gb : {&three(), &four()}) {
        const auto f = noisy_two_level_coupling_family(0.1, 0.5);
        const auto exact = comonotonicity_partition(f.with_range(-4.0, 4.0), *gb);
        const auto grid = partition_by_grid(f, *gb, -4.0, 4.0);
        ASSERT_EQ(grid.crossings.size(), exact.crossings.size());
        for (std::size_t k = 0; k < exact.crossings.size(); ++k) {
            EXPECT_NEAR(grid.crossings[k], exact.crossings[k], 1e-8);
            EXPECT_EQ(grid.intervals[k].index, exact.intervals[k].index);
        }
    }
    EXPECT_THROW(partition_by_grid(two_level_coupling_family(), three(), -inf, 1.0), ValidationError);
}

TEST(Comonotonicity, GridFallbackOnNonAffineFamily) {
    // θ(λ) = 1 + (λ² - 1) H1 crosses at λ = ±1
    const CMatrix h1 = two_level_coupling_family().h1();
    auto theta = [&](double x) -> CMatrix { return identity(2) + (x * x - 1.0) * h1; };
    const auto p = partition_by_grid(theta, three(), -2.0, 2.0);
    ASSERT_EQ(p.crossings.size(), 2u);
    EXPECT_NEAR(p.crossings[0], -1.0, 1e-8);
    EXPECT_NEAR(p.crossings[1], 1.0, 1e-8);
    EXPECT_EQ(p.intervals[0].index, p.intervals[2].index);
    EXPECT_EQ(p.intervals[1].index, li({2, 1, 3}));
}

TEST(Comonotonicity, AveragingNoisyRealizationsRecoversNoiselessSplit) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<std::vector<AffineCoefficient>> runs;
    for (int k = 0; k < 4000; ++k) {
        const double n1 = u(rng), n2 = u(rng);
        runs.push_back(s_affine_coefficients(noisy_two_level_coupling_family((n1 + n2) / 2, (n1 - n2) / 2), three()));
    }
    const auto mean = average_coefficients(runs);
    const auto p = comonotonicity_partition(mean, -inf, inf);
    // the averaged intercepts are nearly equal, so every pairwise crossing sits close to 0
    for (double x : p.crossings) EXPECT_LT(std::abs(x), 0.05);
    EXPECT_EQ(p.find(-1.0)->index, li({2, 1, 3}));
    EXPECT_EQ(p.find(1.0)->index, li({3, 1, 2}));
}

TEST(Thermal, ClosedFormsOnGrid) {
    const auto f = two_level_coupling_family();
    for (double beta : {0.1, 0.7, 1.5, 4.0}) {
        for (double lambda : {-1.2, -0.3, 0.0, 0.25, 0.9}) {
            const auto q = thermal_quantities(f, three(), beta, lambda);
            const double x = beta * lambda * std::numbers::sqrt2;
            EXPECT_NEAR(q.partition, 2.0 * std::exp(-beta) * std::cosh(x), 1e-10);
            EXPECT_NEAR(q.mean_energy, 1.0 - lambda * std::numbers::sqrt2 * std::tanh(x), 1e-10);
            double total = 0.0;
            for (double s : q.s) total += s;
            EXPECT_NEAR(total, q.partition, 1e-10);
        }
    }
    EXPECT_THROW(thermal_quantities(f, three(), 0.0, 0.1), ValidationError);
}

TEST(Thermal, ReferenceSinhCoefficients) {
    // s_𝓔(i) = w e^{-β}[cosh x + c_i sinh x]; recover c_i at one (β, λ)
    const auto f = two_level_coupling_family();
    const double beta = 0.8, lambda = 0.6, x = beta * lambda * std::numbers::sqrt2;
    auto coeffs = [&](const GeneralizedBasis& gb) {
        const auto q = thermal_quantities(f, gb, beta, lambda);
        std::vector<double> c;
        for (double s : q.s) c.push_back((s / (gb.weight() * std::exp(-beta)) - std::cosh(x)) / std::sinh(x));
        return c;
    };
    const auto c3 = coeffs(three());
    const double p3[] = {0.035, 0.459, -0.494};
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(c3[i], p3[i], 2e-3);
    const auto c4 = coeffs(four());
    const double p4[] = {0.118, 0.494, -0.352, -0.260};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c4[i], p4[i], 2e-3);
}

TEST(NoisyEigen, ClosedFormsMatchNumericSpectrum) {
    for (double lambda : {-1.0, -0.3, -0.01, 0.02, 0.4, 1.7}) {
        for (double S : {-0.3, 0.0, 0.2}) {
            for (double D : {-0.4, 0.0, 0.05, 0.5}) {
                const CMatrix h = noisy_two_level_coupling_family(S, D).at(lambda);
                const EigenSystem es = hermitian_eig(h);
                const NoisyEigenSystem cf = noisy_eigensystem(lambda, S, D);
                EXPECT_NEAR(cf.e_ground, es.values(0), 1e-10);
                EXPECT_NEAR(cf.e_excited, es.values(1), 1e-10);
                const CVector g = cf.ground / cf.ground.norm();
                const CVector e = cf.excited / cf.excited.norm();
                EXPECT_LE(oracle::max_abs(h * g - cf.e_ground * g), 1e-10);
                EXPECT_LE(oracle::max_abs(h * e - cf.e_excited * e), 1e-10);
                EXPECT_NEAR(std::abs(g.dot(e)), 0.0, 1e-10);
                // same ray as the numeric ground state
                EXPECT_NEAR(std::abs(es.vectors.col(0).dot(g)), 1.0, 1e-10);
            }
        }
    }
}

TEST(NoisyEigen, LambdaZeroLimits) {
    const auto a = noisy_eigensystem(0.0, 0.1, 0.3);
    EXPECT_FALSE(a.degenerate);
    EXPECT_NEAR(a.e_ground, 0.8, 1e-15);
    const CMatrix h = noisy_two_level_coupling_family(0.1, 0.3).at(0.0);
    EXPECT_LE(oracle::max_abs(h * a.ground - a.e_ground * a.ground), 1e-15);
    const auto b = noisy_eigensystem(0.0, 0.1, -0.3);
    EXPECT_LE(oracle::max_abs(noisy_two_level_coupling_family(0.1, -0.3).at(0.0) * b.ground - b.e_ground * b.ground), 1e-15);
    EXPECT_TRUE(noisy_eigensystem(0.0, 0.0, 0.0).degenerate);
}

TEST(NoisyEigen, OverlapMatchesNumericGroundStates) {
    for (double D : {0.0, 0.1, 0.5, 1.0, 3.0}) {
        for (double l : {0.01, 0.1, 0.5, 2.0}) {
            auto ground = [&](double lambda) {
                CVector v = hermitian_eig(noisy_two_level_coupling_family(0.0, D).at(lambda)).vectors.col(0);
                return CVector(v * (std::abs(v(1)) / v(1)));  // second entry real positive
            };
            const CVector m = ground(-l), p = ground(l);
            const Complex ip = m.dot(p);
            EXPECT_NEAR(ip.real(), ground_state_overlap(l, D), 1e-10);
            EXPECT_NEAR(ip.imag(), 0.0, 1e-10);
        }
    }
    EXPECT_NEAR(ground_state_overlap(0.3, 0.0), 0.0, 1e-15);
    EXPECT_GT(ground_state_overlap(1e-4, 1.0), 0.999);
    EXPECT_DOUBLE_EQ(ground_state_overlap(0.0, 1.0), 1.0);
    EXPECT_THROW(ground_state_overlap(0.0, 0.0), ValidationError);
}

TEST(NoisyEigen, ExpectedEigenvalueSecondOrder) {
    // D uniform on [-μ, μ]: compare with the exact mean by Simpson's rule
    const double lambda = 0.8, mu = 0.1, sigma = mu / std::sqrt(3.0);
    const int m = 2000;
    double acc = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double D = -mu + 2.0 * mu * k / m;
        const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * std::sqrt(D * D + 2.0 * lambda * lambda);
    }
    const double exact = acc * (2.0 * mu / m) / 3.0 / (2.0 * mu);
    const auto approx = expected_eigenvalue_approx(lambda, sigma);
    // what is left is the fourth-order term -E[D⁴]/(8c³), c = |λ|√2, E[D⁴] = μ⁴/5
    const double c = lambda * std::numbers::sqrt2;
    const double fourth = -std::pow(mu, 4) / 5.0 / (8.0 * c * c * c);
    // the sixth-order term is about 5e-9 here
    EXPECT_NEAR((1.0 - approx.ground) + fourth, exact, 1e-8);
    EXPECT_NEAR((approx.excited - 1.0) + fourth, exact, 1e-8);
    EXPECT_GT(std::abs((1.0 - approx.ground) - exact), 1e-6);
    EXPECT_THROW(expected_eigenvalue_approx(0.0, 0.1), ValidationError);
}

TEST(EqualEigenvalues, DiscriminantAndMaximalEntropies) {
    std::mt19937_64 rng(67);
    for (int k = 0; k < 50; ++k) {
        const CMatrix h = oracle::random_hermitian(2, rng);
        const EigenSystem es = hermitian_eig(h);
        const double gap = es.values(1) - es.values(0);
        EXPECT_NEAR(degeneracy_discriminant(h), gap * gap, 1e-10);
    }
    EXPECT_DOUBLE_EQ(degeneracy_discriminant(m2(0.5, 0, 0, 0.5)), 0.0);

    const std::vector<GeneralizedBasis> bases{three(), four()};
    const CMatrix at0 = noisy_two_level_coupling_family(0.0, 0.0).at(0.0);
    const auto e = normalized_entropies(at0, bases);
    ASSERT_TRUE(e.has_value());
    EXPECT_NEAR(e->von_neumann, 1.0, 1e-10);
    for (double g : e->generalized) EXPECT_NEAR(g, 1.0, 1e-10);
    const CMatrix rho = at0 / at0.trace().real();
    EXPECT_NEAR(von_neumann_entropy(rho), std::log(2.0), 1e-10);
    EXPECT_NEAR(shannon_entropy(pseudo_probabilities(rho, four())), std::log(4.0), 1e-10);
}

TEST(EntropyScan, ReferenceNoiselessRows) {
    const std::vector<GeneralizedBasis> bases{three(), four()};
    const std::vector<double> lambdas{-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4};
    const double table[9][3] = {{0.754, 0.977, 0.987}, {0.866, 0.987, 0.992}, {0.941, 0.994, 0.996},
                                {0.985, 0.998, 0.999}, {1.0, 1.0, 1.0},       {0.985, 0.998, 0.999},
                                {0.941, 0.994, 0.996}, {0.866, 0.987, 0.992}, {0.754, 0.977, 0.986}};
    const auto rows = entropy_scan(two_level_coupling_family(), bases, lambdas);
    ASSERT_EQ(rows.size(), 9u);
    for (std::size_t k = 0; k < 9; ++k) {
        ASSERT_TRUE(rows[k].clean.has_value());
        EXPECT_NEAR(rows[k].clean->von_neumann, table[k][0], 2e-3) << "lambda " << lambdas[k];
        EXPECT_NEAR(rows[k].clean->generalized[0], table[k][1], 2e-3) << "lambda " << lambdas[k];
        EXPECT_NEAR(rows[k].clean->generalized[1], table[k][2], 2e-3) << "lambda " << lambdas[k];
        EXPECT_TRUE(rows[k].relative_deviation().empty());
    }
}

TEST(EntropyScan, InvalidRowsAreEmpty) {
    const std::vector<GeneralizedBasis> bases{three()};
    // past |λ| = 1/√2 the normalized operator has a negative eigenvalue
    const std::vector<double> lambdas{0.9};
    const auto rows = entropy_scan(two_level_coupling_family(), bases, lambdas, noisy_two_level_coupling_family(0.1, 0.1));
    EXPECT_FALSE(rows[0].clean.has_value());
    EXPECT_TRUE(rows[0].relative_deviation().empty());
}

TEST(EntropyScan, VonNeumannSymmetric) {
    const std::vector<GeneralizedBasis> bases{four()};
    for (double l : {0.05, 0.2, 0.45}) {
        const auto a = normalized_entropies(two_level_coupling_family().at(l), bases);
        const auto b = normalized_entropies(two_level_coupling_family().at(-l), bases);
        EXPECT_NEAR(a->von_neumann, b->von_neumann, 1e-12);
    }
}
