#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace hardy;
using namespace hardy::testing;

namespace {

cplx sum(const std::vector<cplx>& v) {
    cplx s{0.0};
    for (const cplx& x : v) s += x;
    return s;
}

/// z + 1 - 2/(z - 3), an inner symbol with leading ratio 1.
RationalMap two_pole_inner() {
    return RationalMap(Poly{cplx{-5.0}, cplx{-2.0}, cplx{1.0}}, Poly{cplx{-3.0}, cplx{1.0}});
}

RationalMap real_shift(double b) { return RationalMap(Poly{cplx{b}, cplx{1.0}}); }
RationalMap dilation(double a) { return RationalMap(Poly{cplx{0.0}, cplx{a}}); }

/// Two-term formula for z - 1/z: weights (s +- z)/(2s) at (z +- s)/2 with s = sqrt(z^2 + 4).
cplx z_minus_inverse_adjoint_oracle(const BoundaryFunction& f, cplx z) {
    const cplx s = std::sqrt(z * z + 4.0);
    return (s + z) / (2.0 * s) * f((z + s) / 2.0) + (s - z) / (2.0 * s) * f((z - s) / 2.0);
}

}  // namespace

TEST(AdjointResidue, LinearSymbolClosedForm) {
    Gen gen(31);
    for (int k = 0; k < 20; ++k) {
        const double a = gen.uniform(0.5, 3.0);
        const cplx b{gen.uniform(-2.0, 2.0), gen.uniform(0.0, 2.0)};
        const RationalMap phi(Poly{b, cplx{a}});
        const cplx z = gen.upper_point(3.0, 0.2, 3.0);
        for (const BoundaryFunction& f : {g_p(2.0), kernel(2.0 * I)}) {
            const AdjointResult r = adjoint_residue(phi, f, z);
            const cplx expect = f((z - std::conj(b)) / a) / a;
            EXPECT_LT(std::abs(r.value - expect), 1e-12 * (1.0 + std::abs(expect)));
            ASSERT_EQ(r.weights.size(), 1u);
            EXPECT_LT(std::abs(r.weights[0] - 1.0 / a), 1e-14);
        }
    }
}

TEST(AdjointResidue, ZMinusInverseTwoTermFormula) {
    for (cplx z : {cplx{0.0, 1.0}, cplx{1.0, 1.0}, cplx{-2.0, 0.5}, cplx{0.3, 3.0}}) {
        for (const BoundaryFunction& f : {g_p(2.0), kernel(3.0 * I)}) {
            const AdjointResult r = adjoint_residue(z_minus_inverse_symbol(), f, z);
            EXPECT_EQ(r.preimages_used.size(), 2u);
            const cplx expect = z_minus_inverse_adjoint_oracle(f, z);
            EXPECT_LT(std::abs(r.value - expect), 1e-12) << z;
        }
    }
}

TEST(AdjointResidue, DegeneratePointWeightAndWarning) {
    const AdjointResult r = adjoint_residue(z_minus_inverse_symbol(), g_p(2.0), 2.0 * I);
    ASSERT_EQ(r.preimages_used.size(), 1u);
    EXPECT_EQ(r.preimages_used.roots[0].multiplicity, 2);
    EXPECT_LT(std::abs(r.preimages_used.roots[0].location - I), 1e-6);
    ASSERT_EQ(r.weights.size(), 1u);
    EXPECT_LT(std::abs(sum(r.weights) - 1.0), 1e-10);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(AdjointResidue, DegeneratePointMatchesFullResidue) {
    // Residue of f(s) s / (s - i)^2 at i is d/ds[s f(s)] = f(i) + i f'(i); for g_2, f'(i) = -1/(2i)^2 = 1/4.
    const cplx expect = g_p(2.0)(I) + I * 0.25;
    const AdjointResult r = adjoint_residue(z_minus_inverse_symbol(), g_p(2.0), 2.0 * I);
    EXPECT_LT(std::abs(r.value - expect), 1e-12);
}

TEST(AdjointResidue, DegenerateContinuity) {
    const AdjointSolver solver(z_minus_inverse_symbol());
    const BoundaryFunction f = g_p(2.0);
    const cplx at = solver.residue(f, 2.0 * I).value;
    // Lipschitz estimate from the integral backend, independent of the residue path.
    const double h = 1e-2;
    const double lip = std::abs(solver.integral(f, 2.0 * I + h).value - solver.integral(f, 2.0 * I - h).value) / (2.0 * h);
    double previous = INFINITY;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        const double diff = std::abs(solver.residue(f, 2.0 * I + delta).value - at);
        EXPECT_LE(diff, 10.0 * delta * lip) << delta;
        EXPECT_LT(diff, previous);
        previous = diff;
    }
}

TEST(AdjointResidue, Errors) {
    EXPECT_THROW(adjoint_residue(z_minus_inverse_symbol(), f_p(2.0), I), DomainError);
    EXPECT_THROW(adjoint_residue(z_minus_inverse_symbol(), g_p(2.0), cplx{1.0}), DomainError);
    EXPECT_THROW(adjoint_residue(recip_symbol(), g_p(2.0), I), DomainError);
    const AdjointSolver constant(RationalMap(Poly{I}), false);
    const AdjointResult r = constant.residue(g_p(2.0), I);
    EXPECT_EQ(r.value, cplx{0.0});
    EXPECT_FALSE(r.warnings.empty());
}

TEST(AdjointResidue, ResultInvariants) {
    Gen gen(77);
    for (const RationalMap& phi : bounded_corpus())
        for (int k = 0; k < 5; ++k) {
            const AdjointResult r = adjoint_residue(phi, g_p(2.0), gen.upper_point(3.0, 0.2, 3.0));
            EXPECT_EQ(r.backend, Backend::Residue);
            EXPECT_EQ(r.weights.size(), r.preimages_used.size());
            for (const auto& t : r.preimages_used.roots) EXPECT_GT(t.location.imag(), 0.0);
        }
}

TEST(AdjointIntegral, Examples) {
    const AdjointResult a = adjoint_integral(linear_symbol(), g_p(2.0), I);
    EXPECT_LT(std::abs(a.value - cplx{0.0, -0.25}), 1e-9);
    ASSERT_TRUE(a.quadrature.has_value());
    EXPECT_TRUE(a.quadrature->converged);

    const AdjointResult b = adjoint_integral(z_minus_inverse_symbol(), kernel(3.0 * I), I);
    EXPECT_LT(std::abs(b.value - adjoint_residue(z_minus_inverse_symbol(), kernel(3.0 * I), I).value), 1e-9);

    const RationalMap id = dilation(1.0);
    for (cplx z : {cplx{0.0, 1.0}, cplx{2.0, 0.5}}) {
        EXPECT_LT(std::abs(adjoint_integral(id, g_p(2.0), z).value - g_p(2.0)(z)), 1e-9);
        EXPECT_LT(std::abs(adjoint_residue(id, g_p(2.0), z).value - g_p(2.0)(z)), 1e-14);
    }
}

TEST(AdjointIntegral, Errors) {
    EXPECT_THROW(adjoint_integral(linear_symbol(), g_p(2.0), cplx{0.0, -1.0}), DomainError);
    EXPECT_THROW(adjoint_integral(linear_symbol(), g_p(8.0), I), DomainError);
}

TEST(AdjointBoundaryAc, Examples) {
    EXPECT_LT(std::abs(adjoint_boundary_ac(real_linear_symbol(), f_p(2.0), 5.0).value - 0.5 / 3.0), 1e-10);
    for (const BoundaryFunction& f : {g_p(2.0), kernel(cplx{1.0, 2.0})}) {
        const AdjointResult r = adjoint_boundary_ac(z_minus_inverse_symbol(), f, 0.0);
        EXPECT_LT(std::abs(r.value - (f(cplx{1.0}) + f(cplx{-1.0})) / 2.0), 1e-10);
        EXPECT_EQ(r.weights.size(), 2u);
    }
    for (double alpha : {-1.0, 0.0, 2.5}) {
        const AdjointResult r = adjoint_boundary_ac(shift_i_symbol(), g_p(2.0), alpha);
        EXPECT_LT(std::abs(r.value - g_p(2.0)(cplx{alpha, 1.0})), 1e-9) << alpha;
        EXPECT_TRUE(r.weights.empty());
    }
}

TEST(AdjointProperties, InteriorBackendAgreement) {
    for (const RationalMap& phi : bounded_corpus()) {
        const AdjointSolver solver(phi);
        for (const BoundaryFunction& f : {g_p(2.0), kernel(2.0 * I)})
            for (double x : {-1.7, 0.2, 1.3})
                for (double y : {0.4, 1.1, 2.9}) {
                    const cplx z{x, y};
                    const cplx a = solver.residue(f, z).value;
                    const cplx b = solver.integral(f, z).value;
                    EXPECT_LE(std::abs(a - b), 1e-6 * (1.0 + std::abs(a))) << z;
                }
    }
}

TEST(AdjointProperties, BoundaryBackendAgreement) {
    for (const RationalMap& phi : {real_linear_symbol(), z_minus_inverse_symbol()}) {
        const AdjointSolver solver(phi);
        for (const BoundaryFunction& f : {g_p(2.0), kernel(2.0 * I)})
            for (double alpha : {-1.0, 0.5, 2.0}) {
                const cplx boundary = solver.boundary_ac(f, alpha).value;
                double previous = INFINITY;
                double last = INFINITY;
                for (double eps : {1e-2, 1e-3, 1e-4}) {
                    const double diff = std::abs(solver.integral(f, cplx{alpha, eps}).value - boundary);
                    EXPECT_LT(diff, previous) << "alpha " << alpha << " eps " << eps;
                    previous = diff;
                    last = diff;
                }
                EXPECT_LE(last, 5e-4) << alpha;
            }
    }
}

TEST(AdjointProperties, WeightSumForInnerSymbols) {
    Gen gen(5150);
    for (const RationalMap& phi : {z_minus_inverse_symbol(), shifted_z_minus_inverse(1.0), shifted_z_minus_inverse(-0.5), two_pole_inner()}) {
        const AdjointSolver solver(phi);
        for (int k = 0; k < 25; ++k) {
            const cplx z = gen.upper_point(4.0, 0.05, 4.0);
            const AdjointResult r = solver.residue(g_p(2.0), z);
            EXPECT_LT(std::abs(sum(r.weights) - 1.0), 1e-10) << z;
        }
    }
}

TEST(AdjointProperties, LinearityInF) {
    Gen gen(64);
    const BoundaryFunction f = g_p(2.0);
    const BoundaryFunction g = kernel(cplx{0.5, 1.5});
    for (const RationalMap& phi : {linear_symbol(), z_minus_inverse_symbol(), mixed_symbol()}) {
        const AdjointSolver solver(phi);
        for (int k = 0; k < 3; ++k) {
            const cplx a = gen.complex_in_box(2.0);
            const cplx b = gen.complex_in_box(2.0);
            const BoundaryFunction h = linear_combination(a, f, b, g);
            const cplx z = gen.upper_point(2.0, 0.3, 2.0);
            for (Backend be : {Backend::Residue, Backend::Integral, Backend::AC}) {
                const cplx lhs = solver.evaluate(be, h, z);
                const cplx rhs = a * solver.evaluate(be, f, z) + b * solver.evaluate(be, g, z);
                EXPECT_LE(std::abs(lhs - rhs), 1e-10 * (1.0 + std::abs(lhs))) << to_string(be);
            }
        }
    }
}

TEST(DualityGap, Examples) {
    for (Backend be : {Backend::Residue, Backend::Integral, Backend::AC}) {
        const DualityReport a = duality_gap(linear_symbol(), kernel(I), g_p(2.0), be);
        EXPECT_LE(a.gap, 1e-6) << to_string(be);
        const DualityReport b = duality_gap(z_minus_inverse_symbol(), g_p(2.0), kernel(2.0 * I), be);
        EXPECT_LE(b.gap, 1e-6) << to_string(be);
        const DualityReport c = duality_gap(dilation(1.0), g_p(2.0), kernel(2.0 * I), be);
        EXPECT_LE(c.gap, 1e-9) << to_string(be);
    }
}

TEST(DualityGap, InnerProductAgainstClosedForm) {
    // <C_phi K_i, g_2> for phi = 2z + i is conj(C_phi* g_2 (i)) by reproduction: conj(-i/4) = i/4.
    const DualityReport r = duality_gap(linear_symbol(), kernel(I), g_p(2.0), Backend::Residue);
    EXPECT_LT(std::abs(r.lhs - std::conj(g_p(2.0)(I) / 2.0)), 1e-9);
}

TEST(IsometryDefect, Examples) {
    EXPECT_LE(isometry_defect(z_minus_inverse_symbol(), g_p(2.0)), 1e-6);
    for (double b : {-2.0, 0.5, 3.0}) EXPECT_LE(isometry_defect(real_shift(b), kernel(I)), 1e-6);
    EXPECT_NEAR(isometry_defect(dilation(2.0), g_p(2.0)), std::abs(1.0 / std::sqrt(2.0) - 1.0), 1e-6);
    EXPECT_THROW(isometry_defect(recip_symbol(), g_p(2.0)), DomainError);
}

TEST(Backend, NamesRoundTrip) {
    for (Backend b : {Backend::Residue, Backend::Integral, Backend::AC}) EXPECT_EQ(backend_from_string(to_string(b)), b);
    EXPECT_THROW(backend_from_string("bogus"), std::exception);
}
