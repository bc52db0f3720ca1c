#include "common.hpp"

using namespace adspoly;
using namespace fixture;

namespace {

cplx naive_eval(const PolyQD& q, cplx z) {
    cplx s = 0.0;
    for (int i = 0; i <= q.degree(); ++i) s += q.coeff(i) * std::pow(z, i);
    return s;
}

PolyQD random_poly(std::mt19937_64& rng, int d) {
    std::vector<cplx> a;
    for (int i = 0; i <= d; ++i) a.push_back(random_point(rng, 1.0));
    a.back() += 1.5;
    return PolyQD(a);
}

}  // namespace

TEST(Qd, EvaluationMatchesPowerSum) {
    std::mt19937_64 rng(3);
    for (int d = 0; d <= 6; ++d) {
        const PolyQD q = random_poly(rng, d);
        for (int k = 0; k < 10; ++k) {
            const cplx z = random_point(rng, 2.0);
            EXPECT_LT(std::abs(q(z) - naive_eval(q, z)), 1e-12 * (1 + std::abs(q(z))));
            const cplx h = 1e-6;
            const cplx fd = (naive_eval(q, z + h) - naive_eval(q, z - h)) / (2.0 * h);
            EXPECT_LT(std::abs(q.eval_with_derivative(z).second - fd), 1e-6);
        }
    }
}

TEST(Qd, TrailingZerosDropAndZeroPolynomialRejected) {
    EXPECT_EQ(PolyQD({1.0, 2.0, 0.0, 0.0}).degree(), 1);
    EXPECT_THROW(PolyQD({0.0, 0.0}), Error);
}

TEST(Qd, ZerosOfCubic) {
    const auto zs = z3m1().zeros();
    ASSERT_EQ(zs.size(), 3u);
    for (int j = 0; j < 3; ++j) {
        const cplx w = root_of_unity(3, j);
        double best = 1;
        for (cplx z : zs) best = std::min(best, std::abs(z - w));
        EXPECT_LT(best, 1e-13);
    }
    EXPECT_NEAR(z3m1().max_zero_modulus(), 1.0, 1e-13);
}

TEST(Qd, PushForwardIsPullbackFormula) {
    std::mt19937_64 rng(5);
    for (int d = 0; d <= 5; ++d) {
        const PolyQD q = random_poly(rng, d);
        const AffineMap T{random_point(rng, 1.0) + 0.5, random_point(rng, 1.0)};
        const PolyQD p = push_forward(q, T);
        EXPECT_EQ(p.degree(), d);
        for (int k = 0; k < 5; ++k) {
            const cplx z = random_point(rng, 1.5);
            const cplx want = T.b * T.b * naive_eval(q, T.b * z + T.c);
            EXPECT_LT(std::abs(p(z) - want), 1e-11 * (1 + std::abs(want)));
        }
    }
}

TEST(Qd, CompositionLaw) {
    // pulling back twice is pulling back by the composite T1 o T2
    std::mt19937_64 rng(7);
    const PolyQD q = random_poly(rng, 3);
    const AffineMap T1{cplx(0.7, 0.4), cplx(0.1, -0.3)}, T2{cplx(-0.2, 1.1), cplx(0.5, 0.2)};
    const PolyQD twice = push_forward(push_forward(q, T1), T2);
    EXPECT_LT(coeff_distance(twice, push_forward(q, T1.after(T2))), 1e-12);
    EXPECT_GT(coeff_distance(twice, push_forward(q, T2.after(T1))), 1e-3);
}

TEST(Qd, NormalizeGivesMonicCentered) {
    std::mt19937_64 rng(11);
    for (int d = 1; d <= 6; ++d) {
        const PolyQD q = random_poly(rng, d);
        const auto [n, T] = normalize(q);
        EXPECT_TRUE(n.monic());
        EXPECT_TRUE(n.centered());
        EXPECT_LT(coeff_distance(normalize(n).first, n), 1e-12);
        // the recorded map really is the normalizer
        auto a = push_forward(q, T).coeffs();
        EXPECT_LT(std::abs(a.back() - 1.0), 1e-12);
    }
}

TEST(Qd, CyclicOrbitCloses) {
    std::mt19937_64 rng(13);
    for (int d = 1; d <= 5; ++d) {
        const PolyQD q = normalize(random_poly(rng, d)).first;
        PolyQD p = q;
        for (int j = 0; j < d + 2; ++j) p = cyclic_action(p, 1);
        EXPECT_LT(coeff_distance(p, q), 1e-12);
        EXPECT_LT(coeff_distance(cyclic_action(q, 2), cyclic_action(cyclic_action(q, 1), 1)), 1e-12);
    }
    EXPECT_THROW(cyclic_action(PolyQD({0.0, 1.0, 1.0}), 1), Error);
}

TEST(Qd, ModuliDistanceMatchesBruteForceOrbit) {
    std::mt19937_64 rng(17);
    for (int d = 1; d <= 4; ++d) {
        const PolyQD q1 = random_poly(rng, d), q2 = random_poly(rng, d);
        const PolyQD n1 = normalize(q1).first, n2 = normalize(q2).first;
        // every unit b with b^{d+2} = 1, applied directly through the pullback formula
        double best = 1e300;
        for (int j = 0; j < d + 2; ++j) {
            const cplx b = std::exp(cplx(0, 2 * pi * j / (d + 2)));
            std::vector<cplx> a;
            for (int i = 0; i <= d; ++i) a.push_back(n2.coeff(i) * std::pow(b, i + 2));
            double s = 0;
            for (int i = 0; i <= d; ++i) s += std::norm(n1.coeff(i) - a[i]);
            best = std::min(best, std::sqrt(s));
        }
        EXPECT_NEAR(moduli_distance(q1, q2), best, 1e-12);
        // an affine change of coordinates does not move the moduli point
        EXPECT_LT(moduli_distance(q1, push_forward(q1, AffineMap{cplx(0.3, -0.8), cplx(0.2, 0.1)})), 1e-10);
    }
}

TEST(Qd, FlatLengthClosedForms) {
    EXPECT_NEAR(flat_length(dz2(), 0.0, cplx(3, 4)), 5.0, 1e-13);
    // integral of sqrt(t) from 0 to r
    for (double r : {0.5, 1.0, 2.5}) {
        EXPECT_NEAR(flat_length(z1(), 0.0, r), 2.0 / 3 * std::pow(r, 1.5), 1e-10);
        EXPECT_NEAR(q_distance(z1(), r), 2.0 / 3 * std::pow(r, 1.5), 1e-10);
    }
    EXPECT_TRUE(std::isinf(q_distance(dz2(), 1.0)));
}

TEST(Qd, NaturalCoordinate) {
    EXPECT_NEAR(std::abs(natural_coordinate(dz2(), {0.0, 2.5}).w - 2.5), 0.0, 1e-13);
    const auto n = natural_coordinate(z1(), {0.5, 2.0});
    EXPECT_NEAR(std::abs(n.w - 2.0 / 3 * (std::pow(2.0, 1.5) - std::pow(0.5, 1.5))), 0.0, 1e-12);
    // increasing real part along the terminal segment
    const auto back = natural_coordinate(z1(), {2.0, 0.5});
    EXPECT_GT(back.w.real(), 0);
    // reversal negates once the branch is pinned at the shared endpoint
    const auto rev = natural_coordinate(z1(), {2.0, 0.5}, Branch::Seeded, n.terminal_root);
    EXPECT_LT(std::abs(rev.w + n.w), 1e-12);
    EXPECT_THROW(natural_coordinate(z1(), {-1.0, 1.0}), Error);
}

TEST(Qd, NaturalCoordinatePathIndependentAwayFromZeros) {
    // q = z dz^2 is single-valued on the slit plane; two paths with the same ends agree
    const std::vector<cplx> a{cplx(1, 1), cplx(2, 1), cplx(2, 2)}, b{cplx(1, 1), cplx(1, 2), cplx(2, 2)};
    const auto wa = natural_coordinate(z1(), a, Branch::Seeded, std::sqrt(cplx(1, 1)));
    const auto wb = natural_coordinate(z1(), b, Branch::Seeded, std::sqrt(cplx(1, 1)));
    EXPECT_LT(std::abs(wa.w - wb.w), 1e-10);
    const cplx exact = 2.0 / 3 * (std::pow(cplx(2, 2), 1.5) - std::pow(cplx(1, 1), 1.5));
    EXPECT_LT(std::abs(wa.w - exact), 1e-10);
}
