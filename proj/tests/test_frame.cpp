#include "common.hpp"

using namespace adspoly;
using namespace fixture;

TEST(Frame, ClosedFormMatchesMatrixExponential) {
    std::mt19937_64 rng(19);
    for (int k = 0; k < 20; ++k) {
        const cplx z = random_point(rng, 1.5);
        const Mat4 a = horo::frame(z), b = horo::by_exponential(z);
        EXPECT_LT(max_abs(Mat4(a - b)), 1e-12 * max_abs(b));
        EXPECT_LT(max_abs(Mat4(horo::frame_inverse(z) * a - Mat4::Identity())), 1e-12);
    }
}

TEST(Frame, HorosphericalPointAndPairings) {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 20; ++k) {
        const cplx z = random_point(rng, 1.0);
        const FrameState s = horo_frame(z);
        const double x = z.real(), y = z.imag();
        const Vec4 f(std::sinh(2 * x), std::sinh(2 * y), std::cosh(2 * x), std::cosh(2 * y));
        EXPECT_LT((s.f() - f / std::sqrt(2.0)).norm(), 1e-12);
        EXPECT_NEAR(inner(s.f(), s.f()), -1.0, 1e-12);
        EXPECT_NEAR(inner(s.N(), s.N()), -1.0, 1e-12);
        EXPECT_NEAR(inner(s.f(), s.N()), 0.0, 1e-12);
        EXPECT_LT(frame_defect(s.F), 1e-12);
    }
}

TEST(Frame, ConnectionReducesToConstantMatrices) {
    const auto c = connection_from(0.0, 0.0, 1.0);
    EXPECT_LT(max_abs(Mat4(c.U - horo::U0())), 1e-15);
    EXPECT_LT(max_abs(Mat4(c.V - horo::V0())), 1e-15);
}

TEST(Frame, IntegratedHorosphericalFrame) {
    const auto& S = solved(dz2(), 257, 4, 4.0);
    std::mt19937_64 rng(29);
    for (int k = 0; k < 12; ++k) {
        cplx z = random_point(rng, 2.0);
        if (std::abs(z) > 2) z *= 2 / std::abs(z);
        const Mat4 F = frame_at(S, z).F, F0 = horo::by_exponential(z);
        EXPECT_LT(max_abs(Mat4(F - F0)) / max_abs(F0), 1e-6) << z;
    }
}

TEST(Frame, Flatness) {
    for (const PolyQD& q : {z1(), z2()}) {
        const auto& S = solved(q);
        for (cplx z : {cplx(0.4, 0.3), cplx(-1.1, 0.8), cplx(2.0, -1.5)}) EXPECT_LT(flatness_residual(S, z, 1e-3), 1e-4) << z;
    }
}

TEST(Frame, UnitSquareHolonomy) {
    const auto& S = solved(z1(), 321);
    const FrameState a = frame_at(S, cplx(0.2, 0.1));
    const cplx z = a.z;
    const FrameState b = integrate_frame(S, a, {z, z + 1.0, z + cplx(1, 1), z + I1, z});
    EXPECT_LT(max_abs(Mat4(b.F - a.F)), 1e-4);
}

TEST(Frame, PairingDriftPerUnitLength) {
    const auto& S = solved(z2());
    IntegrationOptions o;
    o.renormalize_every = 1 << 30;  // watch the raw drift
    FrameState st{0.0, horo::A0()};
    const std::vector<cplx> path{0.0, cplx(2, 0), cplx(2, 2), cplx(-1, 2)};
    double len = 0;
    for (size_t i = 0; i + 1 < path.size(); ++i) len += std::abs(path[i + 1] - path[i]);
    st = integrate_frame(S, st, path, o);
    EXPECT_LT(frame_defect(st.F) / len, 1e-6);
}

TEST(Frame, RenormalizeShrinksDefect) {
    Mat4 F = horo::frame(cplx(0.3, -0.2));
    F(0, 1) += 1e-5;
    F(2, 3) -= 2e-5;
    const double before = frame_defect(F);
    renormalize(F);
    EXPECT_LT(frame_defect(F), 0.01 * before);
}

TEST(Frame, PathMustStartAtBase) {
    const auto& S = solved(dz2(), 257, 4, 4.0);
    EXPECT_THROW(integrate_frame(S, FrameState{0.0, horo::A0()}, {cplx(1, 0), cplx(2, 0)}), Error);
}

TEST(Frame, SurfaceSampleIsUnitAndOrthogonal) {
    const auto& S = solved(z3m1());
    const auto ss = surface_sample(S, {cplx(0.5, 0.5), cplx(-1.5, 1), cplx(2, 0.2)});
    for (const auto& s : ss) {
        EXPECT_NEAR(inner(s.f, s.f), -1.0, 1e-8);
        EXPECT_NEAR(inner(s.N, s.N), -1.0, 1e-8);
        EXPECT_NEAR(inner(s.f, s.N), 0.0, 1e-8);
        EXPECT_LE(s.lambda, 1 + 1e-8);
    }
}
