#pragma once

#include "adspoly/vortex.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <vector>

namespace adspoly {

struct FrameState {
    cplx z{0.0};
    Mat4 F = Mat4::Identity();  // columns sigma1, sigma2, N, f

    Vec4 f() const { return F.col(3).real(); }
    Vec4 N() const { return F.col(2).real(); }
};

struct ConnectionMatrices {
    Mat4 U, V;
};

namespace horo {

inline const Mat4& A0() {
    static const Mat4 m = [] {
        Mat4 a;
        a << 1, 1, 0, 0, -I1, I1, 0, 0, 0, 0, 1, 1, 0, 0, -1, 1;
        return Mat4(a / std::sqrt(2.0));
    }();
    return m;
}

inline const Mat4& U0() {
    static const Mat4 m = [] {
        Mat4 a;
        a << 0, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0;
        return a;
    }();
    return m;
}

inline const Mat4& V0() {
    static const Mat4 m = [] {
        Mat4 a;
        a << 0, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0;
        return a;
    }();
    return m;
}

// Unitary; columns are eigenvectors of U0 z + V0 zbar in the order
// (2 Re z, 2 Im z, -2 Re z, -2 Im z).
inline const Mat4& R() {
    static const Mat4 m = [] {
        Mat4 a;
        a << 1, 1, 1, 1, 1, -1, 1, -1, 1, I1, -1, -I1, 1, -I1, -1, I1;
        return Mat4(0.5 * a);
    }();
    return m;
}

inline const Mat4& A0R() {
    static const Mat4 m = A0() * R();
    return m;
}

inline const Mat4& A0R_inv() {
    static const Mat4 m = R().adjoint() * A0().inverse();
    return m;
}

inline Eigen::Vector4d exponents(cplx w) {
    return 2.0 * Eigen::Vector4d(w.real(), w.imag(), -w.real(), -w.imag());
}

// A0 exp(U0 w + V0 wbar) in closed form.
inline Mat4 frame(cplx w) {
    const Eigen::Vector4d a = exponents(w);
    Eigen::Vector4cd d;
    for (int i = 0; i < 4; ++i) d[i] = std::exp(a[i]);
    return A0R() * d.asDiagonal() * R().adjoint();
}

inline Mat4 frame_inverse(cplx w) {
    const Eigen::Vector4d a = exponents(w);
    Eigen::Vector4cd d;
    for (int i = 0; i < 4; ++i) d[i] = std::exp(-a[i]);
    return R() * d.asDiagonal() * A0R_inv();
}

inline Vec4 point(cplx z) {
    const double x = z.real(), y = z.imag();
    return Vec4(std::sinh(2 * x), std::sinh(2 * y), std::cosh(2 * x), std::cosh(2 * y)) / std::sqrt(2.0);
}

inline Mat4 by_exponential(cplx z) {
    Mat4 X = U0() * z + V0() * std::conj(z);
    return A0() * X.exp();
}

}  // namespace horo

inline FrameState horo_frame(cplx z) { return {z, horo::frame(z)}; }
inline Vec4 horo_point(cplx z) { return horo::point(z); }

inline ConnectionMatrices connection_from(double u, cplx uz, cplx qz) {
    const double eu = std::exp(u), emu = std::exp(-u);
    const cplx ub = std::conj(uz), qb = std::conj(qz);
    ConnectionMatrices m;
    m.U << uz, 0, 0, eu, 0, -uz, qz * emu, 0, qz * emu, 0, 0, 0, 0, eu, 0, 0;
    m.V << -ub, 0, emu * qb, 0, 0, ub, 0, eu, 0, emu * qb, 0, 0, eu, 0, 0, 0;
    return m;
}

inline ConnectionMatrices connection_at(const VortexSolution& S, cplx z) {
    const auto loc = S.eval(z);
    return connection_from(loc.u, loc.u_z, S.q()(z));
}

// V_z - U_zbar + [U, V] by central differences of step eps.
inline double flatness_residual(const VortexSolution& S, cplx z, double eps) {
    auto dz = [&](auto get) {
        const Mat4 px = get(connection_at(S, z + eps)), mx = get(connection_at(S, z - eps));
        const Mat4 py = get(connection_at(S, z + I1 * eps)), my = get(connection_at(S, z - I1 * eps));
        const Mat4 gx = (px - mx) / (2 * eps), gy = (py - my) / (2 * eps);
        return std::pair<Mat4, Mat4>(0.5 * (gx - I1 * gy), 0.5 * (gx + I1 * gy));
    };
    const auto [Vz, Vzb] = dz([](const ConnectionMatrices& c) { return c.V; });
    const auto [Uz, Uzb] = dz([](const ConnectionMatrices& c) { return c.U; });
    const auto c = connection_at(S, z);
    const Mat4 K = Vz - Uzb + c.U * c.V - c.V * c.U;
    return max_abs(K);
}

// Largest deviation of F^* J F from J.
inline double frame_defect(const Mat4& F) {
    const Mat4 J = J22().cast<cplx>();
    return max_abs(Mat4(F.adjoint() * J * F - J));
}

// Pulls F back toward the frame group to first order.
inline void renormalize(Mat4& F) {
    const Mat4 J = J22().cast<cplx>();
    const Mat4 E = J * F.adjoint() * J * F - Mat4::Identity();
    F = F * (Mat4::Identity() - 0.5 * E);
}

struct IntegrationOptions {
    double h_ode = 1e-3;
    int renormalize_every = 100;
    double drift_abort = 1e-4;
};

// dF = F (U dz + V dzbar) along a polyline, RK4 with fixed step.
inline FrameState integrate_frame(const VortexSolution& S, const FrameState& start, const std::vector<cplx>& path,
                                  const IntegrationOptions& opt = {}) {
    FrameState st = start;
    if (path.empty()) return st;
    if (std::abs(path.front() - start.z) > 1e-12) throw Error("frame", "path does not start at the frame base point");
    long steps = 0;
    for (size_t p = 0; p + 1 < path.size(); ++p) {
        const cplx a = path[p], b = path[p + 1];
        const int ns = std::max(1, int(std::ceil(std::abs(b - a) / opt.h_ode)));
        const cplx dz = (b - a) / double(ns);
        auto omega = [&](cplx z) {
            const auto c = connection_at(S, z);
            return Mat4(c.U * dz + c.V * std::conj(dz));
        };
        Mat4& F = st.F;
        for (int k = 0; k < ns; ++k) {
            const cplx z = a + double(k) * dz;
            const Mat4 k1 = omega(z), k2 = omega(z + 0.5 * dz), k4 = omega(z + dz);
            const Mat4 K1 = F * k1;
            const Mat4 K2 = (F + 0.5 * K1) * k2;
            const Mat4 K3 = (F + 0.5 * K2) * k2;
            const Mat4 K4 = (F + K3) * k4;
            F += (K1 + 2 * K2 + 2 * K3 + K4) / 6.0;
            if (++steps % opt.renormalize_every == 0) {
                const double d = frame_defect(F);
                if (d > opt.drift_abort)
                    throw Error("frame", "frame drift " + std::to_string(d) + " near z = " +
                                             std::to_string(z.real()) + "," + std::to_string(z.imag()));
                renormalize(F);
            }
        }
        st.z = b;
    }
    if (frame_defect(st.F) > opt.drift_abort) throw Error("frame", "frame drift at path end");
    return st;
}

// Global frame at z: radial segment from the origin, F(0) = A0.
inline FrameState frame_at(const VortexSolution& S, cplx z, const IntegrationOptions& opt = {}) {
    return integrate_frame(S, FrameState{0.0, horo::A0()}, {0.0, z}, opt);
}

struct SurfaceSample {
    cplx z;
    Vec4 f, N;
    double metric;  // e^{2u}; the induced metric is 2 e^{2u}|dz|^2
    double lambda;  // e^{-2u}|q|
};

inline SurfaceSample sample_from_frame(const VortexSolution& S, const FrameState& st) {
    const double u = S.eval(st.z).u;
    return {st.z, st.f(), st.N(), std::exp(2 * u), std::exp(-2 * u) * std::abs(S.q()(st.z))};
}

inline std::vector<SurfaceSample> surface_sample(const VortexSolution& S, const std::vector<cplx>& zs,
                                                 const IntegrationOptions& opt = {}) {
    std::vector<SurfaceSample> out;
    out.reserve(zs.size());
    for (cplx z : zs) out.push_back(sample_from_frame(S, frame_at(S, z, opt)));
    return out;
}

}  // namespace adspoly
