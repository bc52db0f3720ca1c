#pragma once

#include "adspoly/frame.hpp"
#include "adspoly/parallel.hpp"

namespace adspoly {

// det = 1, then positive (2,1) entry, else positive (1,1) entry.
inline Mat2 normalize_model(Mat2 M) {
    const double d = M.determinant();
    if (d == 0) throw Error("gauss", "singular matrix-model point");
    M /= std::sqrt(std::abs(d));
    if (M(1, 0) < 0 || (M(1, 0) == 0 && M(0, 0) < 0)) M = -M;
    return M;
}

// Upper half-plane fixed point of an elliptic trace-zero matrix.
inline cplx to_h2(const Mat2& M0) {
    const double nm = M0.norm();
    if (std::abs(M0.trace()) > 1e-6 * nm) throw Error("gauss", "matrix is not trace-zero");
    if (M0.determinant() <= 0) throw Error("gauss", "no fixed point in the upper half-plane");
    const Mat2 M = M0 / nm;
    const double a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
    if (c == 0) throw Error("gauss", "no fixed point in the upper half-plane");
    // c z^2 + (d - a) z - b = 0; the discriminant is negative here
    const double p = (d - a), disc = p * p + 4 * b * c;
    if (disc >= 0) throw Error("gauss", "no fixed point in the upper half-plane");
    return {-p / (2 * c), std::sqrt(-disc) / (2 * std::abs(c))};
}

// Trace-zero, det-one representative of the rotation by pi/2 about z.
inline Mat2 h2_to_matrix(cplx z) {
    if (!(z.imag() > 0)) throw Error("gauss", "point not in the upper half-plane");
    Mat2 M;
    M << z.real(), -std::norm(z), 1.0, -z.real();
    return M / z.imag();
}

inline cplx gauss_left(const Vec4& f, const Vec4& N) { return to_h2(to_matrix(f) * to_matrix(N).inverse()); }
inline cplx gauss_right(const Vec4& f, const Vec4& N) { return to_h2(to_matrix(N).inverse() * to_matrix(f)); }

inline cplx gauss_left(const FrameState& s) { return gauss_left(s.f(), s.N()); }
inline cplx gauss_right(const FrameState& s) { return gauss_right(s.f(), s.N()); }

struct GaussJet {
    cplx value;
    cplx dx, dy;

    cplx dz() const { return 0.5 * (dx - I1 * dy); }
    cplx dzbar() const { return 0.5 * (dx + I1 * dy); }
    // Signed hyperbolic area element.
    double area() const { return (dx.real() * dy.imag() - dx.imag() * dy.real()) / (value.imag() * value.imag()); }
    // Hopf differential coefficient rho(P) P_z conj(P_zbar).
    cplx hopf() const { return dz() * std::conj(dzbar()) / (value.imag() * value.imag()); }
};

struct GaussPair {
    GaussJet left, right;
};

// Central differences; neighbour frames are one RK4 step from the sample.
inline GaussPair gauss_jets(const VortexSolution& S, const FrameState& at, double step) {
    IntegrationOptions o;
    o.h_ode = step;
    auto nb = [&](cplx d) { return integrate_frame(S, at, {at.z, at.z + d}, o); };
    const FrameState xp = nb(step), xm = nb(-step), yp = nb(I1 * step), ym = nb(-I1 * step);
    GaussPair g;
    g.left.value = gauss_left(at);
    g.left.dx = (gauss_left(xp) - gauss_left(xm)) / (2 * step);
    g.left.dy = (gauss_left(yp) - gauss_left(ym)) / (2 * step);
    g.right.value = gauss_right(at);
    g.right.dx = (gauss_right(xp) - gauss_right(xm)) / (2 * step);
    g.right.dy = (gauss_right(yp) - gauss_right(ym)) / (2 * step);
    return g;
}

struct MLSample {
    cplx z;
    cplx source, target;
    double jacobian;
    cplx hopf_left, hopf_right;
    double q_distance;
};

struct MLMapSample {
    std::vector<MLSample> samples;
};

inline MLSample ml_sample_at(const VortexSolution& S, const FrameState& at, double step = 1e-4) {
    const GaussPair g = gauss_jets(S, at, step);
    MLSample s;
    s.z = at.z;
    s.source = g.left.value;
    s.target = g.right.value;
    s.jacobian = g.right.area() / g.left.area();
    s.hopf_left = g.left.hopf();
    s.hopf_right = g.right.hopf();
    s.q_distance = q_distance(S.q(), at.z);
    return s;
}

// The graph of Pi_r o Pi_l^{-1} over the sample points.
inline MLMapSample sample_ml_map(const VortexSolution& S, const std::vector<cplx>& zs, double step = 1e-4,
                                 const IntegrationOptions& io = {}) {
    MLMapSample out;
    out.samples.resize(zs.size());
    parallel_for(int(zs.size()), [&](int i) { out.samples[i] = ml_sample_at(S, frame_at(S, zs[i], io), step); });
    return out;
}

}  // namespace adspoly
