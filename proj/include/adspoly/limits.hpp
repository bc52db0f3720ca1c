#pragma once

#include "adspoly/frame.hpp"
#include "adspoly/parallel.hpp"
#include "adspoly/polygon.hpp"

namespace adspoly {

enum class Sector { Minus, Zero, Plus, Edge };

// Half-plane sector of a direction angle in (-pi/2, pi/2).
inline Sector classify(double angle) {
    const double a = std::abs(angle);
    if (a >= pi / 2) throw Error("limits", "angle outside the half-plane");
    if (std::abs(a - pi / 4) < 1e-15) return Sector::Edge;
    if (a < pi / 4) return Sector::Zero;
    return angle > 0 ? Sector::Plus : Sector::Minus;
}

struct RayDirection {
    int j = 0;
    double theta = 0;
};

// Directions along which q(z) dz^2 is real and positive for large |z|.
inline RayDirection canonical_direction(const PolyQD& q, int j) {
    const int m = q.degree() + 2;
    return {j, (2 * pi * j - std::arg(q.leading())) / m};
}

namespace vee {
inline const Vec4 v0 = Vec4(1, 0, 1, 0) / std::sqrt(2.0);
inline const Vec4 vplus = Vec4(0, 1, 0, 1) / std::sqrt(2.0);
inline const Vec4 vminus = Vec4(0, -1, 0, 1) / std::sqrt(2.0);
}  // namespace vee

// Theta evaluated on a unit w-velocity.
inline Mat4 theta_matrix(cplx uhat_value, cplx uhat_w, cplx velocity) {
    const cplx a = std::exp(uhat_value) - 1.0, b = std::exp(-uhat_value) - 1.0, ub = std::conj(uhat_w);
    Mat4 Tw, Tb;
    Tw << uhat_w, 0, 0, a, 0, -uhat_w, b, 0, b, 0, 0, 0, 0, a, 0, 0;
    Tb << -ub, 0, b, 0, 0, ub, 0, a, 0, b, 0, 0, a, 0, 0, 0;
    return Tw * velocity + Tb * std::conj(velocity);
}

inline bool theta_within_bound(double uhat_value, cplx uhat_w, cplx velocity) {
    const Mat4 T = theta_matrix(uhat_value, uhat_w, velocity);
    const double bound = 3 * (std::abs(uhat_value) + std::abs(uhat_w)) * std::exp(std::abs(uhat_value)) * std::abs(velocity);
    return max_abs(T) <= bound + 1e-15;
}

struct RayOptions {
    double h = 0.01;
    double t_max = 30;
    double tol = 1e-8;
    int window = 10;
    double noise_floor = 1e-12;
};

// Natural-coordinate chart at a ray basepoint. Rays are integrated with the
// basepoint at w = 0; `anchor` moves limits to the chart with w(z_start) = w0.
struct Chart {
    cplx z_start, s, w0;
    Mat4 G0;
    Mat4r anchor;
};

// A0 exp(-(U0 w + V0 wbar)) A0^{-1}, a real isometry.
inline Mat4r chart_shift(cplx w) { return Mat4(horo::frame(-w) * horo::A0().inverse()).real(); }

inline Chart make_chart(const VortexSolution& S, const FrameState& start, double theta) {
    const PolyQD& q = S.q();
    Chart c;
    c.z_start = start.z;
    const cplx dir = std::polar(1.0, theta);
    c.s = std::sqrt(q(c.z_start));
    if ((c.s * dir).real() < 0) c.s = -c.s;
    c.w0 = natural_coordinate(q, {0.0, c.z_start}, Branch::TerminalIncreasing, 1.0, 0.0).w;
    const cplx ph = std::conj(c.s) / std::abs(c.s);
    Mat4 Fw = start.F;
    Fw.col(0) *= ph;
    Fw.col(1) *= std::conj(ph);
    c.G0 = Fw * horo::A0().inverse();
    c.anchor = chart_shift(c.w0);
    return c;
}

struct RayResult {
    Mat4r L;
    double t_end = 0;
    cplx z_end;
    bool converged = false;
    double imag_max = 0;
    double isometry_defect = 0;
};

namespace detail {

inline cplx continue_root(const PolyQD& q, cplx z, cplx prev) {
    cplx r = std::sqrt(q(z));
    return std::abs(r - prev) > std::abs(r + prev) ? -r : r;
}

inline bool deep_inside(const VortexSolution& S, cplx z) {
    const double lim = S.R() - 2 * S.h();
    return std::abs(z.real()) < lim && std::abs(z.imag()) < lim;
}

}  // namespace detail

// dG = G F0 Theta F0^{-1} along w = w0 + t e^{i alpha}.
inline RayResult integrate_ray(const VortexSolution& S, const Chart& c, double alpha, const RayOptions& o = {}) {
    const cplx e = std::polar(1.0, alpha);
    struct D {
        cplx dz, s;
        Mat4 dG;
    };
    auto rhs = [&](cplx z, cplx sprev, cplx w, const Mat4& G) {
        D r;
        r.s = detail::continue_root(S.q(), z, sprev);
        r.dz = e / r.s;
        r.dG.setZero();
        if (!detail::deep_inside(S, z)) return r;
        const auto loc = S.eval(z);
        const cplx uhw = loc.uhat_z / r.s;
        if (std::abs(loc.uhat) < o.noise_floor && std::abs(uhw) < o.noise_floor) return r;
        const Mat4 T = theta_matrix(loc.uhat, uhw, e);
        const Eigen::Vector4d a = horo::exponents(w);
        Mat4 M = horo::R().adjoint() * T * horo::R();
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) M(i, k) *= std::exp(a[i] - a[k]);
        r.dG = G * (horo::A0R() * M * horo::A0R_inv());
        return r;
    };
    cplx z = c.z_start, s = c.s, w = 0.0;
    Mat4 G = c.G0;
    const double h = o.h;
    std::vector<Mat4> hist;
    RayResult res;
    double t = 0;
    while (t < o.t_max) {
        const D k1 = rhs(z, s, w, G);
        const D k2 = rhs(z + 0.5 * h * k1.dz, k1.s, w + 0.5 * h * e, G + 0.5 * h * k1.dG);
        const D k3 = rhs(z + 0.5 * h * k2.dz, k2.s, w + 0.5 * h * e, G + 0.5 * h * k2.dG);
        const D k4 = rhs(z + h * k3.dz, k3.s, w + h * e, G + h * k3.dG);
        G += h / 6 * (k1.dG + 2 * k2.dG + 2 * k3.dG + k4.dG);
        z += h / 6 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
        s = k4.s;
        w += h * e;
        t += h;
        hist.push_back(G);
        if (int(hist.size()) > o.window) {
            const Mat4& old = hist[hist.size() - 1 - o.window];
            if (max_abs(Mat4(G - old)) < o.tol * max_abs(G)) {
                res.converged = true;
                break;
            }
            if (hist.size() > size_t(4 * o.window)) hist.erase(hist.begin(), hist.end() - o.window - 1);
        }
    }
    res.L = G.real();
    res.imag_max = G.imag().cwiseAbs().maxCoeff();
    res.t_end = t;
    res.z_end = z;
    const Mat4r J = J22();
    res.isometry_defect = (res.L.transpose() * J * res.L - J).cwiseAbs().maxCoeff();
    return res;
}

struct VeeLimit {
    RayDirection dir;
    Chart chart;
    Mat4r L0, Lplus, Lminus;
    RayResult ray0, rayp, raym;

    Vec4 center() const { return projective_normalize(L0 * vee::v0); }
    Vec4 end_plus() const { return projective_normalize(Lplus * vee::vplus); }
    Vec4 end_minus() const { return projective_normalize(Lminus * vee::vminus); }
};

inline double ray_base_radius(const PolyQD& q) { return std::max(2.0, 1.5 * q.max_zero_modulus() + 1.0); }

inline VeeLimit integrate_osculating(const VortexSolution& S, const FrameState& start, const RayDirection& dir,
                                     const RayOptions& o = {}) {
    VeeLimit v;
    v.dir = dir;
    v.chart = make_chart(S, start, dir.theta);
    v.ray0 = integrate_ray(S, v.chart, 0.0, o);
    v.rayp = integrate_ray(S, v.chart, pi / 2, o);
    v.raym = integrate_ray(S, v.chart, -pi / 2, o);
    for (const RayResult* r : {&v.ray0, &v.rayp, &v.raym}) {
        if (!r->converged) throw Error("limits", "ray " + std::to_string(dir.j) + " did not settle by t_max");
        if (r->isometry_defect > 1e-5) throw Error("limits", "ray " + std::to_string(dir.j) + " left the isometry group");
    }
    v.L0 = v.ray0.L * v.chart.anchor;
    v.Lplus = v.rayp.L * v.chart.anchor;
    v.Lminus = v.raym.L * v.chart.anchor;
    return v;
}

inline std::vector<VeeLimit> compute_vees(const VortexSolution& S, const RayOptions& o = {},
                                          const IntegrationOptions& io = {}) {
    const int m = S.q().degree() + 2;
    const double R0 = ray_base_radius(S.q());
    std::vector<VeeLimit> out(m);
    parallel_for(m, [&](int j) {
        const RayDirection dir = canonical_direction(S.q(), j);
        const FrameState start = frame_at(S, std::polar(R0, dir.theta), io);
        out[j] = integrate_osculating(S, start, dir, o);
    });
    return out;
}

struct RayFrame {
    FrameState state;
    double t_reached = 0;
    bool overflow = false;
};

// Full frame along the q-ray of w-angle alpha from the canonical basepoint.
inline RayFrame frame_along_ray(const VortexSolution& S, const RayDirection& dir, double t_probe, double alpha = 0.0,
                                double h = 0.01, const IntegrationOptions& io = {}) {
    const double R0 = ray_base_radius(S.q());
    const cplx zs = std::polar(R0, dir.theta);
    const FrameState start = frame_at(S, zs, io);
    const cplx e = std::polar(1.0, alpha);
    cplx s = std::sqrt(S.q()(zs));
    if ((s * std::polar(1.0, dir.theta)).real() < 0) s = -s;
    struct D {
        cplx dz, s;
        Mat4 dF;
    };
    auto rhs = [&](cplx z, cplx sprev, const Mat4& F) {
        D r;
        r.s = detail::continue_root(S.q(), z, sprev);
        r.dz = e / r.s;
        const auto c = connection_at(S, z);
        r.dF = F * (c.U * r.dz + c.V * std::conj(r.dz));
        return r;
    };
    RayFrame out;
    out.state = start;
    cplx& z = out.state.z;
    Mat4& F = out.state.F;
    double t = 0;
    while (t < t_probe - 1e-12) {
        const double hh = std::min(h, t_probe - t);
        const D k1 = rhs(z, s, F);
        const D k2 = rhs(z + 0.5 * hh * k1.dz, k1.s, F + 0.5 * hh * k1.dF);
        const D k3 = rhs(z + 0.5 * hh * k2.dz, k2.s, F + 0.5 * hh * k2.dF);
        const D k4 = rhs(z + hh * k3.dz, k3.s, F + hh * k3.dF);
        const Mat4 Fn = F + hh / 6 * (k1.dF + 2 * k2.dF + 2 * k3.dF + k4.dF);
        if (!Fn.allFinite() || max_abs(Fn) > 1e300) {
            out.overflow = true;
            break;
        }
        F = Fn;
        z += hh / 6 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
        s = k4.s;
        t += hh;
    }
    out.t_reached = t;
    return out;
}

struct DirectLimit {
    Vec4 point;
    double t_reached = 0;
    bool overflow = false;
};

// Euclidean-normalized f at t_probe; on overflow the last finite value.
inline DirectLimit direct_projective_limit(const VortexSolution& S, const RayDirection& dir, double t_probe = 10.0,
                                           double alpha = 0.0, double h = 0.01, const IntegrationOptions& io = {}) {
    const RayFrame rf = frame_along_ray(S, dir, t_probe, alpha, h, io);
    return {projective_normalize(rf.state.f()), rf.t_reached, rf.overflow};
}

struct PolygonTolerances {
    double merge = 1e-3;
};

inline LightLikePolygon assemble_polygon(const std::vector<VeeLimit>& vees, const PolygonTolerances& tol = {}) {
    const int m = int(vees.size());
    if (m < 2) throw Error("limits", "need at least two vees");
    LightLikePolygon P;
    const Mat4 C = horo::A0R(), Ci = horo::A0R_inv();
    for (int j = 0; j < m; ++j) {
        const VeeLimit& v = vees[j];
        const VeeLimit& nx = vees[(j + 1) % m];
        P.vertices.push_back(v.center());
        P.labels.push_back(Foliation::Left);
        P.vertices.push_back(v.end_plus());
        P.labels.push_back(Foliation::Right);
        const double merr = projective_distance(v.end_plus(), nx.end_minus());
        P.merge_error.push_back(merr);
        if (merr > tol.merge)
            throw Error("limits", "vees " + std::to_string(j) + " and " + std::to_string((j + 1) % m) +
                                      " do not share an endpoint (" + std::to_string(merr) + ")");
        // basepoint chart: the anchor conjugates the transitions by a diagonal scaling
        const Mat4 Mm = Ci * Mat4(Mat4r(v.raym.L.inverse() * v.ray0.L).cast<cplx>()) * C;
        const Mat4 Mp = Ci * Mat4(Mat4r(v.ray0.L.inverse() * v.rayp.L).cast<cplx>()) * C;
        const Mat4 Id = Mat4::Identity();
        P.nilpotency.push_back(std::max(max_abs(Mat4((Mm - Id) * (Mm - Id))), max_abs(Mat4((Mp - Id) * (Mp - Id)))));
    }
    P.marked = 0;
    return P;
}

// Largest angle between L0 v+- and the adjacent-limit endpoints; diagnostic only.
inline double endpoint_truncation(const VeeLimit& v) {
    return std::max(projective_distance(v.L0 * vee::vplus, v.Lplus * vee::vplus),
                    projective_distance(v.L0 * vee::vminus, v.Lminus * vee::vminus));
}

}  // namespace adspoly
