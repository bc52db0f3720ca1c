#pragma once

#include "adspoly/core.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace adspoly {

// A line in R^2 as a homogeneous pair [a : b]; chart value a / b.
struct RP1Point {
    double a = 0, b = 1;

    static RP1Point from_homogeneous(double a, double b) {
        const double n = std::hypot(a, b);
        if (n == 0) throw Error("polygon", "zero vector is not a point of RP1");
        return {a / n, b / n};
    }
    static RP1Point from_chart(double x) {
        if (std::isinf(x)) return {1.0, 0.0};
        return from_homogeneous(x, 1.0);
    }
    // Representative angle of the line (a, b) in [0, pi).
    static RP1Point from_angle(double t) { return {std::cos(t), std::sin(t)}; }

    double angle() const {
        double t = std::atan2(b, a);
        if (t < 0) t += pi;
        if (t >= pi) t -= pi;
        return t;
    }
    double chart() const {
        if (b == 0) return std::numeric_limits<double>::infinity();
        return a / b;
    }
};

inline double bracket(const RP1Point& p, const RP1Point& q) { return p.a * q.b - p.b * q.a; }

// Angular distance between lines, in [0, pi/2].
inline double rp1_distance(const RP1Point& p, const RP1Point& q) {
    return std::asin(std::min(1.0, std::abs(bracket(p, q)) / (std::hypot(p.a, p.b) * std::hypot(q.a, q.b))));
}

// cr(p0, p1, p2, p) with cr(0, 1, inf, x) = x.
inline double cross_ratio(const RP1Point& p0, const RP1Point& p1, const RP1Point& p2, const RP1Point& p) {
    const double den = bracket(p, p2) * bracket(p1, p0);
    if (std::abs(den) < 1e-300) throw Error("polygon", "coincident points in cross-ratio");
    return bracket(p, p0) * bracket(p1, p2) / den;
}

inline RP1Point mobius(const Mat2& A, const RP1Point& p) {
    return RP1Point::from_homogeneous(A(0, 0) * p.a + A(0, 1) * p.b, A(1, 0) * p.a + A(1, 1) * p.b);
}

// The projective map sending (x0, x1, x2) to (y0, y1, y2).
inline Mat2 mobius_from_triples(const RP1Point (&x)[3], const RP1Point (&y)[3]) {
    // Sends (0, 1, inf) to (p0, p1, p2): columns are scaled p2 and p0.
    auto frame = [](const RP1Point (&p)[3]) {
        Mat2 B;
        B << p[2].a, p[0].a, p[2].b, p[0].b;
        const Eigen::Vector2d c = B.colPivHouseholderQr().solve(Eigen::Vector2d(p[1].a, p[1].b));
        B.col(0) *= c[0];
        B.col(1) *= c[1];
        return B;
    };
    return frame(y) * frame(x).inverse();
}

struct SegrePair {
    RP1Point l, r;
};

// M(xi) = u v^T; l = [u], r = [J v] with J v = (-v1, v0).
inline SegrePair segre_split(const Vec4& xi, double rank_tol = 1e-6) {
    const Mat2 M = to_matrix(xi);
    const double nn = M.squaredNorm();
    if (nn == 0) throw Error("polygon", "zero vector");
    if (std::abs(M.determinant()) > rank_tol * nn) throw Error("polygon", "matrix form is not rank one");
    const int col = M.col(0).norm() >= M.col(1).norm() ? 0 : 1;
    const int row = M.row(0).norm() >= M.row(1).norm() ? 0 : 1;
    const Eigen::Vector2d u = M.col(col), v = M.row(row).transpose();
    return {RP1Point::from_homogeneous(u[0], u[1]), RP1Point::from_homogeneous(-v[1], v[0])};
}

inline Vec4 segre_embed(const RP1Point& l, const RP1Point& r) {
    const Eigen::Vector2d u(l.a, l.b), v(r.b, -r.a);
    return projective_normalize(from_matrix(u * v.transpose()));
}

enum class Foliation { Left, Right };

inline const char* to_string(Foliation f) { return f == Foliation::Left ? "left" : "right"; }

struct LightLikePolygon {
    std::vector<Vec4> vertices;        // unit Euclidean, sign-normalized
    std::vector<Foliation> labels;     // labels[i] is the edge vertices[i] -> vertices[i+1]
    int marked = 0;
    std::vector<double> nilpotency;    // per vee, max of the two one-sided proxies
    std::vector<double> merge_error;   // per shared vertex

    int size() const { return int(vertices.size()); }
    const Vec4& at(int i) const { return vertices[((i % size()) + size()) % size()]; }
};

// Constant Segre factor of an edge, by factorization.
inline RP1Point project_edge(const LightLikePolygon& P, int edge) {
    edge = ((edge % P.size()) + P.size()) % P.size();
    const auto a = segre_split(P.at(edge)), b = segre_split(P.at(edge + 1));
    const bool left = P.labels[edge] == Foliation::Left;
    const RP1Point pa = left ? a.l : a.r, pb = left ? b.l : b.r;
    if (rp1_distance(pa, pb) > 1e-4) throw Error("polygon", "designated factor not constant along edge");
    const double sg = pa.a * pb.a + pa.b * pb.b >= 0 ? 1.0 : -1.0;
    return RP1Point::from_homogeneous(pa.a + sg * pb.a, pa.b + sg * pb.b);
}

// Same point via the trace-zero member of the pencil M_a + lambda M_b.
inline RP1Point project_edge_pencil(const LightLikePolygon& P, int edge) {
    const Mat2 Ma = to_matrix(P.at(edge)), Mb = to_matrix(P.at(edge + 1));
    Mat2 M;
    if (std::abs(Mb.trace()) > 1e-14 * Mb.norm())
        M = Ma - (Ma.trace() / Mb.trace()) * Mb;
    else
        M = Mb;
    return segre_split(from_matrix(M)).l;
}

struct MarkedIdealPolygon {
    std::vector<RP1Point> points;  // cyclic orientation order
    int marked = 0;

    int k() const { return int(points.size()); }
    const RP1Point& p(int i) const { return points[((marked + i) % k() + k()) % k()]; }
    MarkedIdealPolygon shifted(int s) const { return {points, ((marked + s) % k() + k()) % k()}; }
};

inline std::vector<double> cross_ratio_coords(const MarkedIdealPolygon& P) {
    if (P.k() < 3) throw Error("polygon", "need at least three points");
    std::vector<double> x;
    for (int j = 3; j < P.k(); ++j) x.push_back(cross_ratio(P.p(0), P.p(1), P.p(2), P.p(j)));
    return x;
}

// True if the cyclic order is consistent: cross-ratios strictly monotone and negative.
inline bool cyclically_ordered(const MarkedIdealPolygon& P) {
    auto x = cross_ratio_coords(P);
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] < 0) || !std::isfinite(x[i])) return false;
        if (i > 0 && !(x[i] > x[i - 1])) return false;
    }
    return true;
}

struct DefiningData {
    MarkedIdealPolygon P, Q;
};

// Left edges give P, right edges give Q. The marked vertex must start a left
// edge; p0 is that edge's point and q0 the right edge ending at the vertex.
inline DefiningData defining_function_data(const LightLikePolygon& D) {
    const int n = D.size();
    if (n % 2 != 0 || n < 4) throw Error("polygon", "vertex count must be even and at least 4");
    for (int i = 0; i < n; ++i)
        if (D.labels[i] == D.labels[(i + 1) % n]) throw Error("polygon", "foliation labels do not alternate");
    if (D.labels[D.marked] != Foliation::Left) throw Error("polygon", "marked vertex must start a left edge");
    DefiningData out;
    const int k = n / 2;
    for (int j = 0; j < k; ++j) {
        out.P.points.push_back(project_edge(D, D.marked + 2 * j));
        out.Q.points.push_back(project_edge(D, D.marked + 2 * j - 1 + n));
    }
    return out;
}

inline double moduli_sqdist(const DefiningData& a, const DefiningData& b, int shift) {
    auto xa = cross_ratio_coords(a.P), xb = cross_ratio_coords(b.P.shifted(shift));
    auto ya = cross_ratio_coords(a.Q), yb = cross_ratio_coords(b.Q.shifted(shift));
    double s = 0;
    for (size_t i = 0; i < xa.size(); ++i) s += (xa[i] - xb[i]) * (xa[i] - xb[i]);
    for (size_t i = 0; i < ya.size(); ++i) s += (ya[i] - yb[i]) * (ya[i] - yb[i]);
    return s;
}

// Min over diagonal marking shifts.
inline double polygon_moduli_distance(const DefiningData& a, const DefiningData& b, int* best_shift = nullptr) {
    if (a.P.k() != b.P.k()) throw Error("polygon", "vertex count mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < a.P.k(); ++s) {
        const double v = moduli_sqdist(a, b, s);
        if (v < best) {
            best = v;
            if (best_shift) *best_shift = s;
        }
    }
    return best;
}

inline double polygon_moduli_distance(const LightLikePolygon& a, const LightLikePolygon& b) {
    if (a.size() != b.size()) throw Error("polygon", "vertex count mismatch");
    return polygon_moduli_distance(defining_function_data(a), defining_function_data(b));
}

inline LightLikePolygon polygon_from_vertices(std::vector<Vec4> vs, int marked = 0) {
    LightLikePolygon P;
    for (auto& v : vs) P.vertices.push_back(projective_normalize(v));
    for (size_t i = 0; i < vs.size(); ++i)
        P.labels.push_back(((int(i) - marked) % 2 + 2) % 2 == 0 ? Foliation::Left : Foliation::Right);
    P.marked = marked;
    return P;
}

}  // namespace adspoly
