#pragma once

#include "adspoly/core.hpp"

#include <Eigen/Eigenvalues>

#include <limits>
#include <utility>
#include <vector>

namespace adspoly {

// q = (a_0 + a_1 z + ... + a_d z^d) dz^2, coefficients a_0 first.
class PolyQD {
public:
    PolyQD() : a_{cplx(1.0)} {}
    explicit PolyQD(std::vector<cplx> coeffs) : a_(std::move(coeffs)) {
        while (a_.size() > 1 && a_.back() == cplx(0.0)) a_.pop_back();
        if (a_.empty() || a_.back() == cplx(0.0)) throw Error("qd", "zero polynomial");
    }

    int degree() const { return static_cast<int>(a_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return a_; }
    cplx coeff(int i) const { return a_[i]; }
    cplx leading() const { return a_.back(); }

    bool monic() const { return std::abs(a_.back() - 1.0) <= 1e-12; }
    bool centered() const { return degree() >= 1 && std::abs(a_[degree() - 1]) <= 1e-12; }

    cplx operator()(cplx z) const {
        cplx r = 0.0;
        for (auto it = a_.rbegin(); it != a_.rend(); ++it) r = r * z + *it;
        return r;
    }

    // Value and first derivative in one Horner pass.
    std::pair<cplx, cplx> eval_with_derivative(cplx z) const {
        cplx p = 0.0, dp = 0.0;
        for (auto it = a_.rbegin(); it != a_.rend(); ++it) {
            dp = dp * z + p;
            p = p * z + *it;
        }
        return {p, dp};
    }

    // Companion-matrix eigenvalues, one Newton polish step each.
    std::vector<cplx> zeros() const {
        const int d = degree();
        std::vector<cplx> out;
        if (d == 0) return out;
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
        for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
        for (int i = 0; i < d; ++i) C(i, d - 1) = -a_[i] / a_[d];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
        for (int i = 0; i < d; ++i) {
            cplx z = es.eigenvalues()[i];
            auto [p, dp] = eval_with_derivative(z);
            if (std::abs(dp) > 0) z -= p / dp;
            out.push_back(z);
        }
        return out;
    }

    double max_zero_modulus() const {
        double m = 0;
        for (cplx z : zeros()) m = std::max(m, std::abs(z));
        return m;
    }

private:
    std::vector<cplx> a_;
};

struct AffineMap {
    cplx b{1.0};
    cplx c{0.0};
    cplx operator()(cplx z) const { return b * z + c; }
    // (*this) after `inner`: z -> b (inner(z)) + c.
    AffineMap after(const AffineMap& inner) const { return {b * inner.b, b * inner.c + c}; }
};

// Expands sum_j a_j b^{j+2} (z + c/b)^j, i.e. b^2 q(bz + c).
inline PolyQD push_forward(const PolyQD& q, const AffineMap& T) {
    if (T.b == cplx(0.0)) throw Error("qd", "affine map with b = 0");
    const int d = q.degree();
    std::vector<cplx> r{q.coeff(d)};
    for (int j = d - 1; j >= 0; --j) {
        std::vector<cplx> next(r.size() + 1, cplx(0.0));
        for (size_t k = 0; k < r.size(); ++k) {
            next[k] += r[k] * T.c;
            next[k + 1] += r[k] * T.b;
        }
        next[0] += q.coeff(j);
        r = std::move(next);
    }
    for (auto& x : r) x *= T.b * T.b;
    r.back() = q.leading() * std::pow(T.b, d + 2);  // exact leading term
    return PolyQD(std::move(r));
}

inline std::pair<PolyQD, AffineMap> normalize(const PolyQD& q) {
    const int d = q.degree();
    AffineMap T;
    T.b = std::pow(q.leading(), -1.0 / (d + 2));  // principal branch, arg in (-pi, pi]
    if (d >= 1) T.c = -q.coeff(d - 1) / (double(d) * q.leading());
    PolyQD r = push_forward(q, T);
    std::vector<cplx> a = r.coeffs();
    a.back() = 1.0;
    if (d >= 1 && std::abs(a[d - 1]) <= 1e-12) a[d - 1] = 0.0;
    return {PolyQD(std::move(a)), T};
}

inline cplx root_of_unity(int m, int j) { return std::polar(1.0, 2.0 * pi * j / m); }

inline PolyQD cyclic_action(const PolyQD& q, int j) {
    if (!q.monic() || (q.degree() >= 1 && !q.centered()))
        throw Error("qd", "cyclic_action needs a monic centered differential");
    const int m = q.degree() + 2;
    j = ((j % m) + m) % m;
    PolyQD r = push_forward(q, AffineMap{root_of_unity(m, j), 0.0});
    std::vector<cplx> a = r.coeffs();
    a.back() = 1.0;
    if (q.degree() >= 1) a[q.degree() - 1] = 0.0;
    return PolyQD(std::move(a));
}

inline double coeff_distance(const PolyQD& a, const PolyQD& b) {
    double s = 0;
    for (int i = 0; i <= a.degree(); ++i) s += std::norm(a.coeff(i) - b.coeff(i));
    return std::sqrt(s);
}

// Min over the Z_{d+2} orbit of normalized representatives.
inline double moduli_distance(const PolyQD& q1, const PolyQD& q2) {
    if (q1.degree() != q2.degree()) throw Error("qd", "degree mismatch");
    PolyQD a = normalize(q1).first, b = normalize(q2).first;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < q1.degree() + 2; ++j) best = std::min(best, coeff_distance(a, cyclic_action(b, j)));
    return best;
}

// Integral of |q|^{1/2}|dz| along the segment [z0, z1].
inline double flat_length(const PolyQD& q, cplx z0, cplx z1, int pieces = 64) {
    static const double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                0.8611363115940526};
    static const double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                0.3478548451374538};
    // t = 3s^2 - 2s^3 flattens the square-root cusp when an endpoint is a zero
    double s = 0;
    const double L = std::abs(z1 - z0);
    for (int p = 0; p < pieces; ++p) {
        double a = double(p) / pieces, b = double(p + 1) / pieces;
        for (int k = 0; k < 4; ++k) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * x[k];
            const double t = r * r * (3 - 2 * r), dt = 6 * r * (1 - r);
            s += 0.5 * (b - a) * w[k] * dt * std::sqrt(std::abs(q(z0 + t * (z1 - z0))));
        }
    }
    return s * L;
}

// Distance to the zero set in the flat metric |q||dz|^2, straight segments.
inline double q_distance(const PolyQD& q, cplx z, const std::vector<cplx>& zeros) {
    if (zeros.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (cplx z0 : zeros) best = std::min(best, flat_length(q, z0, z));
    return best;
}
inline double q_distance(const PolyQD& q, cplx z) { return q_distance(q, z, q.zeros()); }

enum class Branch { TerminalIncreasing, Seeded };

struct NaturalCoordinate {
    cplx w;
    cplx terminal_root;  // continued branch of sqrt(q) at the end of the path
};

// w = integral of sqrt(q) along the polyline with a continuous branch.
// Seeded: the branch at the start is the root closest to `seed`.
inline NaturalCoordinate natural_coordinate(const PolyQD& q, const std::vector<cplx>& path,
                                            Branch rule = Branch::TerminalIncreasing,
                                            cplx seed = 1.0, double margin = 1e-3) {
    if (path.size() < 2) return {0.0, std::sqrt(q(path.empty() ? 0.0 : path[0]))};
    static const double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                0.8611363115940526};
    static const double wt[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};
    auto zs = q.zeros();
    for (cplx z : path)
        if (q_distance(q, z, zs) < margin) throw Error("qd", "path passes through a zero");
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const cplx a = path[i], d = path[i + 1] - path[i];
        for (cplx z0 : zs) {
            const double t = std::clamp(std::real((z0 - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
            if (flat_length(q, z0, a + t * d) < margin)
                throw Error("qd", "path passes through a zero");
        }
    }
    cplx s = std::sqrt(q(path[0]));
    if (std::abs(s + seed) < std::abs(s - seed)) s = -s;
    cplx w = 0.0;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const cplx a = path[i], b = path[i + 1];
        const int pieces = std::max(8, int(64 * std::abs(b - a)));
        for (int p = 0; p < pieces; ++p) {
            double t0 = double(p) / pieces, t1 = double(p + 1) / pieces;
            for (int k = 0; k < 4; ++k) {
                double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x[k];
                cplx r = std::sqrt(q(a + t * (b - a)));
                if (std::abs(r + s) < std::abs(r - s)) r = -r;
                s = r;
                w += 0.5 * (t1 - t0) * wt[k] * r * (b - a);
            }
        }
        cplx r = std::sqrt(q(b));
        if (std::abs(r + s) < std::abs(r - s)) r = -r;
        s = r;
    }
    if (rule == Branch::TerminalIncreasing) {
        const cplx dir = path.back() - path[path.size() - 2];
        if ((s * dir).real() < 0) {
            w = -w;
            s = -s;
        }
    }
    return {w, s};
}

}  // namespace adspoly
