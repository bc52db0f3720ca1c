#pragma once

#include "adspoly/qd.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <optional>

namespace adspoly {

struct SolverConfig {
    double grid_radius = 0.0;  // <= 0 picks max(4, 2 max|zero| + 3)
    int grid_size = 257;
    double newton_tol = 1e-10;
    int max_iters = 50;
    double smoothing = 1.0;
    int order = 4;  // 4: wide cross stencil, 2: five-point
};

inline double default_radius(const PolyQD& q) { return std::max(4.0, 2.0 * q.max_zero_modulus() + 3.0); }

namespace detail {

// Smooth stand-in for log|q|/2: equal to it up to exp(-|q|^2), finite at zeros.
inline double ell_smooth(double s) { return 0.25 * std::log(s + std::exp(-s)); }

// Laplacian of ell_smooth(|q|^2) for holomorphic q, in terms of s = |q|^2 and |q'|^2.
inline double lap_ell_smooth(double s, double dq2) {
    const double e = std::exp(-s), D = s + e;
    return dq2 * ((1 - e) / D + s * e / D - s * (1 - e) * (1 - e) / (D * D));
}

// Boundary and ghost data for w = u - ell_smooth when u = log|q|/2.
inline double w_far(double s) { return s > 0 ? -0.25 * std::log1p(std::exp(-s) / s) : 0.0; }

}  // namespace detail

class VortexSolution {
public:
    static constexpr int ghosts = 2;

    const PolyQD& q() const { return q_; }
    double R() const { return R_; }
    double h() const { return h_; }
    int n() const { return n_; }
    int order() const { return order_; }
    double residual_norm() const { return residual_; }
    int iterations() const { return iterations_; }
    bool converged() const { return converged_; }

    double x(int i) const { return -R_ + i * h_; }
    cplx node(int i, int j) const { return {x(i), x(j)}; }  // column i is x, row j is y
    double u(int i, int j) const { return u_(j, i); }
    const Eigen::MatrixXd& u_grid() const { return u_; }

    bool in_grid(cplx z) const { return std::abs(z.real()) <= R_ && std::abs(z.imag()) <= R_; }

    struct Local {
        double u;
        cplx u_z;
        double uhat;  // u - log|q|/2
        cplx uhat_z;
    };

    // Hermite bicubic on the smooth part, analytic reference on top.
    Local eval(cplx z) const {
        auto [qz, dq] = q_.eval_with_derivative(z);
        if (!in_grid(z)) {
            if (qz == cplx(0.0)) throw Error("vortex", "evaluation at a zero of q outside the grid");
            return {0.5 * std::log(std::abs(qz)), dq / (4.0 * qz), 0.0, 0.0};
        }
        const double s = std::norm(qz), e = std::exp(-s);
        const double ls = detail::ell_smooth(s);
        const cplx lsz = 0.25 * (1 - e) / (s + e) * dq * std::conj(qz);
        double w;
        cplx wz;
        hermite(z, w, wz);
        Local r;
        r.u = w + ls;
        r.u_z = wz + lsz;
        if (s > 0) {
            r.uhat = w + (ls - 0.5 * std::log(std::abs(qz)));
            r.uhat_z = wz + (lsz - dq / (4.0 * qz));
        } else {
            r.uhat = std::numeric_limits<double>::infinity();
            r.uhat_z = 0.0;
        }
        return r;
    }

    friend VortexSolution solve(const PolyQD&, const SolverConfig&);
    friend VortexSolution solution_from_grid(const PolyQD&, double, const Eigen::MatrixXd&);

private:
    void hermite(cplx z, double& val, cplx& dz) const {
        const double fx = (z.real() + R_) / h_, fy = (z.imag() + R_) / h_;
        const int i = std::clamp(int(std::floor(fx)), 0, n_ - 2);
        const int j = std::clamp(int(std::floor(fy)), 0, n_ - 2);
        const double tx = fx - i, ty = fy - j;
        double hx[4], dhx[4], hy[4], dhy[4];
        basis(tx, hx, dhx);
        basis(ty, hy, dhy);
        double M[4][4];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const int jj = j + a, ii = i + b;
                M[2 * a][2 * b] = w_(jj + ghosts, ii + ghosts);
                M[2 * a][2 * b + 1] = h_ * wx_(jj, ii);
                M[2 * a + 1][2 * b] = h_ * wy_(jj, ii);
                M[2 * a + 1][2 * b + 1] = h_ * h_ * wxy_(jj, ii);
            }
        double v = 0, gx = 0, gy = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                v += hy[a] * M[a][b] * hx[b];
                gx += hy[a] * M[a][b] * dhx[b];
                gy += dhy[a] * M[a][b] * hx[b];
            }
        val = v;
        dz = 0.5 * cplx(gx / h_, -gy / h_);
    }

    static void basis(double t, double* H, double* D) {
        const double t2 = t * t, t3 = t2 * t;
        H[0] = 2 * t3 - 3 * t2 + 1;
        H[1] = t3 - 2 * t2 + t;
        H[2] = -2 * t3 + 3 * t2;
        H[3] = t3 - t2;
        D[0] = 6 * t2 - 6 * t;
        D[1] = 3 * t2 - 4 * t + 1;
        D[2] = -6 * t2 + 6 * t;
        D[3] = 3 * t2 - 2 * t;
    }

    void finish() {
        const int N = n_ + 2 * ghosts;
        u_.resize(n_, n_);
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i)
                u_(j, i) = w_(j + ghosts, i + ghosts) + detail::ell_smooth(std::norm(q_(node(i, j))));
        // fourth-order nodal derivatives; the ghost layers supply the wide stencil
        auto d4 = [&](const Eigen::MatrixXd& a, int r, int c, bool along_x) {
            auto at = [&](int k) { return along_x ? a(r, c + k) : a(r + k, c); };
            return (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h_);
        };
        Eigen::MatrixXd wy = Eigen::MatrixXd::Zero(N, N);
        for (int r = ghosts; r < ghosts + n_; ++r)
            for (int c = 0; c < N; ++c) wy(r, c) = d4(w_, r, c, false);
        wx_.resize(n_, n_);
        wy_.resize(n_, n_);
        wxy_.resize(n_, n_);
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i) {
                wx_(j, i) = d4(w_, j + ghosts, i + ghosts, true);
                wy_(j, i) = wy(j + ghosts, i + ghosts);
                wxy_(j, i) = d4(wy, j + ghosts, i + ghosts, true);
            }
    }

    PolyQD q_;
    double R_ = 0, h_ = 0;
    int n_ = 0, order_ = 4;
    double residual_ = 0;
    int iterations_ = 0;
    bool converged_ = false;
    Eigen::MatrixXd w_;  // padded smooth part, rows are y
    Eigen::MatrixXd u_, wx_, wy_, wxy_;
};

inline VortexSolution solve(const PolyQD& q, const SolverConfig& cfg = {}) {
    const double R = cfg.grid_radius > 0 ? cfg.grid_radius : default_radius(q);
    const int n = cfg.grid_size;
    if (n < 33) throw Error("vortex", "grid_size must be at least 33");
    if (R < 2.0 * q.max_zero_modulus()) throw Error("vortex", "grid radius below twice the largest zero modulus");
    if (cfg.order != 2 && cfg.order != 4) throw Error("vortex", "order must be 2 or 4");
    const int G = VortexSolution::ghosts, N = n + 2 * G, m = n - 2;
    const double h = 2 * R / (n - 1);

    VortexSolution S;
    S.q_ = q;
    S.R_ = R;
    S.h_ = h;
    S.n_ = n;
    S.order_ = cfg.order;

    Eigen::MatrixXd s(N, N), ls(N, N), src(N, N);
    S.w_.resize(N, N);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            const cplx z(-R + (c - G) * h, -R + (r - G) * h);
            auto [qz, dq] = q.eval_with_derivative(z);
            s(r, c) = std::norm(qz);
            ls(r, c) = detail::ell_smooth(s(r, c));
            src(r, c) = detail::lap_ell_smooth(s(r, c), std::norm(dq));
            const bool interior = r > G && r < G + n - 1 && c > G && c < G + n - 1;
            S.w_(r, c) = interior ? 0.5 * std::log(std::sqrt(s(r, c)) + cfg.smoothing) - ls(r, c)
                                  : detail::w_far(s(r, c));
        }

    auto idx = [m](int r, int c) { return (r - G - 1) * m + (c - G - 1); };
    const double c2 = 1.0 / (h * h), c4 = 1.0 / (12 * h * h);

    auto residual = [&](const Eigen::MatrixXd& w, Eigen::VectorXd& out) {
        out.resize(m * m);
        for (int r = G + 1; r < G + n - 1; ++r)
            for (int c = G + 1; c < G + n - 1; ++c) {
                double lap;
                if (cfg.order == 2) {
                    lap = (w(r + 1, c) + w(r - 1, c) + w(r, c + 1) + w(r, c - 1) - 4 * w(r, c)) * c2;
                } else {
                    lap = (-w(r + 2, c) - w(r - 2, c) - w(r, c + 2) - w(r, c - 2) +
                           16 * (w(r + 1, c) + w(r - 1, c) + w(r, c + 1) + w(r, c - 1)) - 60 * w(r, c)) *
                          c4;
                }
                const double u = w(r, c) + ls(r, c);
                out[idx(r, c)] = lap + src(r, c) - 2 * std::exp(2 * u) + 2 * std::exp(-2 * u) * s(r, c);
            }
        return out.lpNorm<Eigen::Infinity>();
    };

    // Negated Laplacian on the unknowns, SPD; the diagonal part is added per iteration.
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(size_t(m) * m * (cfg.order == 2 ? 5 : 9));
    for (int r = G + 1; r < G + n - 1; ++r)
        for (int c = G + 1; c < G + n - 1; ++c) {
            const int k = idx(r, c);
            auto add = [&](int rr, int cc, double v) {
                if (rr > G && rr < G + n - 1 && cc > G && cc < G + n - 1) trips.emplace_back(k, idx(rr, cc), v);
            };
            if (cfg.order == 2) {
                add(r, c, 4 * c2);
                for (auto [dr, dc] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) add(r + dr, c + dc, -c2);
            } else {
                add(r, c, 60 * c4);
                for (auto [dr, dc] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                    add(r + dr, c + dc, -16 * c4);
                    add(r + 2 * dr, c + 2 * dc, c4);
                }
            }
        }
    Eigen::SparseMatrix<double> negLap(m * m, m * m);
    negLap.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd res, dw;
    double nr = residual(S.w_, res);
    int it = 0;
    for (; it < cfg.max_iters && nr >= cfg.newton_tol; ++it) {
        Eigen::SparseMatrix<double> A = negLap;
        for (int r = G + 1; r < G + n - 1; ++r)
            for (int c = G + 1; c < G + n - 1; ++c) {
                const double u = S.w_(r, c) + ls(r, c);
                A.coeffRef(idx(r, c), idx(r, c)) += 4 * std::exp(2 * u) + 4 * std::exp(-2 * u) * s(r, c);
            }
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::IncompleteCholesky<double>>
            cg;
        cg.setTolerance(1e-13);
        cg.setMaxIterations(4 * m * m);
        cg.compute(A);
        dw = cg.solve(res);
        if (cg.info() != Eigen::Success && cg.error() > 1e-8) throw Error("vortex", "linear solve failed");
        double lam = 1.0;
        Eigen::MatrixXd trial;
        Eigen::VectorXd rtrial;
        double nt;
        while (true) {
            trial = S.w_;
            for (int r = G + 1; r < G + n - 1; ++r)
                for (int c = G + 1; c < G + n - 1; ++c) trial(r, c) += lam * dw[idx(r, c)];
            nt = residual(trial, rtrial);
            if (nt < nr || lam < 1e-4) break;
            lam *= 0.5;
        }
        S.w_ = std::move(trial);
        res = std::move(rtrial);
        nr = nt;
    }
    S.residual_ = nr;
    S.iterations_ = it;
    S.converged_ = nr < cfg.newton_tol;
    if (!S.converged_) throw Error("vortex", "Newton did not converge (residual " + std::to_string(nr) + ")");
    S.finish();
    return S;
}

// Wraps an externally supplied u grid (n x n, rows are y) without solving.
inline VortexSolution solution_from_grid(const PolyQD& q, double R, const Eigen::MatrixXd& u) {
    const int n = int(u.rows());
    if (u.cols() != n || n < 5) throw Error("vortex", "grid must be square");
    const int G = VortexSolution::ghosts, N = n + 2 * G;
    VortexSolution S;
    S.q_ = q;
    S.R_ = R;
    S.n_ = n;
    S.h_ = 2 * R / (n - 1);
    S.w_.resize(N, N);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) {
            const double sv = std::norm(q(cplx(-R + (c - G) * S.h_, -R + (r - G) * S.h_)));
            const bool in = r >= G && r < G + n && c >= G && c < G + n;
            S.w_(r, c) = in ? u(r - G, c - G) - detail::ell_smooth(sv) : detail::w_far(sv);
        }
    S.converged_ = true;
    S.finish();
    return S;
}

// Stored value at grid nodes, Hermite interpolation between them, log|q|/2 outside.
inline double u_at(const VortexSolution& S, cplx z) {
    if (S.in_grid(z)) {
        const double fx = (z.real() + S.R()) / S.h(), fy = (z.imag() + S.R()) / S.h();
        const double ri = std::round(fx), rj = std::round(fy);
        if (std::abs(fx - ri) < 1e-9 && std::abs(fy - rj) < 1e-9) return S.u(int(ri), int(rj));
    }
    return S.eval(z).u;
}

struct BoundsReport {
    double max_violation = 0;  // max of log|q|/2 - u over nodes with |q| > 1e-8
    cplx worst_at{0.0};
    double min_uhat = 0;     // along the radial sample lines
    double max_increase = 0;  // largest step-to-step growth of uhat along those lines
    bool decreasing = true;
};

inline BoundsReport check_bounds(const VortexSolution& S, int lines = 16, int samples = 64) {
    BoundsReport rep;
    for (int j = 0; j < S.n(); ++j)
        for (int i = 0; i < S.n(); ++i) {
            const double aq = std::abs(S.q()(S.node(i, j)));
            if (aq <= 1e-8) continue;
            const double v = 0.5 * std::log(aq) - S.u(i, j);
            if (v > rep.max_violation) {
                rep.max_violation = v;
                rep.worst_at = S.node(i, j);
            }
        }
    if (S.q().degree() == 0) {
        rep.min_uhat = 0;
        return rep;
    }
    const double r0 = S.q().max_zero_modulus() + 1.0, r1 = S.R() - 2 * S.h();
    rep.min_uhat = std::numeric_limits<double>::infinity();
    for (int l = 0; l < lines; ++l) {
        const cplx dir = std::polar(1.0, 2 * pi * l / lines);
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= samples; ++k) {
            const double uh = S.eval((r0 + (r1 - r0) * k / samples) * dir).uhat;
            rep.min_uhat = std::min(rep.min_uhat, uh);
            if (uh - prev > rep.max_increase) rep.max_increase = uh - prev;
            prev = uh;
        }
    }
    rep.decreasing = rep.max_increase <= 1e-9;
    return rep;
}

}  // namespace adspoly
