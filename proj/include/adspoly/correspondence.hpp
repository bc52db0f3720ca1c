#pragma once

#include "adspoly/gauss.hpp"
#include "adspoly/limits.hpp"

#include <gsl/gsl_multifit_nlinear.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <chrono>
#include <map>
#include <memory>
#include <random>

namespace adspoly {

struct AlphaConfig {
    SolverConfig solver;
    RayOptions rays;
    IntegrationOptions frame;
    PolygonTolerances polygon;
};

struct AlphaResult {
    PolyQD input;
    PolyQD q;  // normalized
    AffineMap normalizer;
    std::shared_ptr<const VortexSolution> solution;  // empty for degree 0
    std::vector<VeeLimit> vees;
    LightLikePolygon polygon;
    DefiningData data;
    std::vector<double> moduli;  // P coordinates, then Q coordinates
    std::map<std::string, double> timings;
};

namespace detail {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - t_).count();
        t_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point t_ = std::chrono::steady_clock::now();
};

inline std::vector<double> moduli_vector(const DefiningData& D) {
    std::vector<double> x;
    if (D.P.k() >= 3) {
        x = cross_ratio_coords(D.P);
        const auto y = cross_ratio_coords(D.Q);
        x.insert(x.end(), y.begin(), y.end());
    }
    return x;
}

}  // namespace detail

// The light-like square of the horospherical surface.
inline LightLikePolygon horospherical_square() {
    return polygon_from_vertices({Vec4(1, 0, 1, 0), Vec4(0, 1, 0, 1), Vec4(-1, 0, 1, 0), Vec4(0, -1, 0, 1)});
}

inline AlphaResult alpha(const PolyQD& q, const AlphaConfig& cfg = {}) {
    AlphaResult r;
    detail::Stopwatch sw;
    r.input = q;
    std::tie(r.q, r.normalizer) = normalize(q);
    r.timings["normalize"] = sw.lap();
    if (r.q.degree() == 0) {
        r.polygon = horospherical_square();
        r.data = defining_function_data(r.polygon);
        return r;
    }
    auto S = std::make_shared<VortexSolution>(solve(r.q, cfg.solver));
    r.solution = S;
    r.timings["solve"] = sw.lap();
    r.vees = compute_vees(*S, cfg.rays, cfg.frame);
    r.timings["rays"] = sw.lap();
    r.polygon = assemble_polygon(r.vees, cfg.polygon);
    r.data = defining_function_data(r.polygon);
    r.moduli = detail::moduli_vector(r.data);
    r.timings["polygon"] = sw.lap();
    return r;
}

struct DimensionReport {
    int d;
    int differential_dim;  // 2(d-1)
    int polygon_dim;       // 2k - 6 with k = d + 2
    int optimizer_params;
    bool ok;
};

inline int inversion_parameter_count(int d) { return 2 * (d - 1); }

inline DimensionReport theorem_c_dimension_check(int d) {
    if (d < 1) throw Error("correspondence", "degree must be at least 1");
    DimensionReport r{d, 2 * (d - 1), 2 * (d + 2) - 6, inversion_parameter_count(d), false};
    r.ok = r.differential_dim == r.polygon_dim && r.optimizer_params == r.differential_dim;
    return r;
}

enum class Optimizer { Auto, Simplex, LeastSquares };

struct InversionConfig {
    Optimizer optimizer = Optimizer::Auto;
    AlphaConfig alpha;
    double seed_radius = 1.0;  // seeds drawn uniformly from this coefficient ball
    std::vector<double> start;  // optional first start point
    int seeds = 5;
    std::uint64_t seed = 1;
    double accept = 1e-10;  // objective value that ends the search
    double xtol = 1e-7;
    int max_evals = 600;
    double fd_step = 1e-4;
    double simplex_step = 0.1;

    InversionConfig() { alpha.solver.grid_size = 129; }
};

struct InversionResult {
    PolyQD q;
    double objective = std::numeric_limits<double>::infinity();
    int shift = 0;
    int evaluations = 0;
    int seeds_used = 0;
    bool converged = false;
    std::map<std::string, double> timings;
};

// Monic centered degree-d differential from 2(d-1) reals.
inline PolyQD differential_from_params(int d, const std::vector<double>& x) {
    std::vector<cplx> a(d + 1, cplx(0.0));
    a[d] = 1.0;
    for (int i = 0; i + 1 < d; ++i) a[i] = cplx(x[2 * i], x[2 * i + 1]);
    return PolyQD(std::move(a));
}

inline std::vector<double> params_from_differential(const PolyQD& q) {
    std::vector<double> x;
    for (int i = 0; i + 1 < q.degree(); ++i) {
        x.push_back(q.coeff(i).real());
        x.push_back(q.coeff(i).imag());
    }
    return x;
}

namespace detail {

struct Objective {
    const DefiningData& target;
    const InversionConfig& cfg;
    int d;
    int evals = 0;
    double t_alpha = 0;

    struct Value {
        double f = 1e6;
        int shift = 0;
        std::vector<double> residual;
    };

    Value operator()(const std::vector<double>& x) {
        ++evals;
        Value v;
        v.residual.assign(std::max(1, 2 * (d - 1)), 1e3);
        Stopwatch sw;
        try {
            const AlphaResult a = alpha(differential_from_params(d, x), cfg.alpha);
            v.f = polygon_moduli_distance(target, a.data, &v.shift);
            const auto xt = moduli_vector(target), xa = moduli_vector(DefiningData{a.data.P.shifted(v.shift), a.data.Q.shifted(v.shift)});
            for (size_t i = 0; i < xt.size(); ++i) v.residual[i] = xa[i] - xt[i];
        } catch (const Error&) {
            // infeasible candidate: the penalty keeps the optimizer away
        }
        t_alpha += sw.lap();
        return v;
    }
};

inline double simplex_run(Objective& obj, std::vector<double>& x, const InversionConfig& cfg) {
    const size_t p = x.size();
    struct Ctx {
        Objective* obj;
        size_t p;
    } ctx{&obj, p};
    gsl_multimin_function fn;
    fn.n = p;
    fn.params = &ctx;
    fn.f = [](const gsl_vector* v, void* params) {
        auto* c = static_cast<Ctx*>(params);
        std::vector<double> xx(c->p);
        for (size_t i = 0; i < c->p; ++i) xx[i] = gsl_vector_get(v, i);
        return (*c->obj)(xx).f;
    };
    gsl_vector* x0 = gsl_vector_alloc(p);
    gsl_vector* step = gsl_vector_alloc(p);
    for (size_t i = 0; i < p; ++i) gsl_vector_set(x0, i, x[i]);
    gsl_vector_set_all(step, cfg.simplex_step);
    gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, p);
    gsl_multimin_fminimizer_set(m, &fn, x0, step);
    while (obj.evals < cfg.max_evals) {
        if (gsl_multimin_fminimizer_iterate(m)) break;
        if (m->fval < cfg.accept) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), cfg.xtol) == GSL_SUCCESS) break;
    }
    for (size_t i = 0; i < p; ++i) x[i] = gsl_vector_get(m->x, i);
    const double f = m->fval;
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(x0);
    gsl_vector_free(step);
    return f;
}

inline double least_squares_run(Objective& obj, std::vector<double>& x, const InversionConfig& cfg) {
    const size_t p = x.size();
    struct Ctx {
        Objective* obj;
        size_t p;
    } ctx{&obj, p};
    gsl_multifit_nlinear_fdf fdf;
    fdf.f = [](const gsl_vector* v, void* params, gsl_vector* f) -> int {
        auto* c = static_cast<Ctx*>(params);
        std::vector<double> xx(c->p);
        for (size_t i = 0; i < c->p; ++i) xx[i] = gsl_vector_get(v, i);
        const auto val = (*c->obj)(xx);
        for (size_t i = 0; i < c->p; ++i) gsl_vector_set(f, i, val.residual[i]);
        return GSL_SUCCESS;
    };
    fdf.df = nullptr;  // forward-difference Jacobian
    fdf.fvv = nullptr;
    fdf.n = p;
    fdf.p = p;
    fdf.params = &ctx;
    gsl_multifit_nlinear_parameters fp = gsl_multifit_nlinear_default_parameters();
    fp.trs = gsl_multifit_nlinear_trs_lm;
    fp.h_df = cfg.fd_step;
    gsl_multifit_nlinear_workspace* w = gsl_multifit_nlinear_alloc(gsl_multifit_nlinear_trust, &fp, p, p);
    gsl_vector* x0 = gsl_vector_alloc(p);
    for (size_t i = 0; i < p; ++i) gsl_vector_set(x0, i, x[i]);
    gsl_multifit_nlinear_init(x0, &fdf, w);
    int info = 0;
    const int max_iter = std::max(1, cfg.max_evals / int(p + 1));
    gsl_multifit_nlinear_driver(max_iter, cfg.xtol, 1e-12, 1e-12, nullptr, nullptr, &info, w);
    gsl_vector* xs = gsl_multifit_nlinear_position(w);
    for (size_t i = 0; i < p; ++i) x[i] = gsl_vector_get(xs, i);
    gsl_multifit_nlinear_free(w);
    gsl_vector_free(x0);
    return obj(x).f;
}

}  // namespace detail

// alpha(cyclic_action(q, j)) carries the marking of alpha(q) moved by this many steps.
inline constexpr int equivariance_step = 1;

inline InversionResult invert_alpha(const DefiningData& target, const InversionConfig& cfg = {}) {
    const int k = target.P.k();
    if (k < 3 || target.Q.k() != k) throw Error("correspondence", "target needs two polygons with the same k >= 3");
    const int d = k - 2;
    const int p = inversion_parameter_count(d);
    if (!theorem_c_dimension_check(d).ok) throw Error("correspondence", "dimension mismatch");
    detail::Stopwatch sw;
    detail::Objective obj{target, cfg, d};
    InversionResult best;
    std::vector<double> xbest(p, 0.0);

    if (p == 0) {
        const auto v = obj({});
        best.objective = v.f;
        best.shift = v.shift;
    } else {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const Optimizer opt = cfg.optimizer != Optimizer::Auto ? cfg.optimizer
                              : d <= 2                         ? Optimizer::Simplex
                                                               : Optimizer::LeastSquares;
        for (int sidx = 0; sidx < cfg.seeds && obj.evals < cfg.max_evals * cfg.seeds; ++sidx) {
            std::vector<double> x(p);
            if (sidx == 0 && int(cfg.start.size()) == p) {
                x = cfg.start;
            } else {
                double nn = 0;
                for (auto& v : x) nn += (v = gauss(rng)) * v;
                const double r = cfg.seed_radius * std::pow(unif(rng), 1.0 / p) / std::sqrt(nn);
                for (auto& v : x) v *= r;
            }
            const int before = obj.evals;
            obj.evals = 0;
            const double f = opt == Optimizer::Simplex ? detail::simplex_run(obj, x, cfg)
                                                       : detail::least_squares_run(obj, x, cfg);
            obj.evals += before;
            ++best.seeds_used;
            if (f < best.objective) {
                best.objective = f;
                xbest = x;
            }
            if (best.objective < cfg.accept) break;
        }
        best.shift = obj(xbest).shift;
    }
    best.evaluations = obj.evals;
    best.converged = best.objective < std::max(cfg.accept, 1e-6);
    const PolyQD raw = differential_from_params(d, xbest);
    // representative whose unshifted marking matches the target
    best.q = cyclic_action(raw, equivariance_step * best.shift);
    best.timings["alpha"] = obj.t_alpha;
    best.timings["total"] = sw.lap();
    return best;
}

struct Pipeline {
    int offset = 0;
    InversionResult inversion;
    AlphaResult forward;
    MLMapSample ml;
    std::vector<int> coupling;  // P vertex j -> Q edge (q_c, q_{c+1}), c = coupling[j]
    double max_jacobian_error = 0;  // over samples at q-distance >= 1
};

struct PipelineConfig {
    InversionConfig inversion;
    double ray_probe = 4.0;   // natural length along each canonical ray for the coupling read-out
    int ml_samples = 16;
    double fd_step = 1e-4;
};

namespace detail {

inline cplx mobius_h2(const Mat2& A, cplx z) {
    const cplx w = (A(0, 0) * z + A(0, 1)) / (A(1, 0) * z + A(1, 1));
    return A.determinant() > 0 ? w : std::conj(w);
}

inline cplx cayley(const RP1Point& p) {
    if (p.b == 0) return 1.0;
    const cplx x = p.chart();
    return (x - I1) / (x + I1);
}

inline cplx cayley(cplx z) { return (z - I1) / (z + I1); }

inline int nearest_vertex(const MarkedIdealPolygon& P, cplx z) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < P.k(); ++i) {
        const double dd = std::abs(cayley(P.points[i]) - cayley(z));
        if (dd < bd) {
            bd = dd;
            best = i;
        }
    }
    return best;
}

inline Mat2 triple_map(const MarkedIdealPolygon& from, const MarkedIdealPolygon& to) {
    const RP1Point x[3] = {from.p(0), from.p(1), from.p(2)};
    const RP1Point y[3] = {to.p(0), to.p(1), to.p(2)};
    return mobius_from_triples(x, y);
}

// Sample points with q-distance in [lo, hi], spread over a golden-angle spiral.
// Farther out both area elements shrink like 1 - lambda and the ratio is solver noise.
inline std::vector<cplx> ml_sample_points(const VortexSolution& S, int count, double lo = 1.1, double hi = 2.2) {
    const auto zeros = S.q().zeros();
    std::vector<cplx> band;
    const int N = 4000;
    const double rmax = 0.7 * S.R();
    for (int i = 0; i < N; ++i) {
        const cplx z = std::polar(rmax * std::sqrt((i + 0.5) / N), 2.399963229728653 * i);
        const double d = q_distance(S.q(), z, zeros);
        if (d >= lo && d <= hi) band.push_back(z);
    }
    if (int(band.size()) < count) throw Error("correspondence", "too few sample points in the q-distance band");
    std::vector<cplx> zs;
    for (int i = 0; i < count; ++i) zs.push_back(band[(size_t(i) * band.size()) / count]);
    return zs;
}

}  // namespace detail

// Inversion, forward map, coupling read-out and ML samples for one offset of the Q marking.
inline Pipeline run_pipeline(const MarkedIdealPolygon& P, const MarkedIdealPolygon& Q, int offset,
                             const PipelineConfig& cfg = {}) {
    const int k = P.k();
    if (k < 3 || Q.k() != k) throw Error("correspondence", "need two ideal polygons with k >= 3 vertices");
    Pipeline pl;
    pl.offset = ((offset % k) + k) % k;
    const DefiningData target{P, Q.shifted(pl.offset)};
    pl.inversion = invert_alpha(target, cfg.inversion);
    pl.forward = alpha(pl.inversion.q, cfg.inversion.alpha);
    const VortexSolution& S = *pl.forward.solution;
    const Mat2 A = detail::triple_map(pl.forward.data.P, target.P);
    const Mat2 B = detail::triple_map(pl.forward.data.Q, target.Q);
    for (int j = 0; j < k; ++j) {
        const RayFrame rf = frame_along_ray(S, canonical_direction(S.q(), j), cfg.ray_probe);
        const int a = detail::nearest_vertex(P, detail::mobius_h2(A, gauss_left(rf.state)));
        const int b = detail::nearest_vertex(Q, detail::mobius_h2(B, gauss_right(rf.state)));
        if (a != (P.marked + j) % k) throw Error("correspondence", "left Gauss limit missed its vertex");
        pl.coupling.push_back(b);
    }
    pl.ml = sample_ml_map(S, detail::ml_sample_points(S, cfg.ml_samples), cfg.fd_step, cfg.inversion.alpha.frame);
    for (const auto& s : pl.ml.samples)
        if (s.q_distance >= 1.0) pl.max_jacobian_error = std::max(pl.max_jacobian_error, std::abs(s.jacobian - 1));
    return pl;
}

// One pipeline per cyclic offset of the Q marking.
inline std::vector<Pipeline> enumerate_theorem_a(const MarkedIdealPolygon& P, const MarkedIdealPolygon& Q,
                                                 const PipelineConfig& cfg = {}) {
    std::vector<Pipeline> out;
    for (int o = 0; o < P.k(); ++o) out.push_back(run_pipeline(P, Q, o, cfg));
    return out;
}

}  // namespace adspoly
