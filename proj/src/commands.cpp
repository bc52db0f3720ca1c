// Subcommands: each reads its inputs, writes artifacts under --out and records them for the manifest.
#include "adspoly/adspoly.hpp"
#include "adspoly/commands.hpp"
#include "adspoly/io.hpp"

#include <gsl/gsl_version.h>

#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace adspoly;
namespace fs = std::filesystem;

namespace adspoly::cli {

ordered_json versions() {
    ordered_json v;
    v["adspoly"] = ADSPOLY_VERSION;
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    v["gsl"] = GSL_VERSION;
    v["compiler"] = __VERSION__;
    return v;
}

void write_manifest(const Options& o, const Run& r, int exit_code) {
    ordered_json m;
    m["command"] = r.command;
    m["config"] = r.config;
    m["config_hash"] = io::hash_hex(r.config.dump());
    m["versions"] = versions();
    m["outputs"] = r.outputs;
    m["timings"] = r.timings;
    m["exit_code"] = exit_code;
    io::write_json((fs::path(o.out) / "manifest.json").string(), m);
}

void emit(Run& r, const Options& o, const std::string& name, const std::string& text) {
    io::write_text((fs::path(o.out) / name).string(), text);
    r.outputs.push_back(name);
}

void emit(Run& r, const Options& o, const std::string& name, const ordered_json& j) { emit(r, o, name, j.dump(2) + "\n"); }

SolverConfig solver_config(const Options& o, int default_n) {
    SolverConfig c;
    c.grid_size = o.grid_size > 0 ? o.grid_size : default_n;
    c.grid_radius = o.grid_radius;
    c.newton_tol = o.tol;
    if (c.grid_size < 9 || c.grid_size % 2 == 0) throw Error("io", "--grid-size must be odd and at least 9");
    if (!(c.newton_tol > 0)) throw Error("io", "--tol must be positive");
    return c;
}

AlphaConfig alpha_config(const Options& o, int default_n) {
    AlphaConfig a;
    a.solver = solver_config(o, default_n);
    a.rays.t_max = o.ray_tmax;
    if (!(a.rays.t_max > 0)) throw Error("io", "--ray-tmax must be positive");
    return a;
}

ordered_json base_config(const Options& o, const std::string& cmd) {
    ordered_json c;
    c["command"] = cmd;
    c["grid_size"] = o.grid_size;
    c["grid_radius"] = o.grid_radius;
    c["tol"] = o.tol;
    c["ray_tmax"] = o.ray_tmax;
    c["seed"] = o.seed;
    return c;
}

// Points of a regular lattice on the grid where the flat distance to the zeros stays below limit.
std::vector<cplx> surface_points(const VortexSolution& S, int per_side, double limit) {
    std::vector<cplx> zs;
    const auto zeros = S.q().zeros();
    const double a = 0.5 * S.R();
    for (int j = 0; j < per_side; ++j)
        for (int i = 0; i < per_side; ++i) {
            const cplx z(-a + 2 * a * i / (per_side - 1), -a + 2 * a * j / (per_side - 1));
            if (zeros.empty() ? std::abs(z) <= limit : q_distance(S.q(), z, zeros) <= limit) zs.push_back(z);
        }
    return zs;
}

double lambda_max(const VortexSolution& S) {
    double m = 0;
    for (int j = 0; j < S.n(); ++j)
        for (int i = 0; i < S.n(); ++i) m = std::max(m, std::exp(-2 * S.u(i, j)) * std::abs(S.q()(S.node(i, j))));
    return m;
}

int cmd_solve(const Options& o, Run& r) {
    const PolyQD q = io::polyqd_from_json(io::read_json(o.q_file));
    r.config["q"] = io::to_json(q);
    const SolverConfig cfg = solver_config(o, 257);
    r.lap("read");
    const VortexSolution S = solve(q, cfg);
    r.lap("solve");
    ordered_json head = io::grid_header(S);
    emit(r, o, "u_grid.json", head);
    emit(r, o, "u_grid.csv", io::grid_csv(S));
    const auto ss = surface_sample(S, surface_points(S, 17, 3.0));
    emit(r, o, "surface.csv", io::surface_csv(ss));
    r.lap("surface");
    const auto b = check_bounds(S);
    ordered_json d;
    d["converged"] = S.converged();
    d["iterations"] = S.iterations();
    d["residual"] = S.residual_norm();
    d["R"] = S.R();
    d["n"] = S.n();
    d["order"] = S.order();
    d["max_abs_u"] = S.u_grid().cwiseAbs().maxCoeff();
    d["lambda_max"] = lambda_max(S);
    d["lower_bound_violation"] = b.max_violation;
    d["min_uhat"] = b.min_uhat;
    d["uhat_decreasing"] = b.decreasing;
    d["surface_samples"] = ss.size();
    emit(r, o, "diagnostics.json", d);
    r.lap("diagnostics");
    std::printf("solved degree %d on %dx%d, R = %g: %d Newton steps, residual %.2e\n", q.degree(), S.n(), S.n(), S.R(),
                S.iterations(), S.residual_norm());
    return 0;
}

int cmd_polygon(const Options& o, Run& r) {
    const PolyQD q = io::polyqd_from_json(io::read_json(o.q_file));
    r.config["q"] = io::to_json(q);
    const AlphaConfig cfg = alpha_config(o, 257);
    r.lap("read");
    const AlphaResult a = alpha(q, cfg);
    for (const auto& [k, v] : a.timings) r.timings[k] += v;
    r.clock.lap();
    emit(r, o, "polygon.json", io::to_json(a));
    emit(r, o, "polygon.svg", io::svg::torus_figure(a.polygon));
    r.lap("write");
    double nil = 0;
    for (double v : a.polygon.nilpotency) nil = std::max(nil, v);
    std::printf("%d vertices, max nilpotency proxy %.2e\n", a.polygon.size(), nil);
    return 0;
}

DefiningData read_pair(const Options& o) {
    if (o.polygon_files.size() == 1) return io::defining_data_from_json(io::read_json(o.polygon_files[0]));
    if (o.polygon_files.size() == 2)
        return {io::marked_polygon_from_json(io::read_json(o.polygon_files[0])),
                io::marked_polygon_from_json(io::read_json(o.polygon_files[1]))};
    throw Error("io", "give --polygon once (P and Q together) or twice (P, then Q)");
}

InversionConfig inversion_config(const Options& o) {
    InversionConfig c;
    c.alpha = alpha_config(o, 129);
    c.seed = o.seed;
    return c;
}

ordered_json inversion_json(const DefiningData& target, const InversionResult& res) {
    ordered_json j;
    j["target"] = {{"P", io::to_json(target.P)}, {"Q", io::to_json(target.Q)}};
    j["best_coeffs"] = io::to_json(res.q)["coeffs"];
    j["degree"] = res.q.degree();
    j["objective"] = res.objective;
    j["marking_shift"] = res.shift;
    j["evaluations"] = res.evaluations;
    j["seeds_used"] = res.seeds_used;
    j["converged"] = res.converged;
    j["per_stage_timings"] = "see manifest.json";
    return j;
}

int cmd_invert(const Options& o, Run& r) {
    DefiningData target = read_pair(o);
    if (o.offset >= 0) target.Q = target.Q.shifted(o.offset);
    r.config["polygon"] = {{"P", io::to_json(target.P)}, {"Q", io::to_json(target.Q)}};
    r.lap("read");
    const InversionResult res = invert_alpha(target, inversion_config(o));
    for (const auto& [k, v] : res.timings) r.timings["invert." + k] = v;
    r.clock.lap();
    emit(r, o, "differential.json", inversion_json(target, res));
    std::printf("degree %d, objective %.3e after %d evaluations\n", res.q.degree(), res.objective, res.evaluations);
    return res.converged ? 0 : 1;
}

int cmd_mlmap(const Options& o, Run& r) {
    const DefiningData pq = read_pair(o);
    r.config["polygon"] = {{"P", io::to_json(pq.P)}, {"Q", io::to_json(pq.Q)}};
    r.config["offset"] = o.offset;
    r.lap("read");
    PipelineConfig cfg;
    cfg.inversion = inversion_config(o);
    std::vector<int> offsets;
    if (o.offset >= 0)
        offsets.push_back(o.offset);
    else
        for (int i = 0; i < pq.P.k(); ++i) offsets.push_back(i);
    ordered_json summary = ordered_json::array();
    bool ok = true;
    for (int off : offsets) {
        const Pipeline pl = run_pipeline(pq.P, pq.Q, off, cfg);
        r.lap("pipeline." + std::to_string(pl.offset));
        const std::string stem = "mlmap_o" + std::to_string(pl.offset);
        emit(r, o, stem + ".csv", io::ml_csv(pl.ml));
        emit(r, o, stem + ".svg", io::svg::ml_figure(pq.P, pq.Q.shifted(pl.offset), pl.ml));
        double jmin = 1e300, jmax = -1e300, jsum = 0;
        for (const auto& s : pl.ml.samples) {
            jmin = std::min(jmin, s.jacobian);
            jmax = std::max(jmax, s.jacobian);
            jsum += s.jacobian;
        }
        ordered_json e;
        e["offset"] = pl.offset;
        e["differential"] = io::to_json(pl.inversion.q);
        e["objective"] = pl.inversion.objective;
        e["coupling"] = pl.coupling;
        e["jacobian"] = {{"min", jmin}, {"max", jmax}, {"mean", jsum / pl.ml.samples.size()}};
        e["max_jacobian_error"] = pl.max_jacobian_error;
        e["samples"] = stem + ".csv";
        summary.push_back(e);
        ok = ok && pl.inversion.converged;
        std::printf("offset %d: coupling", pl.offset);
        for (int c : pl.coupling) std::printf(" %d", c);
        std::printf(", jacobian in [%.6f, %.6f]\n", jmin, jmax);
    }
    emit(r, o, "mlmap.json", summary);
    return ok ? 0 : 1;
}

int cmd_horo(const Options& o, Run& r) {
    std::ostringstream csv;
    csv << "x,y,f0,f1,f2,f3,N0,N1,N2,N3,pil_re,pil_im,pir_re,pir_im\n";
    for (int j = 0; j <= 20; ++j)
        for (int i = 0; i <= 20; ++i) {
            const cplx z(-1 + 0.1 * i, -1 + 0.1 * j);
            const FrameState s = horo_frame(z);
            const cplx l = gauss_left(s), rr = gauss_right(s);
            csv << io::num(z.real()) << "," << io::num(z.imag());
            for (int k = 0; k < 4; ++k) csv << "," << io::num(s.f()[k]);
            for (int k = 0; k < 4; ++k) csv << "," << io::num(s.N()[k]);
            csv << "," << io::num(l.real()) << "," << io::num(l.imag()) << "," << io::num(rr.real()) << ","
                << io::num(rr.imag()) << "\n";
        }
    emit(r, o, "horo_surface.csv", csv.str());
    ordered_json t = ordered_json::array();
    const char* sectors[4] = {"(-pi/4, pi/4)", "(pi/4, 3pi/4)", "(3pi/4, 5pi/4)", "(-3pi/4, -pi/4)"};
    const LightLikePolygon sq = horospherical_square();
    for (int i = 0; i < 4; ++i) t.push_back({{"ray_argument", sectors[i]}, {"limit", io::to_json(sq.at(i))}});
    emit(r, o, "horo_limits.json", t);
    ordered_json m;
    auto mat = [](const Mat4& A) {
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < 4; ++i) {
            ordered_json row = ordered_json::array();
            for (int k = 0; k < 4; ++k) row.push_back({A(i, k).real(), A(i, k).imag()});
            rows.push_back(row);
        }
        return rows;
    };
    m["A0"] = mat(horo::A0());
    m["U0"] = mat(horo::U0());
    m["V0"] = mat(horo::V0());
    m["square"] = io::to_json(sq);
    const auto dd = defining_function_data(sq);
    m["P"] = io::to_json(dd.P);
    m["Q"] = io::to_json(dd.Q);
    emit(r, o, "horo_reference.json", m);
    r.lap("horo");
    std::printf("closed-form references written to %s\n", o.out.c_str());
    return 0;
}

// The invariant suite over every differential in the samples directory.
int cmd_check(const Options& o, Run& r) {
    struct Row {
        std::string sample, check;
        double value, limit;
        bool pass;
    };
    std::vector<Row> rows;
    auto add = [&](const std::string& s, const std::string& c, double v, double lim) { rows.push_back({s, c, v, lim, v <= lim}); };
    std::vector<fs::path> files;
    if (!fs::is_directory(o.samples_dir)) throw Error("io", "no samples directory " + o.samples_dir);
    for (const auto& e : fs::directory_iterator(o.samples_dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    AlphaConfig cfg = alpha_config(o, 321);
    r.config["samples"] = ordered_json::array();
    for (const auto& f : files) {
        const ordered_json j = io::read_json(f.string());
        if (!j.contains("coeffs")) continue;
        const std::string name = f.stem().string();
        r.config["samples"].push_back(name);
        const PolyQD q0 = io::polyqd_from_json(j);
        try {
            const AlphaResult a = alpha(q0, cfg);
            const PolyQD& q = a.q;
            std::shared_ptr<const VortexSolution> S = a.solution;
            if (!S) {
                SolverConfig sc = cfg.solver;
                sc.grid_radius = 4;
                S = std::make_shared<VortexSolution>(solve(q, sc));
                add(name, "max |u| (horospherical)", S->u_grid().cwiseAbs().maxCoeff(), 1e-6);
            }
            add(name, "Newton residual", S->residual_norm(), cfg.solver.newton_tol);
            add(name, "lambda - 1", lambda_max(*S) - 1, 1e-8);
            if (q.degree() >= 1) {
                const auto b = check_bounds(*S);
                add(name, "u below log|q|/2", b.max_violation, 1e-8);
                add(name, "uhat increase along rays", b.max_increase, 1e-9);
            }
            const auto& P = a.polygon;
            add(name, "vertex count off 2(d+2) by", std::abs(P.size() - 2 * (q.degree() + 2)), 0);
            double iso = 0, nul = 0, merge = 0, nil = 0;
            for (int i = 0; i < P.size(); ++i) {
                iso = std::max(iso, std::abs(inner(P.at(i), P.at(i + 1))));
                nul = std::max(nul, std::abs(inner(P.at(i), P.at(i))));
            }
            for (double v : P.merge_error) merge = std::max(merge, v);
            for (double v : P.nilpotency) nil = std::max(nil, v);
            add(name, "vertex isotropy", iso, 1e-4);
            add(name, "vertex nullity", nul, 1e-6);
            add(name, "merge error", merge, 1e-3);
            add(name, "nilpotency proxy", nil, 1e-3);
            double two = 0;
            for (int jd = 0; jd < q.degree() + 2 && !a.vees.empty(); ++jd)
                two = std::max(two, projective_distance(direct_projective_limit(*S, canonical_direction(q, jd), 10.0).point,
                                                        a.vees[jd].center()));
            add(name, "direct vs osculating", two, 1e-4);
            const FrameState s0{0.0, horo::A0()};
            const FrameState loop = integrate_frame(*S, s0, {0.0, 1.0, cplx(1, 1), I1, 0.0}, cfg.frame);
            add(name, "unit-square holonomy", max_abs(Mat4(loop.F - s0.F)), 1e-4);
            if (q.degree() >= 1) {
                const auto ml = sample_ml_map(*S, detail::ml_sample_points(*S, 12));
                double jac = 0;
                for (const auto& m : ml.samples) jac = std::max(jac, std::abs(m.jacobian - 1));
                add(name, "ML jacobian - 1", jac, 1e-3);
            }
        } catch (const Error& e) {
            rows.push_back({name, "stage " + e.stage() + " failed", 1, 0, false});
        }
        r.lap("check." + name);
    }
    ordered_json out = ordered_json::array();
    bool ok = !rows.empty();
    std::printf("%-10s %-28s %12s %10s  %s\n", "sample", "check", "value", "limit", "result");
    for (const auto& row : rows) {
        std::printf("%-10s %-28s %12.3e %10.1e  %s\n", row.sample.c_str(), row.check.c_str(), row.value, row.limit,
                    row.pass ? "pass" : "FAIL");
        out.push_back({{"sample", row.sample}, {"check", row.check}, {"value", row.value}, {"limit", row.limit}, {"pass", row.pass}});
        ok = ok && row.pass;
    }
    emit(r, o, "check.json", out);
    return ok ? 0 : 1;
}

}  // namespace adspoly::cli
