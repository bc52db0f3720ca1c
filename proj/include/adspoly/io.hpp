#pragma once

#include "adspoly/correspondence.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace adspoly::io {

using nlohmann::ordered_json;

// Shortest round-trip decimal form; identical inputs give identical bytes.
inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline ordered_json to_json(const PolyQD& q) {
    ordered_json j;
    j["degree"] = q.degree();
    j["coeffs"] = ordered_json::array();
    for (cplx a : q.coeffs()) j["coeffs"].push_back({a.real(), a.imag()});
    return j;
}

inline PolyQD polyqd_from_json(const ordered_json& j) {
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw Error("io", "differential needs a coeffs array");
    std::vector<cplx> a;
    for (const auto& c : j["coeffs"]) {
        if (c.is_number()) a.emplace_back(c.get<double>(), 0.0);
        else if (c.is_array() && c.size() == 2) a.emplace_back(c[0].get<double>(), c[1].get<double>());
        else throw Error("io", "coefficient must be a number or a [re, im] pair");
    }
    PolyQD q(std::move(a));
    if (j.contains("degree") && j["degree"].get<int>() != q.degree())
        throw Error("io", "degree field does not match the coefficient list");
    return q;
}

inline ordered_json to_json(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

inline ordered_json to_json(const MarkedIdealPolygon& P) {
    ordered_json j;
    j["points"] = ordered_json::array();
    j["charts"] = ordered_json::array();
    for (const auto& p : P.points) {
        j["points"].push_back(p.angle());
        const double c = p.chart();
        j["charts"].push_back(std::isinf(c) ? ordered_json("inf") : ordered_json(c));
    }
    j["marked"] = P.marked;
    j["cross_ratios"] = P.k() >= 3 ? ordered_json(cross_ratio_coords(P)) : ordered_json::array();
    return j;
}

inline MarkedIdealPolygon marked_polygon_from_json(const ordered_json& j) {
    MarkedIdealPolygon P;
    if (j.contains("points")) {
        for (const auto& a : j["points"]) P.points.push_back(RP1Point::from_angle(a.get<double>()));
    } else if (j.contains("charts")) {
        for (const auto& c : j["charts"])
            P.points.push_back(RP1Point::from_chart(c.is_string() ? std::numeric_limits<double>::infinity()
                                                                  : c.get<double>()));
    } else {
        throw Error("io", "marked polygon needs points (angles) or charts");
    }
    P.marked = j.value("marked", 0);
    if (P.k() < 3) throw Error("io", "marked polygon needs at least three points");
    if (P.marked < 0 || P.marked >= P.k()) throw Error("io", "marked index out of range");
    return P;
}

inline ordered_json to_json(const LightLikePolygon& D) {
    ordered_json j;
    j["vertices"] = ordered_json::array();
    for (const auto& v : D.vertices) j["vertices"].push_back(to_json(v));
    j["labels"] = ordered_json::array();
    for (auto l : D.labels) j["labels"].push_back(to_string(l));
    j["marked_index"] = D.marked;
    j["transitions_nilpotency"] = D.nilpotency;
    j["merge_error"] = D.merge_error;
    return j;
}

inline ordered_json to_json(const AlphaResult& a) {
    ordered_json j = to_json(a.polygon);
    j["differential"] = to_json(a.q);
    const auto dd = defining_function_data(a.polygon);
    j["P"] = to_json(dd.P);
    j["Q"] = to_json(dd.Q);
    j["moduli"] = a.moduli;
    return j;
}

// P and Q from a polygon file (either our polygon output or a bare {P, Q} pair).
inline DefiningData defining_data_from_json(const ordered_json& j) {
    if (j.contains("P") && j.contains("Q")) return {marked_polygon_from_json(j["P"]), marked_polygon_from_json(j["Q"])};
    if (j.contains("vertices")) {
        std::vector<Vec4> vs;
        for (const auto& v : j["vertices"]) vs.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>());
        return defining_function_data(polygon_from_vertices(vs, j.value("marked_index", 0)));
    }
    throw Error("io", "polygon file needs P and Q or vertices");
}

inline ordered_json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    try {
        return ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw Error("io", path + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path);
    out << text;
}

inline void write_json(const std::string& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

inline std::string grid_csv(const VortexSolution& S) {
    std::ostringstream o;
    for (int j = 0; j < S.n(); ++j) {
        for (int i = 0; i < S.n(); ++i) o << (i ? "," : "") << num(S.u(i, j));
        o << "\n";
    }
    return o.str();
}

inline ordered_json grid_header(const VortexSolution& S) {
    ordered_json j;
    j["R"] = S.R();
    j["n"] = S.n();
    j["degree"] = S.q().degree();
    j["coeffs"] = to_json(S.q())["coeffs"];
    j["layout"] = "row-major, row j is y = -R + j h, column i is x = -R + i h";
    return j;
}

inline std::string surface_csv(const std::vector<SurfaceSample>& ss) {
    std::ostringstream o;
    o << "x,y,f0,f1,f2,f3,N0,N1,N2,N3,u,lambda\n";
    for (const auto& s : ss) {
        o << num(s.z.real()) << "," << num(s.z.imag());
        for (int i = 0; i < 4; ++i) o << "," << num(s.f[i]);
        for (int i = 0; i < 4; ++i) o << "," << num(s.N[i]);
        o << "," << num(0.5 * std::log(s.metric)) << "," << num(s.lambda) << "\n";
    }
    return o.str();
}

inline std::string ml_csv(const MLMapSample& m) {
    std::ostringstream o;
    o << "x,y,src_re,src_im,tgt_re,tgt_im,jacobian\n";
    for (const auto& s : m.samples)
        o << num(s.z.real()) << "," << num(s.z.imag()) << "," << num(s.source.real()) << "," << num(s.source.imag())
          << "," << num(s.target.real()) << "," << num(s.target.imag()) << "," << num(s.jacobian) << "\n";
    return o.str();
}

namespace svg {

inline std::string header(int w, int h) {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
      << " " << h << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return o.str();
}

inline std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3f", v);
    return b;
}

// Unit disk point to canvas coordinates of a disk centred at (cx, cy) with radius r.
struct Disk {
    double cx, cy, r;
    std::pair<double, double> at(cplx w) const { return {cx + r * w.real(), cy - r * w.imag()}; }
};

inline cplx cayley(cplx z) { return (z - I1) / (z + I1); }
inline cplx cayley(const RP1Point& p) { return p.b == 0 ? cplx(1.0) : cayley(cplx(p.chart())); }

inline std::string ideal_polygon(const Disk& D, const MarkedIdealPolygon& P, const char* colour) {
    std::ostringstream o;
    o << "<circle cx=\"" << fmt(D.cx) << "\" cy=\"" << fmt(D.cy) << "\" r=\"" << fmt(D.r)
      << "\" fill=\"none\" stroke=\"#888\"/>\n<polygon fill=\"none\" stroke=\"" << colour << "\" points=\"";
    for (const auto& p : P.points) {
        auto [x, y] = D.at(cayley(p));
        o << fmt(x) << "," << fmt(y) << " ";
    }
    o << "\"/>\n";
    auto [mx, my] = D.at(cayley(P.p(0)));
    o << "<circle cx=\"" << fmt(mx) << "\" cy=\"" << fmt(my) << "\" r=\"4\" fill=\"" << colour << "\"/>\n";
    return o.str();
}

inline std::string cloud(const Disk& D, const std::vector<cplx>& pts, const char* colour) {
    std::ostringstream o;
    for (cplx z : pts) {
        auto [x, y] = D.at(cayley(z));
        o << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"1.5\" fill=\"" << colour << "\"/>\n";
    }
    return o.str();
}

// Source and target polygons with the sampled graph of the map.
inline std::string ml_figure(const MarkedIdealPolygon& P, const MarkedIdealPolygon& Q, const MLMapSample& m) {
    const Disk L{170, 170, 150}, R{510, 170, 150};
    std::vector<cplx> src, tgt;
    for (const auto& s : m.samples) {
        src.push_back(s.source);
        tgt.push_back(s.target);
    }
    return header(680, 340) + ideal_polygon(L, P, "#1f5fa8") + cloud(L, src, "#1f5fa8") + ideal_polygon(R, Q, "#b0412e") +
           cloud(R, tgt, "#b0412e") + "</svg>\n";
}

// The polygon on the torus of Segre angles; edges are axis-parallel.
inline std::string torus_figure(const LightLikePolygon& D) {
    const double s = 300, off = 20;
    std::ostringstream o;
    o << header(int(s + 2 * off), int(s + 2 * off));
    o << "<rect x=\"" << off << "\" y=\"" << off << "\" width=\"" << s << "\" height=\"" << s
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
    auto pos = [&](const Vec4& v) {
        const auto sp = segre_split(v);
        return std::pair<double, double>(off + s * sp.l.angle() / pi, off + s * (1 - sp.r.angle() / pi));
    };
    for (int i = 0; i < D.size(); ++i) {
        auto [x0, y0] = pos(D.at(i));
        auto [x1, y1] = pos(D.at(i + 1));
        const char* col = D.labels[i] == Foliation::Left ? "#1f5fa8" : "#b0412e";
        o << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y1)
          << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        o << "<circle cx=\"" << fmt(x0) << "\" cy=\"" << fmt(y0) << "\" r=\"" << (i == D.marked ? 5 : 3)
          << "\" fill=\"black\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace svg

// FNV-1a, for config hashes in manifests.
inline std::string hash_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char b[20];
    std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(h));
    return b;
}

}  // namespace adspoly::io
