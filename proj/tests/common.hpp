#pragma once

#include "adspoly/adspoly.hpp"

#include <gtest/gtest.h>

#include <map>
#include <memory>
#include <mutex>
#include <random>

namespace fixture {

using namespace adspoly;

inline PolyQD dz2() { return PolyQD({1.0}); }
inline PolyQD z1() { return PolyQD({0.0, 1.0}); }
inline PolyQD z2() { return PolyQD({0.0, 0.0, 1.0}); }
inline PolyQD z3m1() { return PolyQD({-1.0, 0.0, 0.0, 1.0}); }

// Solutions are expensive; tests in one binary share them.
inline const VortexSolution& solved(const PolyQD& q, int n = 257, int order = 4, double R = 0) {
    static std::map<std::string, std::unique_ptr<VortexSolution>> cache;
    static std::mutex m;
    std::string key = std::to_string(n) + "/" + std::to_string(order) + "/" + std::to_string(R);
    for (cplx a : q.coeffs()) key += "/" + std::to_string(a.real()) + "," + std::to_string(a.imag());
    std::lock_guard lock(m);
    auto& slot = cache[key];
    if (!slot) {
        SolverConfig cfg;
        cfg.grid_size = n;
        cfg.order = order;
        cfg.grid_radius = R;
        slot = std::make_unique<VortexSolution>(solve(q, cfg));
    }
    return *slot;
}

inline const AlphaResult& alpha_of(const PolyQD& q) {
    static std::map<std::string, std::unique_ptr<AlphaResult>> cache;
    std::string key;
    for (cplx a : q.coeffs()) key += "/" + std::to_string(a.real()) + "," + std::to_string(a.imag());
    auto& slot = cache[key];
    if (!slot) slot = std::make_unique<AlphaResult>(alpha(q));
    return *slot;
}

inline cplx random_point(std::mt19937_64& rng, double r) {
    std::uniform_real_distribution<double> u(-r, r);
    return {u(rng), u(rng)};
}

}  // namespace fixture
