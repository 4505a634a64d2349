#pragma once

// Shared fixtures and independent oracles for the test suites. The finite
// difference helpers and the sublevel component counter live here so the
// derived expected values in the tests come from code that never touches
// the implementation paths they check.

#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "skewloop/loop.hpp"
#include "skewloop/pair_critical.hpp"
#include "skewloop/quadric.hpp"
#include "skewloop/trig.hpp"

namespace testutil {

using namespace skewloop;

// ----- fixtures ---------------------------------------------------------

inline TrigLoop great_circle_raw() {
    return TrigLoop(TrigPoly::harmonic(1, 1, 0), TrigPoly::harmonic(1, 0, 1), TrigPoly{});
}

inline QuadricLoop great_circle() {
    return QuadricLoop(great_circle_raw(), Quadric::sphere(), LoopMode::Exact);
}

// latitude circle at height z0 on the unit sphere
inline QuadricLoop latitude(double z0) {
    double r = std::sqrt(1.0 - z0 * z0);
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(1, r, 0), TrigPoly::harmonic(1, 0, r),
                                TrigPoly::constant(z0)),
                       Quadric::sphere(), LoopMode::Exact);
}

// generic perturbed latitude loop, normalized onto the sphere
inline QuadricLoop perturbed_latitude_sphere() {
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(1, 1, 0),
                                TrigPoly::harmonic(1, 0, 1) + TrigPoly::harmonic(2, 0.05, 0),
                                TrigPoly::constant(0.5) + TrigPoly::harmonic(3, 0, 0.1)),
                       Quadric::sphere(), LoopMode::Normalized);
}

// perturbed latitude on the upper sheet of z^2 - x^2 - y^2 = 1
inline QuadricLoop perturbed_latitude_two_sheeted() {
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(1, 1, 0) + TrigPoly::harmonic(2, 0, 0.04),
                                TrigPoly::harmonic(1, 0, 1),
                                TrigPoly::constant(2.0) + TrigPoly::harmonic(3, 0.08, 0)),
                       Quadric::two_sheeted(), LoopMode::Normalized);
}

// space-like perturbed equator on x^2 + y^2 - z^2 = 1 with a = b = 0
inline QuadricLoop space_like_one_sheeted() {
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(1, 1, 0) + TrigPoly::harmonic(2, 0.03, 0),
                                TrigPoly::harmonic(1, 0, 1),
                                TrigPoly::constant(0.25) + TrigPoly::harmonic(1, 0, 0.08)),
                       Quadric::one_sheeted(), LoopMode::Normalized);
}

// figure-eight on the sphere: raw = (sin 2t, sin t, 2 + cos t); one
// transversal double point, no antipodal crossings (z > 0)
inline QuadricLoop figure_eight_sphere() {
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(2, 0, 1), TrigPoly::harmonic(1, 0, 1),
                                TrigPoly::constant(2) + TrigPoly::harmonic(1, 1, 0)),
                       Quadric::sphere(), LoopMode::Normalized);
}

// figure-eight on the upper sheet: raw = (sin 2t, sin t, 3 + cos t)
inline QuadricLoop figure_eight_two_sheeted() {
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(2, 0, 1), TrigPoly::harmonic(1, 0, 1),
                                TrigPoly::constant(3) + TrigPoly::harmonic(1, 1, 0)),
                       Quadric::two_sheeted(), LoopMode::Normalized);
}

// doubly-winding space-like loop on the one-sheeted hyperboloid:
// raw = (cos 2t, sin 2t, 0.3 sin t); a = 1 (crossing at {0, pi}), b = 2
inline QuadricLoop double_wind_one_sheeted() {
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(2, 1, 0), TrigPoly::harmonic(2, 0, 1),
                                TrigPoly::harmonic(1, 0, 0.3)),
                       Quadric::one_sheeted(), LoopMode::Normalized);
}

// sphere loop meeting its antipodal image twice: raw = (cos t, sin t, 0.3 sin 2t)
inline QuadricLoop antipodal_sphere() {
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(1, 1, 0), TrigPoly::harmonic(1, 0, 1),
                                TrigPoly::harmonic(2, 0, 0.3)),
                       Quadric::sphere(), LoopMode::Normalized);
}

// same raw curve as a space-like loop on the one-sheeted hyperboloid
inline QuadricLoop antipodal_one_sheeted() {
    return QuadricLoop(TrigLoop(TrigPoly::harmonic(1, 1, 0), TrigPoly::harmonic(1, 0, 1),
                                TrigPoly::harmonic(2, 0, 0.3)),
                       Quadric::one_sheeted(), LoopMode::Normalized);
}

// astroid-style curve with cusps: raw = (cos^3 t, sin^3 t, 1.5)
inline TrigLoop cusp_raw() {
    // cos^3 t = (3 cos t + cos 3t)/4, sin^3 t = (3 sin t - sin 3t)/4
    return TrigLoop(TrigPoly::harmonic(1, 0.75, 0) + TrigPoly::harmonic(3, 0.25, 0),
                    TrigPoly::harmonic(1, 0, 0.75) + TrigPoly::harmonic(3, 0, -0.25),
                    TrigPoly::constant(1.5));
}

// ----- independent oracles ----------------------------------------------

// central finite differences of a scalar function of one variable
template <class F>
double fd1(F&& f, double x, double h = 1e-5) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

template <class F>
double fd2(F&& f, double x, double h = 1e-5) {
    return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
}

// mixed second difference of a two-variable function
template <class F>
double fd_mixed(F&& f, double x, double y, double h = 1e-5) {
    return (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
}

// Count connected components of {(i, j) : pred(i, j)} on an n x n torus
// grid, scanning the upper triangle with |i - j| separation. Independent
// route to the double point count.
inline int sublevel_components(int n, const std::function<bool(int, int)>& pred, int min_sep) {
    std::set<std::pair<int, int>> marked;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            int sep = std::min(j - i, n - (j - i));
            if (sep >= min_sep && pred(i, j)) marked.insert({i, j});
        }
    int components = 0;
    std::set<std::pair<int, int>> seen;
    auto canonical = [n](int i, int j) {
        i = (i % n + n) % n;
        j = (j % n + n) % n;
        return i <= j ? std::pair<int, int>{i, j} : std::pair<int, int>{j, i};
    };
    for (const auto& cell : marked) {
        if (seen.count(cell)) continue;
        ++components;
        std::vector<std::pair<int, int>> stack{cell};
        seen.insert(cell);
        while (!stack.empty()) {
            auto [i, j] = stack.back();
            stack.pop_back();
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    auto nb = canonical(i + di, j + dj);
                    if (marked.count(nb) && !seen.count(nb)) {
                        seen.insert(nb);
                        stack.push_back(nb);
                    }
                }
        }
    }
    return components;
}

}  // namespace testutil
