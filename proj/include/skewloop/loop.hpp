#pragma once

// Closed loops on quadrics: exact evaluation to second order, the
// double/antipodal intersection census, and the genericity report.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "skewloop/detail/numeric.hpp"
#include "skewloop/quadric.hpp"
#include "skewloop/trig.hpp"

namespace skewloop {

enum class LoopMode { Exact, Normalized };

struct LoopJet {
    Vec3 f, d1, d2;  // position, velocity, acceleration
};

class QuadricLoop {
  public:
    QuadricLoop(TrigLoop raw, Quadric quadric, LoopMode mode,
                int validation_grid = 4096, double on_quadric_tol = 1e-9)
        : raw_(std::move(raw)), quadric_(std::move(quadric)), mode_(mode) {
        d1_ = raw_.derivative();
        d2_ = d1_.derivative();
        validate(validation_grid, on_quadric_tol);
    }

    const Quadric& quadric() const { return quadric_; }
    const TrigLoop& raw() const { return raw_; }
    LoopMode mode() const { return mode_; }
    bool immersed() const { return immersed_; }
    double min_speed() const { return min_speed_; }
    double min_speed_param() const { return min_speed_param_; }
    double worst_on_quadric() const { return worst_on_quadric_; }

    Vec3 eval(double t, int order = 0) const {
        LoopJet j = jet(t);
        switch (order) {
            case 0: return j.f;
            case 1: return j.d1;
            case 2: return j.d2;
            default: throw std::invalid_argument("QuadricLoop::eval: order must be 0, 1 or 2");
        }
    }

    // All derivatives to order 2 at once. In normalized mode the quotient
    // and chain rules are applied to g / sqrt(g.g) exactly.
    LoopJet jet(double t) const {
        Vec3 g = raw_.eval(t), g1 = d1_.eval(t), g2 = d2_.eval(t);
        if (mode_ == LoopMode::Exact) return {g, g1, g2};
        const PseudoMetric& m = quadric_.metric;
        const double s = pseudo_dot(g, g, m);
        if (s <= 0)
            throw NotNormalizable("QuadricLoop: raw.raw <= 0 at t = " + std::to_string(t));
        const double s1 = 2.0 * pseudo_dot(g, g1, m);
        const double s2 = 2.0 * (pseudo_dot(g1, g1, m) + pseudo_dot(g, g2, m));
        const double u = 1.0 / std::sqrt(s);          // s^{-1/2}
        const double u1 = -0.5 * s1 * u / s;          // d/dt s^{-1/2}
        const double u2 = 0.75 * s1 * s1 * u / (s * s) - 0.5 * s2 * u / s;
        return {g * u, g1 * u + g * u1, g2 * u + 2.0 * (g1 * u1) + g * u2};
    }

  private:
    void validate(int grid, double tol) {
        min_speed_ = std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid; ++i) {
            double t = two_pi * i / grid;
            LoopJet j = jet(t);  // throws NotNormalizable with the parameter
            double err = std::fabs(pseudo_dot(j.f, j.f, quadric_.metric) - 1.0);
            worst_on_quadric_ = std::max(worst_on_quadric_, err);
            double sp = norm(j.d1);
            if (sp < min_speed_) {
                min_speed_ = sp;
                min_speed_param_ = t;
            }
        }
        if (worst_on_quadric_ > tol)
            throw std::invalid_argument("QuadricLoop: curve leaves the quadric, |f.f - 1| = " +
                                        std::to_string(worst_on_quadric_));
        immersed_ = min_speed_ > 1e-8;
    }

    TrigLoop raw_, d1_, d2_;
    Quadric quadric_;
    LoopMode mode_;
    bool immersed_ = false;
    double min_speed_ = 0, min_speed_param_ = 0, worst_on_quadric_ = 0;
};

// ---------------------------------------------------------------------------
// Intersection census
// ---------------------------------------------------------------------------

struct CensusPair {
    double s, t;        // canonical: s <= t
    bool transversal;
    double residual;    // ||f(s) -/+ f(t)|| after refinement
    double crossing_angle;
};

struct IntersectionCensus {
    std::vector<CensusPair> double_points;     // f(s) = f(t)
    std::vector<CensusPair> antipodal_points;  // f(s) = -f(t)
    int a = 0;  // transversal double points
    int b = 0;  // transversal antipodal points
    bool non_generic = false;
    bool continuum_detected = false;
    std::vector<std::string> notes;
};

namespace detail {

struct GridCache {
    std::vector<Vec3> f, d1;
    int n;
    double h;
};

inline GridCache sample_loop(const QuadricLoop& loop, int n) {
    GridCache g;
    g.n = n;
    g.h = two_pi / n;
    g.f.resize(n);
    g.d1.resize(n);
    parallel_rows(n, [&](int i) {
        LoopJet j = loop.jet(i * g.h);
        g.f[i] = j.f;
        g.d1[i] = j.d1;
    });
    return g;
}

// Gauss-Newton refinement of f(s) -/+ f(t) = 0 from a seed. Returns the
// refined pair if the residual drops below tol without leaving the seed's
// neighborhood.
inline std::optional<CensusPair> refine_coincidence(const QuadricLoop& loop, double s, double t,
                                                    int antipodal_sign, double tol,
                                                    double max_move, double min_separation) {
    const double s0 = s, t0 = t;
    for (int iter = 0; iter < 40; ++iter) {
        LoopJet js = loop.jet(s), jt = loop.jet(t);
        Vec3 r = js.f + jt.f * double(antipodal_sign);
        double res = norm(r);
        if (res <= 0.01 * tol) break;
        // normal equations for J = [f'(s), sign * f'(t)]
        Vec3 c1 = js.d1, c2 = jt.d1 * double(antipodal_sign);
        double a11 = dot(c1, c1), a12 = dot(c1, c2), a22 = dot(c2, c2);
        double b1 = -dot(c1, r), b2 = -dot(c2, r);
        double det = a11 * a22 - a12 * a12;
        if (std::fabs(det) < 1e-18) return std::nullopt;
        double ds = (b1 * a22 - b2 * a12) / det;
        double dt = (a11 * b2 - a12 * b1) / det;
        s += ds;
        t += dt;
        if (circle_dist(s, s0) > max_move || circle_dist(t, t0) > max_move) return std::nullopt;
        if (std::fabs(ds) + std::fabs(dt) < 1e-15) break;
    }
    LoopJet js = loop.jet(s), jt = loop.jet(t);
    double res = norm(js.f + jt.f * double(antipodal_sign));
    if (res > tol) return std::nullopt;
    if (circle_dist(s, t) < min_separation) return std::nullopt;
    CensusPair p;
    p.s = wrap_angle(s);
    p.t = wrap_angle(t);
    if (p.s > p.t) std::swap(p.s, p.t);
    p.residual = res;
    p.crossing_angle = line_angle(js.d1, jt.d1);
    p.transversal = p.crossing_angle > 1e-3;
    return p;
}

inline double pair_torus_dist(double s1, double t1, double s2, double t2) {
    auto d = [](double a, double b, double c, double e) {
        return std::hypot(circle_dist(a, c), circle_dist(b, e));
    };
    return std::min(d(s1, t1, s2, t2), d(s1, t1, t2, s2));
}

inline void dedup_pairs(std::vector<CensusPair>& pairs, double radius) {
    std::sort(pairs.begin(), pairs.end(), [](const CensusPair& x, const CensusPair& y) {
        return x.s != y.s ? x.s < y.s : x.t < y.t;
    });
    std::vector<CensusPair> out;
    for (const auto& p : pairs) {
        bool dup = false;
        for (const auto& kept : out) {
            if (pair_torus_dist(p.s, p.t, kept.s, kept.t) < radius) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(p);
    }
    pairs = std::move(out);
}

}  // namespace detail

// Scan the off-diagonal torus for double and antipodal coincidences,
// refine candidates, and count transversal crossings. Tangential
// (non-transversal) crossings are flagged NonGeneric, not counted.
inline IntersectionCensus census(const QuadricLoop& loop, int grid = 1024, double tol = 1e-9) {
    if (grid < 512) throw std::invalid_argument("census: grid must be >= 512");
    IntersectionCensus out;
    auto cache = detail::sample_loop(loop, grid);
    const double h = cache.h;

    double vmax = 0;
    for (const auto& v : cache.d1) vmax = std::max(vmax, norm(v));
    const double catch_radius = 3.0 * h * vmax;   // coincidences within ~3 cells of a node
    const double min_sep = 3.0 * h;

    for (int pass = 0; pass < 2; ++pass) {
        const int sign = (pass == 0) ? -1 : +1;  // -1: doubles, +1: antipodals
        auto dist2 = [&](int i, int j) {
            Vec3 r = cache.f[i] + cache.f[j] * double(sign);
            return dot(r, r);
        };
        std::vector<std::pair<int, int>> candidates;
        for (int i = 0; i < grid; ++i) {
            for (int j = i + 1; j < grid; ++j) {
                if (sign < 0 && circle_dist(i * h, j * h) < min_sep) continue;
                double d0 = dist2(i, j);
                if (d0 > catch_radius * catch_radius) continue;
                // 8-neighborhood local minimum (wrapped)
                bool is_min = true;
                for (int di = -1; di <= 1 && is_min; ++di) {
                    for (int dj = -1; dj <= 1; ++dj) {
                        if (di == 0 && dj == 0) continue;
                        int ii = (i + di + grid) % grid, jj = (j + dj + grid) % grid;
                        if (dist2(ii, jj) < d0) {
                            is_min = false;
                            break;
                        }
                    }
                }
                if (is_min) candidates.emplace_back(i, j);
            }
        }
        if (static_cast<int>(candidates.size()) > grid / 20) {
            out.continuum_detected = true;
            out.non_generic = true;
            out.notes.push_back(pass == 0 ? "double-point continuum detected"
                                          : "antipodal continuum detected (curve may coincide "
                                            "with its antipodal image)");
            continue;
        }
        std::vector<CensusPair> found;
        for (auto [i, j] : candidates) {
            auto p = detail::refine_coincidence(loop, i * h, j * h, sign, std::max(tol, 1e-10),
                                                2.0 * h, min_sep);
            if (p) found.push_back(*p);
        }
        detail::dedup_pairs(found, 1e-4);
        for (const auto& p : found) {
            if (!p.transversal) {
                out.non_generic = true;
                out.notes.push_back("non-transversal crossing near (s, t) = (" +
                                    std::to_string(p.s) + ", " + std::to_string(p.t) + ")");
            }
        }
        if (pass == 0) {
            out.double_points = std::move(found);
            for (const auto& p : out.double_points) out.a += p.transversal ? 1 : 0;
        } else {
            out.antipodal_points = std::move(found);
            for (const auto& p : out.antipodal_points) out.b += p.transversal ? 1 : 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Genericity report
// ---------------------------------------------------------------------------

struct GenericityReport {
    bool immersed = false;
    double min_speed = 0;
    double min_speed_param = 0;
    bool crossings_transversal = true;
    double min_crossing_angle = std::numeric_limits<double>::infinity();
    bool continuum_free = true;
    bool critical_nondegenerate = true;   // meaningful once solver data present
    bool has_solver_data = false;
    double min_abs_hessian_det = std::numeric_limits<double>::infinity();
    std::vector<std::string> failures;
    bool pass = false;

    // engineering thresholds, echoed into every report
    double transversality_threshold = 1e-3;   // rad
    double hessian_det_threshold = 1e-10;
    double immersion_threshold = 1e-8;
};

inline GenericityReport genericity_report(const QuadricLoop& loop,
                                          const IntersectionCensus* cen = nullptr) {
    GenericityReport r;
    r.immersed = loop.immersed();
    r.min_speed = loop.min_speed();
    r.min_speed_param = loop.min_speed_param();
    if (!r.immersed)
        r.failures.push_back("immersion fails: |f'| = " + std::to_string(r.min_speed) +
                             " at t = " + std::to_string(r.min_speed_param));
    if (cen) {
        for (const auto& lst : {cen->double_points, cen->antipodal_points}) {
            for (const auto& p : lst) {
                r.min_crossing_angle = std::min(r.min_crossing_angle, p.crossing_angle);
                if (!p.transversal) r.crossings_transversal = false;
            }
        }
        if (!r.crossings_transversal) r.failures.push_back("tangential crossing present");
        r.continuum_free = !cen->continuum_detected;
        if (!r.continuum_free) r.failures.push_back("critical continuum in census");
    }
    r.pass = r.immersed && r.crossings_transversal && r.continuum_free;
    return r;
}

// ---------------------------------------------------------------------------
// Seeded corpus generation
// ---------------------------------------------------------------------------

struct RandomLoopOptions {
    int degree = 8;
    double amplitude = 1.0;       // scales the 0.5/k^2 coefficient bound
    double z_amplitude = -1.0;    // override for the third coordinate; < 0 means amplitude
};

// Random perturbation of a horizontal circle, radially normalized onto the
// quadric. Coefficients decay like 0.5/k^2 so loops stay immersed and
// generic with high probability. base = (x0, y0, z0) offsets the circle.
inline QuadricLoop make_random_loop(const Quadric& q, std::uint64_t seed, Vec3 base,
                                    RandomLoopOptions opt = {}) {
    detail::Rng rng(seed);
    double za = opt.z_amplitude < 0 ? opt.amplitude : opt.z_amplitude;
    auto perturb = [&](double amp) {
        TrigPoly p = TrigPoly::constant(0.0);
        for (int k = 1; k <= opt.degree; ++k) {
            double bound = amp * 0.5 / (k * k);
            p = p + TrigPoly::harmonic(k, rng.uniform(-bound, bound), rng.uniform(-bound, bound));
        }
        return p;
    };
    TrigLoop raw(TrigPoly::harmonic(1, 1.0, 0.0) + TrigPoly::constant(base.x) + perturb(opt.amplitude),
                 TrigPoly::harmonic(1, 0.0, 1.0) + TrigPoly::constant(base.y) + perturb(opt.amplitude),
                 TrigPoly::constant(base.z) + perturb(za));
    return QuadricLoop(std::move(raw), q, LoopMode::Normalized);
}

}  // namespace skewloop
