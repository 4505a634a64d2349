#pragma once

// The pair function phi(s, t) = f(s) . f(t) on the torus, its critical
// points, and their classification. Off the diagonal and the coincidence
// loci, critical points are exactly the parallel-tangent pairs. The psi
// variant covers graph quadrics z = tau(x).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "skewloop/detail/numeric.hpp"
#include "skewloop/loop.hpp"
#include "skewloop/quadric.hpp"

namespace skewloop {

struct PairPoint {
    double s = 0, t = 0;

    // canonical representative of the unordered pair, angles in [0, 2*pi)
    PairPoint canonical() const {
        PairPoint p{wrap_angle(s), wrap_angle(t)};
        if (p.s > p.t) std::swap(p.s, p.t);
        return p;
    }
};

inline double torus_dist(const PairPoint& a, const PairPoint& b) {
    return detail::pair_torus_dist(a.s, a.t, b.s, b.t);
}

enum class CriticalClass { Diagonal, Double, Antipodal, ParallelTangent, Degenerate };

inline const char* to_string(CriticalClass c) {
    switch (c) {
        case CriticalClass::Diagonal: return "diagonal";
        case CriticalClass::Double: return "double";
        case CriticalClass::Antipodal: return "antipodal";
        case CriticalClass::ParallelTangent: return "parallel_tangent";
        case CriticalClass::Degenerate: return "degenerate";
    }
    return "?";
}

struct CriticalPointRecord {
    PairPoint location;
    double value = 0;
    CriticalClass cls = CriticalClass::Degenerate;
    int morse_index = -1;  // -1 = undefined (degenerate)
    std::array<double, 2> hessian_eigenvalues{0, 0};
    double gradient_residual = 0;
};

// ---------------------------------------------------------------------------
// phi and its exact derivatives
// ---------------------------------------------------------------------------

inline double phi(const QuadricLoop& loop, const PairPoint& p) {
    return pseudo_dot(loop.eval(p.s), loop.eval(p.t), loop.quadric().metric);
}

inline std::array<double, 2> phi_grad(const QuadricLoop& loop, const PairPoint& p) {
    const PseudoMetric& m = loop.quadric().metric;
    LoopJet a = loop.jet(p.s), b = loop.jet(p.t);
    return {pseudo_dot(a.d1, b.f, m), pseudo_dot(a.f, b.d1, m)};
}

// symmetric 2x2 Hessian as (h_ss, h_st, h_tt)
inline std::array<double, 3> phi_hess(const QuadricLoop& loop, const PairPoint& p) {
    const PseudoMetric& m = loop.quadric().metric;
    LoopJet a = loop.jet(p.s), b = loop.jet(p.t);
    return {pseudo_dot(a.d2, b.f, m), pseudo_dot(a.d1, b.d1, m), pseudo_dot(a.f, b.d2, m)};
}

// ---------------------------------------------------------------------------
// Torus critical-point solver (shared by phi and psi)
// ---------------------------------------------------------------------------

struct SolveOptions {
    int grid = 512;                  // seed lattice per axis
    double newton_tol = 1e-12;       // ||grad|| convergence target
    double band = 0.02;              // diagonal exclusion band (torus distance)
    double dedup_radius = 1e-4;
    double census_match_radius = 1e-4;
    double degenerate_det_tol = 1e-10;
    double coincidence_tol = 1e-7;   // ||f(s) -/+ f(t)|| fallback classification
    double parallel_angle_tol = 1e-6;
    int max_iterations = 50;
    int max_halvings = 20;
};

struct CriticalPointResult {
    std::vector<CriticalPointRecord> records;
    bool non_generic = false;
    bool degenerate_family = false;   // continuum of degenerate points summarized
    int discarded_seeds = 0;
    int diagonal_hits = 0;            // converged points inside the exclusion band
    std::vector<std::string> notes;
};

namespace detail {

struct RawCritical {
    double s, t;
    double residual;
};

// Damped Newton on an arbitrary 2-D gradient field over the torus.
// GradFn: (s, t) -> {g1, g2}; HessFn: (s, t) -> {h11, h12, h22}.
template <class GradFn, class HessFn>
std::optional<RawCritical> newton_torus(GradFn&& grad, HessFn&& hess, double s, double t,
                                        const SolveOptions& opt) {
    auto gnorm = [&](double u, double v) {
        auto g = grad(u, v);
        return std::hypot(g[0], g[1]);
    };
    double gn = gnorm(s, t);
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        if (gn <= opt.newton_tol) return RawCritical{wrap_angle(s), wrap_angle(t), gn};
        auto g = grad(s, t);
        auto h = hess(s, t);
        double det = h[0] * h[2] - h[1] * h[1];
        double ds, dt;
        if (std::fabs(det) > 1e-14 * (std::fabs(h[0]) + std::fabs(h[2]) + 1e-30)) {
            ds = (-g[0] * h[2] + g[1] * h[1]) / det;
            dt = (-h[0] * g[1] + h[1] * g[0]) / det;
        } else {
            // singular Hessian: fall back to a gradient step
            double sc = 1.0 / std::max(1.0, gn);
            ds = -g[0] * sc;
            dt = -g[1] * sc;
        }
        // step halving
        double lambda = 1.0;
        double gn_new = gnorm(s + ds, t + dt);
        int halvings = 0;
        while (gn_new > gn && halvings < opt.max_halvings) {
            lambda *= 0.5;
            gn_new = gnorm(s + lambda * ds, t + lambda * dt);
            ++halvings;
        }
        if (gn_new > gn) return std::nullopt;  // no descent: diverged seed
        s += lambda * ds;
        t += lambda * dt;
        gn = gn_new;
    }
    if (gn <= opt.newton_tol) return RawCritical{wrap_angle(s), wrap_angle(t), gn};
    return std::nullopt;
}

// Seed cells where both gradient components change sign or are small, then
// Newton from each; deduplicate canonically under (s,t) <-> (t,s).
template <class GradFn, class HessFn>
std::vector<RawCritical> solve_torus(GradFn&& grad, HessFn&& hess, const SolveOptions& opt,
                                     int* discarded, int* diagonal_hits) {
    const int n = opt.grid;
    const double h = two_pi / n;
    std::vector<double> g1((n + 1) * (n + 1)), g2((n + 1) * (n + 1));
    parallel_rows(n + 1, [&](int i) {
        for (int j = 0; j <= n; ++j) {
            auto g = grad(i * h, j * h);
            g1[i * (n + 1) + j] = g[0];
            g2[i * (n + 1) + j] = g[1];
        }
    });
    double gmax = 0;
    for (double v : g1) gmax = std::max(gmax, std::fabs(v));
    for (double v : g2) gmax = std::max(gmax, std::fabs(v));
    const double small = 1e-3 * gmax;

    std::vector<std::pair<double, double>> seeds;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double cs = (i + 0.5) * h, ct = (j + 0.5) * h;
            if (circle_dist(cs, ct) <= opt.band) continue;  // diagonal band: not a pair candidate
            std::array<double, 4> c1{g1[i * (n + 1) + j], g1[(i + 1) * (n + 1) + j],
                                     g1[i * (n + 1) + j + 1], g1[(i + 1) * (n + 1) + j + 1]};
            std::array<double, 4> c2{g2[i * (n + 1) + j], g2[(i + 1) * (n + 1) + j],
                                     g2[i * (n + 1) + j + 1], g2[(i + 1) * (n + 1) + j + 1]};
            auto interesting = [&](const std::array<double, 4>& c) {
                auto [lo, hi] = std::minmax_element(c.begin(), c.end());
                return (*lo <= 0 && *hi >= 0) ||
                       std::min(std::fabs(*lo), std::fabs(*hi)) < small;
            };
            if (interesting(c1) && interesting(c2)) seeds.emplace_back(cs, ct);
        }
    }

    std::vector<std::optional<RawCritical>> slots(seeds.size());
    parallel_rows(static_cast<int>(seeds.size()), [&](int k) {
        slots[k] = newton_torus(grad, hess, seeds[k].first, seeds[k].second, opt);
    });

    std::vector<RawCritical> found;
    for (const auto& r : slots) {
        if (!r) {
            ++(*discarded);
            continue;
        }
        if (circle_dist(r->s, r->t) <= opt.band) {
            ++(*diagonal_hits);
            continue;
        }
        PairPoint c = PairPoint{r->s, r->t}.canonical();
        found.push_back({c.s, c.t, r->residual});
    }
    std::sort(found.begin(), found.end(), [](const RawCritical& x, const RawCritical& y) {
        return x.s != y.s ? x.s < y.s : x.t < y.t;
    });
    std::vector<RawCritical> out;
    for (const auto& r : found) {
        bool dup = false;
        for (const auto& kept : out) {
            if (pair_torus_dist(r.s, r.t, kept.s, kept.t) < opt.dedup_radius) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(r);
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Critical points of phi
// ---------------------------------------------------------------------------

inline CriticalPointResult find_critical_points(const QuadricLoop& loop,
                                                const IntersectionCensus& cen,
                                                SolveOptions opt = {}) {
    if (opt.grid < 256) throw std::invalid_argument("find_critical_points: grid must be >= 256");
    CriticalPointResult out;
    auto grad = [&](double s, double t) { return phi_grad(loop, {s, t}); };
    auto hess = [&](double s, double t) { return phi_hess(loop, {s, t}); };
    auto raw = detail::solve_torus(grad, hess, opt, &out.discarded_seeds, &out.diagonal_hits);

    auto match = [&](const std::vector<CensusPair>& pairs, double s, double t) {
        for (const auto& p : pairs)
            if (detail::pair_torus_dist(s, t, p.s, p.t) < opt.census_match_radius) return true;
        return false;
    };

    for (const auto& r : raw) {
        CriticalPointRecord rec;
        rec.location = PairPoint{r.s, r.t};
        rec.gradient_residual = r.residual;
        rec.value = phi(loop, rec.location);
        auto h = phi_hess(loop, rec.location);
        rec.hessian_eigenvalues = detail::sym2_eigenvalues(h[0], h[1], h[2]);
        const double det = h[0] * h[2] - h[1] * h[1];

        LoopJet js = loop.jet(r.s), jt = loop.jet(r.t);
        const bool coincident = norm(js.f - jt.f) <= opt.coincidence_tol;
        const bool anti_coincident = norm(js.f + jt.f) <= opt.coincidence_tol;

        if (match(cen.double_points, r.s, r.t)) {
            rec.cls = CriticalClass::Double;
        } else if (match(cen.antipodal_points, r.s, r.t)) {
            rec.cls = CriticalClass::Antipodal;
        } else if (std::fabs(det) < opt.degenerate_det_tol) {
            rec.cls = CriticalClass::Degenerate;
        } else if (coincident) {
            rec.cls = CriticalClass::Double;
        } else if (anti_coincident) {
            rec.cls = CriticalClass::Antipodal;
        } else if (!lines_parallel(js.d1, jt.d1, opt.parallel_angle_tol)) {
            // Off A, B, D and non-degenerate, the tangents must be parallel;
            // a failure means the point cannot be trusted as isolated.
            rec.cls = CriticalClass::Degenerate;
            out.notes.push_back("critical point failed the parallelism check at (s, t) = (" +
                                std::to_string(r.s) + ", " + std::to_string(r.t) + ")");
        } else {
            rec.cls = CriticalClass::ParallelTangent;
        }
        if (rec.cls != CriticalClass::Degenerate) {
            rec.morse_index = (rec.hessian_eigenvalues[0] < 0) + (rec.hessian_eigenvalues[1] < 0);
        }
        out.records.push_back(rec);
    }

    int n_degenerate = 0;
    for (const auto& r : out.records) n_degenerate += r.cls == CriticalClass::Degenerate;
    if (n_degenerate > 0) out.non_generic = true;
    if (n_degenerate > opt.grid / 20) {
        // A symmetric curve produces whole circles of degenerate points;
        // keep a sampled summary rather than the full enumeration.
        out.degenerate_family = true;
        std::vector<CriticalPointRecord> kept, degenerate_samples;
        for (const auto& r : out.records) {
            if (r.cls != CriticalClass::Degenerate) {
                kept.push_back(r);
                continue;
            }
            bool dup = false;
            for (const auto& d : degenerate_samples)
                if (torus_dist(r.location, d.location) < 0.05) { dup = true; break; }
            if (!dup) degenerate_samples.push_back(r);
        }
        kept.insert(kept.end(), degenerate_samples.begin(), degenerate_samples.end());
        out.records = std::move(kept);
        out.notes.push_back("degenerate critical family summarized by sampled arcs");
    }
    return out;
}

inline CriticalPointResult find_critical_points(const QuadricLoop& loop, SolveOptions opt = {}) {
    return find_critical_points(loop, census(loop), opt);
}

struct ParallelPairs {
    std::vector<PairPoint> pairs;
    bool non_generic = false;
};

inline ParallelPairs parallel_pairs(const QuadricLoop& loop, SolveOptions opt = {}) {
    auto res = find_critical_points(loop, opt);
    ParallelPairs out;
    out.non_generic = res.non_generic;
    for (const auto& r : res.records)
        if (r.cls == CriticalClass::ParallelTangent) out.pairs.push_back(r.location);
    return out;
}

// ---------------------------------------------------------------------------
// psi for graph quadrics z = tau(x), x in W = R^2
// ---------------------------------------------------------------------------

struct GraphQuadric {
    std::array<int, 2> tau_signs;  // diagonal form on W; entries +1 / -1

    GraphQuadric(int s1, int s2) : tau_signs{s1, s2} {
        if ((s1 != 1 && s1 != -1) || (s2 != 1 && s2 != -1))
            throw std::invalid_argument("GraphQuadric: tau must be non-degenerate (signs +/-1)");
    }
    static GraphQuadric elliptic_paraboloid() { return {1, 1}; }
    static GraphQuadric hyperbolic_paraboloid() { return {1, -1}; }

    double tau(const Vec3& w) const {
        return tau_signs[0] * w.x * w.x + tau_signs[1] * w.y * w.y;
    }
    double tau_bilinear(const Vec3& u, const Vec3& v) const {
        return tau_signs[0] * u.x * v.x + tau_signs[1] * u.y * v.y;
    }
    // lift of a base point / tangent onto the graph z = tau(x)
    Vec3 lift_point(const Vec3& g) const { return {g.x, g.y, tau(g)}; }
    Vec3 lift_tangent(const Vec3& g, const Vec3& g1) const {
        return {g1.x, g1.y, 2.0 * tau_bilinear(g, g1)};
    }
};

inline double psi(const GraphQuadric& gq, const TrigLoop& g, const PairPoint& p) {
    return gq.tau(g.eval(p.s) - g.eval(p.t));
}

inline std::array<double, 2> psi_grad(const GraphQuadric& gq, const TrigLoop& g,
                                      const TrigLoop& g1, const PairPoint& p) {
    Vec3 diff = g.eval(p.s) - g.eval(p.t);
    return {2.0 * gq.tau_bilinear(diff, g1.eval(p.s)), -2.0 * gq.tau_bilinear(diff, g1.eval(p.t))};
}

inline std::array<double, 3> psi_hess(const GraphQuadric& gq, const TrigLoop& g,
                                      const TrigLoop& g1, const TrigLoop& g2,
                                      const PairPoint& p) {
    Vec3 diff = g.eval(p.s) - g.eval(p.t);
    Vec3 as = g1.eval(p.s), at = g1.eval(p.t);
    return {2.0 * (gq.tau_bilinear(as, as) + gq.tau_bilinear(diff, g2.eval(p.s))),
            -2.0 * gq.tau_bilinear(as, at),
            2.0 * (gq.tau_bilinear(at, at) - gq.tau_bilinear(diff, g2.eval(p.t)))};
}

// Critical points of psi on the torus. Off the diagonal, points with
// g(s) != g(t) are parallel-tangent pairs of the lifted curve; the lift is
// used only to verify.
inline CriticalPointResult find_psi_critical(const GraphQuadric& gq, const TrigLoop& g,
                                             SolveOptions opt = {}) {
    CriticalPointResult out;
    TrigLoop g1 = g.derivative(), g2 = g1.derivative();
    auto grad = [&](double s, double t) { return psi_grad(gq, g, g1, {s, t}); };
    auto hess = [&](double s, double t) { return psi_hess(gq, g, g1, g2, {s, t}); };
    auto raw = detail::solve_torus(grad, hess, opt, &out.discarded_seeds, &out.diagonal_hits);

    for (const auto& r : raw) {
        CriticalPointRecord rec;
        rec.location = PairPoint{r.s, r.t};
        rec.gradient_residual = r.residual;
        rec.value = psi(gq, g, rec.location);
        auto h = psi_hess(gq, g, g1, g2, rec.location);
        rec.hessian_eigenvalues = detail::sym2_eigenvalues(h[0], h[1], h[2]);
        const double det = h[0] * h[2] - h[1] * h[1];
        Vec3 gs = g.eval(r.s), gt = g.eval(r.t);
        if (norm(gs - gt) <= opt.coincidence_tol) {
            rec.cls = CriticalClass::Double;
        } else if (std::fabs(det) < opt.degenerate_det_tol) {
            rec.cls = CriticalClass::Degenerate;
        } else {
            Vec3 vs = gq.lift_tangent(gs, g1.eval(r.s));
            Vec3 vt = gq.lift_tangent(gt, g1.eval(r.t));
            if (!lines_parallel(vs, vt, opt.parallel_angle_tol)) {
                rec.cls = CriticalClass::Degenerate;
                out.notes.push_back("psi critical point failed the lifted parallelism check");
            } else {
                rec.cls = CriticalClass::ParallelTangent;
            }
        }
        if (rec.cls != CriticalClass::Degenerate) {
            rec.morse_index = (rec.hessian_eigenvalues[0] < 0) + (rec.hessian_eigenvalues[1] < 0);
        }
        out.records.push_back(rec);
    }
    for (const auto& r : out.records)
        if (r.cls == CriticalClass::Degenerate) out.non_generic = true;
    return out;
}

}  // namespace skewloop
