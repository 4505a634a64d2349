#pragma once

// Ruled developable surfaces (cylinder, cone, tangent developable), their
// exact isometric development to the plane, the ruling foliation of the
// developed domain, the leaf angle profiles, and the on-leaf parallel-pair
// finders.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skewloop/detail/numeric.hpp"
#include "skewloop/quadric.hpp"
#include "skewloop/trig.hpp"

namespace skewloop {

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 rot90(const Vec2& v) { return {-v.y, v.x}; }

struct OutOfWindow : std::domain_error {
    using std::domain_error::domain_error;
};
struct Singular : std::domain_error {
    using std::domain_error::domain_error;
};
struct NotOnSurface : std::domain_error {
    using std::domain_error::domain_error;
};
struct NonRuled : std::domain_error {
    using std::domain_error::domain_error;
};
struct ProfileNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SurfaceCoords {
    double u = 0, w = 0;
    double residual = 0;  // distance from the query point to the ruling
};

// A ruled developable patch X(u, w) with a parameter window. w is the
// axial coordinate for cylinders and the distance from the apex / edge of
// regression otherwise, so w windows with w_lo > 0 keep the patch away
// from its singular locus.
class DevelopableSurface {
  public:
    enum class Kind { Cylinder, Cone, TangentDevelopable };

    static DevelopableSurface cylinder(TrigLoop directrix, Vec3 axis, double u_lo, double u_hi,
                                       double w_lo, double w_hi) {
        DevelopableSurface s;
        s.kind_ = Kind::Cylinder;
        s.axis_ = normalized(axis);
        // split the directrix into its cross-section (perpendicular to the
        // axis) and axial offset; both stay trig polynomials
        TrigPoly axial = directrix.coord(0) * s.axis_.x + directrix.coord(1) * s.axis_.y +
                         directrix.coord(2) * s.axis_.z;
        TrigLoop cross_sec(directrix.coord(0) - axial * s.axis_.x,
                           directrix.coord(1) - axial * s.axis_.y,
                           directrix.coord(2) - axial * s.axis_.z);
        s.gen_ = cross_sec;
        s.axial_offset_ = axial;
        s.finish(u_lo, u_hi, w_lo, w_hi);
        return s;
    }

    static DevelopableSurface cone(Vec3 apex, TrigLoop directrix, double u_lo, double u_hi,
                                   double w_lo, double w_hi) {
        if (w_lo <= 0) throw std::invalid_argument("cone: w window must exclude the apex (w_lo > 0)");
        DevelopableSurface s;
        s.kind_ = Kind::Cone;
        s.apex_ = apex;
        s.gen_ = std::move(directrix);
        s.finish(u_lo, u_hi, w_lo, w_hi);
        return s;
    }

    static DevelopableSurface tangent_developable(TrigLoop edge, double u_lo, double u_hi,
                                                  double w_lo, double w_hi) {
        if (w_lo <= 0)
            throw std::invalid_argument(
                "tangent_developable: w window must exclude the edge of regression (w_lo > 0)");
        DevelopableSurface s;
        s.kind_ = Kind::TangentDevelopable;
        s.gen_ = std::move(edge);
        s.finish(u_lo, u_hi, w_lo, w_hi);
        return s;
    }

    Kind kind() const { return kind_; }
    double u_lo() const { return u_lo_; }
    double u_hi() const { return u_hi_; }
    double w_lo() const { return w_lo_; }
    double w_hi() const { return w_hi_; }
    bool full_circle() const { return u_hi_ - u_lo_ >= two_pi - 1e-9; }
    const Vec3& apex() const { return apex_; }
    const Vec3& axis() const { return axis_; }

    // ruling frame at u: a point on the ruling and its unit direction
    Vec3 ruling_point(double u) const {
        switch (kind_) {
            case Kind::Cylinder: return gen_.eval(u) + axis_ * axial_offset_.eval(u);
            case Kind::Cone: return apex_;
            case Kind::TangentDevelopable: return gen_.eval(u);
        }
        return {};
    }
    Vec3 ruling_dir(double u) const {
        switch (kind_) {
            case Kind::Cylinder: return axis_;
            case Kind::Cone: return normalized(gen_.eval(u) - apex_);
            case Kind::TangentDevelopable: return normalized(gen_.eval(u, 1));
        }
        return {};
    }

    Vec3 point(double u, double w) const {
        switch (kind_) {
            case Kind::Cylinder: return gen_.eval(u) + axis_ * w;
            case Kind::Cone: return apex_ + ruling_dir(u) * w;
            case Kind::TangentDevelopable: return gen_.eval(u) + ruling_dir(u) * w;
        }
        return {};
    }

    // unit surface normal; independent of w along a ruling
    Vec3 normal(double u) const {
        switch (kind_) {
            case Kind::Cylinder: return normalized(cross(gen_.eval(u, 1), axis_));
            case Kind::Cone: {
                Vec3 e, e1, e2;
                cone_frame(u, e, e1, e2);
                return normalized(cross(e, e1));
            }
            case Kind::TangentDevelopable: {
                Vec3 T, T1;
                tangent_frame(u, T, T1);
                return normalized(cross(T, T1));
            }
        }
        return {};
    }

    // Newton projection from a seed; the residual is the distance from the
    // point to the located ruling.
    SurfaceCoords project(const Vec3& P, double seed_u) const {
        double u = seed_u;
        for (int iter = 0; iter < 30; ++iter) {
            auto [g, dg] = projection_residual(P, u);
            if (std::fabs(dg) < 1e-300) break;
            double step = -g / dg;
            step = std::clamp(step, -0.2, 0.2);
            u += step;
            if (std::fabs(step) < 1e-14) break;
        }
        return coords_at(P, u);
    }

    SurfaceCoords project_global(const Vec3& P, int scan = 512) const {
        double best_u = u_lo_, best_r = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= scan; ++i) {
            double u = u_lo_ + (u_hi_ - u_lo_) * i / scan;
            double r = coords_at(P, u).residual;
            if (r < best_r) {
                best_r = r;
                best_u = u;
            }
        }
        return project(P, best_u);
    }

    // ----- development -----

    // Arc length / turning angle accumulated from u_lo. For full-circle
    // generators the parameter may run beyond the window (winding loops);
    // whole turns add the full-window totals.
    double develop_arclen(double u) const {
        auto [base, turns] = reduce(u);
        return (*arclen_)(base) + turns * arclen_->total();
    }
    double develop_angle(double u) const {
        if (!angle_) return 0.0;
        auto [base, turns] = reduce(u);
        return (*angle_)(base) + turns * angle_->total();
    }

    Vec2 develop(double u, double w) const {
        switch (kind_) {
            case Kind::Cylinder:
                return {develop_arclen(u), axial_offset_.eval(u) + w};
            case Kind::Cone: {
                double th = develop_angle(u);
                return {w * std::cos(th), w * std::sin(th)};
            }
            case Kind::TangentDevelopable: {
                double th = develop_angle(u);
                double ub = reduce(u).first;
                return Vec2{(*edge_x_)(ub), (*edge_y_)(ub)} + Vec2{std::cos(th), std::sin(th)} * w;
            }
        }
        return {};
    }

    // developed ruling: a point, the oriented direction, and the transverse
    // direction pointing toward increasing u
    void developed_leaf(double u, Vec2& p, Vec2& d, Vec2& n) const {
        switch (kind_) {
            case Kind::Cylinder:
                p = {develop_arclen(u), 0.0};
                d = {0.0, 1.0};
                n = {1.0, 0.0};
                return;
            case Kind::Cone: {
                double th = develop_angle(u);
                p = {0.0, 0.0};
                d = {std::cos(th), std::sin(th)};
                n = rot90(d);
                return;
            }
            case Kind::TangentDevelopable: {
                double th = develop_angle(u);
                double ub = reduce(u).first;
                p = {(*edge_x_)(ub), (*edge_y_)(ub)};
                d = {std::cos(th), std::sin(th)};
                n = rot90(d);
                return;
            }
        }
    }

    // ----- frames used by the unfolding chain rule -----

    // cone: unit ruling direction e(u) and derivatives
    void cone_frame(double u, Vec3& e, Vec3& e1, Vec3& e2) const {
        Vec3 r = gen_.eval(u) - apex_, r1 = gen_.eval(u, 1), r2 = gen_.eval(u, 2);
        double n = norm(r);
        e = r / n;
        double n1 = dot(e, r1);
        e1 = (r1 - e * n1) / n;
        double n2 = (dot(r1, r1) + dot(r, r2) - n1 * n1) / n;
        e2 = (r2 - e * n2 - e1 * (2.0 * n1)) / n;
    }

    // tangent developable: unit edge tangent T(u) and its derivative
    void tangent_frame(double u, Vec3& T, Vec3& T1) const {
        Vec3 e1 = gen_.eval(u, 1), e2 = gen_.eval(u, 2);
        double v = norm(e1);
        T = e1 / v;
        T1 = (e2 - T * dot(T, e2)) / v;
    }

    const TrigLoop& generator() const { return gen_; }
    const TrigPoly& axial_offset() const { return axial_offset_; }

  private:
    DevelopableSurface() = default;

    // reduce u into the window, counting whole turns for full circles
    std::pair<double, int> reduce(double u) const {
        if (!full_circle()) return {std::clamp(u, u_lo_, u_hi_), 0};
        double span = u_hi_ - u_lo_;
        double turns = std::floor((u - u_lo_) / span);
        return {u - turns * span, static_cast<int>(turns)};
    }

    // scalar equation g(u) = 0 located by the projection, plus dg/du
    std::pair<double, double> projection_residual(const Vec3& P, double u) const {
        switch (kind_) {
            case Kind::Cylinder: {
                Vec3 Pp = P - axis_ * dot(P, axis_);
                Vec3 c = gen_.eval(u), c1 = gen_.eval(u, 1), c2 = gen_.eval(u, 2);
                Vec3 d = Pp - c;
                return {dot(d, c1), -dot(c1, c1) + dot(d, c2)};
            }
            case Kind::Cone: {
                Vec3 d = normalized(P - apex_);
                Vec3 e, e1, e2;
                cone_frame(u, e, e1, e2);
                return {dot(d, e1), dot(d, e2)};
            }
            case Kind::TangentDevelopable: {
                Vec3 e = gen_.eval(u), ed1 = gen_.eval(u, 1), ed2 = gen_.eval(u, 2),
                     ed3 = gen_.eval(u, 3);
                double v = norm(ed1);
                Vec3 T = ed1 / v;
                double v1 = dot(T, ed2);
                Vec3 T1 = (ed2 - T * v1) / v;
                double v2 = (dot(ed2, ed2) + dot(ed1, ed3) - v1 * v1) / v;
                Vec3 T2 = (ed3 - T * v2 - T1 * (2.0 * v1)) / v;
                Vec3 d = P - e;
                // (P - e(u)) . T'(u) = 0 at the ruling through P
                return {dot(d, T1), dot(-ed1, T1) + dot(d, T2)};
            }
        }
        return {0, 0};
    }

    SurfaceCoords coords_at(const Vec3& P, double u) const {
        SurfaceCoords c;
        c.u = u;
        switch (kind_) {
            case Kind::Cylinder: {
                Vec3 Pp = P - axis_ * dot(P, axis_);
                Vec3 cc = gen_.eval(u);
                c.w = dot(P, axis_) - axial_offset_.eval(u);
                c.residual = norm(Pp - cc);
                return c;
            }
            case Kind::Cone: {
                Vec3 d = P - apex_;
                Vec3 e = ruling_dir(u);
                c.w = dot(d, e);
                c.residual = norm(d - e * c.w);
                return c;
            }
            case Kind::TangentDevelopable: {
                Vec3 d = P - gen_.eval(u);
                Vec3 T = ruling_dir(u);
                c.w = dot(d, T);
                c.residual = norm(d - T * c.w);
                return c;
            }
        }
        return c;
    }

    void finish(double u_lo, double u_hi, double w_lo, double w_hi) {
        if (u_hi <= u_lo || w_hi <= w_lo)
            throw std::invalid_argument("DevelopableSurface: empty parameter window");
        u_lo_ = u_lo;
        u_hi_ = u_hi;
        w_lo_ = w_lo;
        w_hi_ = w_hi;

        switch (kind_) {
            case Kind::Cylinder: {
                arclen_ = std::make_shared<detail::CumulativeIntegral>(
                    [g = gen_](double u) { return norm(g.eval(u, 1)); }, u_lo, u_hi, 512);
                break;
            }
            case Kind::Cone: {
                arclen_ = std::make_shared<detail::CumulativeIntegral>(
                    [g = gen_](double u) { return norm(g.eval(u, 1)); }, u_lo, u_hi, 512);
                angle_ = std::make_shared<detail::CumulativeIntegral>(
                    [s = gen_, a = apex_](double u) {
                        // |e'(u)| for the unit ruling direction
                        Vec3 r = s.eval(u) - a, r1 = s.eval(u, 1);
                        double n = norm(r);
                        Vec3 e = r / n;
                        return norm((r1 - e * dot(e, r1)) / n);
                    },
                    u_lo, u_hi, 512);
                break;
            }
            case Kind::TangentDevelopable: {
                arclen_ = std::make_shared<detail::CumulativeIntegral>(
                    [g = gen_](double u) { return norm(g.eval(u, 1)); }, u_lo, u_hi, 512);
                // turning rate of the developed edge = curvature * speed
                angle_ = std::make_shared<detail::CumulativeIntegral>(
                    [g = gen_](double u) {
                        Vec3 e1 = g.eval(u, 1), e2 = g.eval(u, 2);
                        double v = norm(e1);
                        return norm(cross(e1, e2)) / (v * v);
                    },
                    u_lo, u_hi, 512);
                auto ang = angle_;
                edge_x_ = std::make_shared<detail::CumulativeIntegral>(
                    [g = gen_, ang](double u) { return std::cos((*ang)(u)) * norm(g.eval(u, 1)); },
                    u_lo, u_hi, 512);
                edge_y_ = std::make_shared<detail::CumulativeIntegral>(
                    [g = gen_, ang](double u) { return std::sin((*ang)(u)) * norm(g.eval(u, 1)); },
                    u_lo, u_hi, 512);
                // the edge must keep nonvanishing curvature on the window
                for (int i = 0; i <= 256; ++i) {
                    double u = u_lo + (u_hi - u_lo) * i / 256.0;
                    Vec3 e1 = gen_.eval(u, 1), e2 = gen_.eval(u, 2);
                    double v = norm(e1);
                    if (norm(cross(e1, e2)) / (v * v * v) < 1e-6)
                        throw Singular("tangent_developable: curvature vanishes near u = " +
                                       std::to_string(u));
                }
                break;
            }
        }
    }

    Kind kind_ = Kind::Cylinder;
    TrigLoop gen_;           // cross-section / directrix / edge
    TrigPoly axial_offset_;  // cylinder only
    Vec3 axis_{0, 0, 1};
    Vec3 apex_{0, 0, 0};
    double u_lo_ = 0, u_hi_ = 0, w_lo_ = 0, w_hi_ = 0;
    std::shared_ptr<detail::CumulativeIntegral> arclen_, angle_, edge_x_, edge_y_;
};

// ---------------------------------------------------------------------------
// Unfolding of a loop drawn on the surface
// ---------------------------------------------------------------------------

struct UnfoldOptions {
    int loop_grid = 2048;          // dense parameter cache
    double on_surface_tol = 1e-9;
    int isometry_arcs = 32;        // construction-time verification arcs
};

struct Leaf {
    double u = 0;        // ruling parameter
    Vec2 point, dir, transverse;
};

class Unfolding {
  public:
    Unfolding(DevelopableSurface surface, TrigLoop loop, UnfoldOptions opt = {})
        : surf_(std::move(surface)), loop_(std::move(loop)), opt_(opt) {
        build_cache();
        verify_isometry(opt_.isometry_arcs);
    }

    const DevelopableSurface& surface() const { return surf_; }
    const TrigLoop& loop3d() const { return loop_; }

    // surface coordinates of the loop point, u unwrapped continuously
    double u_of(double tau) const { return coords(tau).u; }
    double w_of(double tau) const { return coords(tau).w; }

    Vec2 plan_point(double tau) const {
        SurfaceCoords c = coords(tau);
        return surf_.develop(c.u, c.w);
    }

    // exact chain-rule derivative of the developed loop
    Vec2 plan_tangent(double tau) const {
        SurfaceCoords c = coords(tau);
        double u = wrap_u(c.u);
        Vec3 g1 = loop_.eval(tau, 1);
        switch (surf_.kind()) {
            case DevelopableSurface::Kind::Cylinder: {
                Vec3 c1 = surf_.generator().eval(u, 1);
                Vec3 g1p = g1 - surf_.axis() * dot(g1, surf_.axis());
                double u1 = dot(g1p, c1) / dot(c1, c1);
                return {norm(c1) * u1, dot(g1, surf_.axis())};
            }
            case DevelopableSurface::Kind::Cone: {
                Vec3 e, e1, e2;
                surf_.cone_frame(u, e, e1, e2);
                double w1 = dot(g1, e);
                double u1 = dot(g1, e1) / (c.w * dot(e1, e1));
                double th = surf_.develop_angle(c.u), th1 = norm(e1) * u1;
                Vec2 rad{std::cos(th), std::sin(th)};
                return rad * w1 + rot90(rad) * (c.w * th1);
            }
            case DevelopableSurface::Kind::TangentDevelopable: {
                Vec3 T, T1;
                surf_.tangent_frame(u, T, T1);
                double v = norm(surf_.generator().eval(u, 1));
                double u1 = dot(g1, T1) / (c.w * dot(T1, T1));
                double w1 = dot(g1, T) - v * u1;
                double th = surf_.develop_angle(c.u);
                Vec2 Tb{std::cos(th), std::sin(th)};
                return Tb * (v * u1 + w1) + rot90(Tb) * (c.w * norm(T1) * u1);
            }
        }
        return {};
    }

    Vec3 loop_point(double tau, int order = 0) const {
        return order == 0 ? loop_.eval(tau) : (order == 1 ? loop_.eval(tau, 1) : loop_.eval(tau, 2));
    }

    // winding number of the loop around a closed ruling family
    int winding_turns() const { return winding_turns_; }

    // supporting leaf range of the loop (unwrapped u); only defined when
    // the loop does not wind around the ruling family
    double leaf_u_lo() const { require_supporting_leaves(); return u_min_; }
    double leaf_u_hi() const { require_supporting_leaves(); return u_max_; }
    double leaf_u(double tnorm) const {
        require_supporting_leaves();
        return u_min_ + tnorm * (u_max_ - u_min_);
    }

    Leaf leaf(double tnorm) const {
        require_supporting_leaves();
        Leaf l;
        l.u = leaf_u(tnorm);
        surf_.developed_leaf(l.u, l.point, l.dir, l.transverse);
        return l;
    }

    // all loop parameters on the leaf, sorted by position along the leaf
    std::vector<double> leaf_intersections(double tnorm) const {
        require_supporting_leaves();
        const double u_leaf = leaf_u(tnorm);
        std::vector<double> taus;
        const int n = static_cast<int>(cache_.size());
        for (int k = 0; k < n; ++k) {
            double a = cache_[k].u - u_leaf;
            double b = cache_[k].u_next() - u_leaf;
            if (a == 0) a = -1e-300;  // touch counts on the left cell only
            if ((a < 0 && b >= 0) || (a > 0 && b <= 0)) {
                double t_lo = tau_step_ * k, t_hi = tau_step_ * (k + 1);
                double root = detail::bisect(
                    [&](double tau) { return u_of_continued(tau, k) - u_leaf; }, t_lo, t_hi, 1e-13);
                taus.push_back(root);
            }
        }
        std::sort(taus.begin(), taus.end());
        return taus;
    }

    double isometry_error() const { return isometry_error_; }

    // relative developed-length error over random sub-arcs
    double verify_isometry(int arcs) {
        detail::Rng rng(20240901u);
        double worst = 0;
        for (int k = 0; k < arcs; ++k) {
            double a = rng.uniform(0.0, two_pi);
            double len = rng.uniform(0.05, 1.0);
            double three_d = detail::integrate(
                [&](double t) { return norm(loop_.eval(t, 1)); }, a, a + len, 24);
            double planar = detail::integrate(
                [&](double t) { return norm(plan_tangent(t)); }, a, a + len, 24);
            worst = std::max(worst, std::fabs(planar - three_d) / three_d);
        }
        isometry_error_ = std::max(isometry_error_, worst);
        return worst;
    }

  private:
    struct CacheEntry {
        double u = 0, w = 0;
        double u_next_ = 0;  // unwrapped u at the next grid node (continuity)
        double u_next() const { return u_next_; }
    };

    double wrap_u(double u) const {
        if (!surf_.full_circle()) return u;
        double lo = surf_.u_lo();
        return lo + wrap_angle(u - lo);
    }

    SurfaceCoords coords(double tau) const {
        // seed from the dense cache, then polish
        tau = wrap_angle(tau);
        int k = std::min(static_cast<int>(tau / tau_step_), int(cache_.size()) - 1);
        double frac = (tau - k * tau_step_) / tau_step_;
        double useed = cache_[k].u + frac * (cache_[k].u_next() - cache_[k].u);
        SurfaceCoords c = surf_.project(loop_.eval(tau), wrap_u(useed));
        if (c.residual > opt_.on_surface_tol)
            throw NotOnSurface("loop leaves the surface near tau = " + std::to_string(tau) +
                               " (distance " + std::to_string(c.residual) + ")");
        // continue u from the seed's branch
        double cont = c.u;
        if (surf_.full_circle()) {
            while (cont - useed > std::numbers::pi) cont -= two_pi;
            while (cont - useed < -std::numbers::pi) cont += two_pi;
        }
        c.u = cont;
        return c;
    }

    double u_of_continued(double tau, int cell) const {
        double useed = cache_[cell].u;
        SurfaceCoords c = surf_.project(loop_.eval(tau), wrap_u(useed));
        double cont = c.u;
        if (surf_.full_circle()) {
            while (cont - useed > std::numbers::pi) cont -= two_pi;
            while (cont - useed < -std::numbers::pi) cont += two_pi;
        }
        return cont;
    }

    void build_cache() {
        const int n = opt_.loop_grid;
        tau_step_ = two_pi / n;
        cache_.resize(n);

        SurfaceCoords c = surf_.project_global(loop_.eval(0.0));
        if (c.residual > opt_.on_surface_tol)
            throw NotOnSurface("loop is not on the surface at tau = 0 (distance " +
                               std::to_string(c.residual) + ")");
        double u_prev = c.u;
        for (int k = 0; k < n; ++k) {
            double tau = tau_step_ * k;
            SurfaceCoords ck = surf_.project(loop_.eval(tau), wrap_u(u_prev));
            if (ck.residual > opt_.on_surface_tol)
                throw NotOnSurface("loop leaves the surface near tau = " + std::to_string(tau) +
                                   " (distance " + std::to_string(ck.residual) + ")");
            double cont = ck.u;
            if (surf_.full_circle()) {
                while (cont - u_prev > std::numbers::pi) cont -= two_pi;
                while (cont - u_prev < -std::numbers::pi) cont += two_pi;
            }
            cache_[k].u = cont;
            cache_[k].w = ck.w;
            u_prev = cont;
        }
        // closure / winding
        SurfaceCoords cend = surf_.project(loop_.eval(0.0), wrap_u(u_prev));
        double cont = cend.u;
        if (surf_.full_circle()) {
            while (cont - u_prev > std::numbers::pi) cont -= two_pi;
            while (cont - u_prev < -std::numbers::pi) cont += two_pi;
        }
        winding_turns_ = static_cast<int>(std::llround((cont - cache_[0].u) / two_pi));
        if (std::fabs(cont - cache_[0].u - winding_turns_ * two_pi) > 1e-6)
            throw NotOnSurface("ruling parameter fails to close up along the loop");
        for (int k = 0; k < n; ++k) cache_[k].u_next_ = (k + 1 < n) ? cache_[k + 1].u : cont;

        u_min_ = std::numeric_limits<double>::infinity();
        u_max_ = -u_min_;
        double w_min = std::numeric_limits<double>::infinity(), w_max = -w_min;
        for (const auto& e : cache_) {
            u_min_ = std::min(u_min_, e.u);
            u_max_ = std::max(u_max_, e.u);
            w_min = std::min(w_min, e.w);
            w_max = std::max(w_max, e.w);
        }
        // refine the supporting leaves by local search around the extremes
        if (winding_turns_ == 0) refine_extremes();

        if (!surf_.full_circle() &&
            (u_min_ < surf_.u_lo() - 1e-9 || u_max_ > surf_.u_hi() + 1e-9))
            throw OutOfWindow("loop leaves the ruling window in u");
        if (w_min < surf_.w_lo() - 1e-9) {
            if (surf_.kind() == DevelopableSurface::Kind::Cylinder)
                throw OutOfWindow("loop leaves the ruling window in w");
            throw Singular(surf_.kind() == DevelopableSurface::Kind::Cone
                               ? "loop reaches the apex side of the window"
                               : "loop reaches the edge of regression");
        }
        if (w_max > surf_.w_hi() + 1e-9) throw OutOfWindow("loop leaves the ruling window in w");
    }

    void refine_extremes() {
        const int n = static_cast<int>(cache_.size());
        int k_min = 0, k_max = 0;
        for (int k = 0; k < n; ++k) {
            if (cache_[k].u < cache_[k_min].u) k_min = k;
            if (cache_[k].u > cache_[k_max].u) k_max = k;
        }
        auto u_at = [&](int cell, double tau) { return u_of_continued(tau, (cell % n + n) % n); };
        double t_min = detail::golden_min(
            [&](double t) { return u_at(k_min, t); }, tau_step_ * (k_min - 1),
            tau_step_ * (k_min + 1), 1e-12);
        double t_max = detail::golden_min(
            [&](double t) { return -u_at(k_max, t); }, tau_step_ * (k_max - 1),
            tau_step_ * (k_max + 1), 1e-12);
        u_min_ = u_at(k_min, t_min);
        u_max_ = u_at(k_max, t_max);
    }

    void require_supporting_leaves() const {
        if (winding_turns_ != 0)
            throw OutOfWindow(
                "loop winds around the ruling family; no supporting leaves exist");
    }

    DevelopableSurface surf_;
    TrigLoop loop_;
    UnfoldOptions opt_;
    std::vector<CacheEntry> cache_;
    double tau_step_ = 0;
    double u_min_ = 0, u_max_ = 0;
    int winding_turns_ = 0;
    double isometry_error_ = 0;
};

// ---------------------------------------------------------------------------
// Foliation angle profiles
// ---------------------------------------------------------------------------

struct LeafSample {
    double t = 0;  // normalized leaf parameter in (0, 1)
    bool valid = false;
    int n_hits = 0;
    double tau_minus = 0, tau_plus = 0;   // loop parameters of the extreme hits
    double xi_minus = 0, xi_plus = 0;     // positions along the leaf
    double alpha_minus = 0, alpha_plus = 0;
    double beta() const { return alpha_plus - alpha_minus; }
};

// Angle in [0, pi] between the oriented leaf and the curve tangent,
// oriented toward decreasing leaf parameter.
inline double leaf_angle(const Vec2& leaf_dir, const Vec2& transverse, const Vec2& tangent,
                         bool* tangential = nullptr) {
    Vec2 v = tangent;
    double tn = dot(v, transverse);
    if (tangential) *tangential = std::fabs(tn) < 1e-10 * norm(v);
    if (tn > 0) v = -v;
    double c = std::clamp(dot(v, leaf_dir) / (norm(v) * norm(leaf_dir)), -1.0, 1.0);
    return std::acos(c);
}

inline LeafSample eval_leaf(const Unfolding& unf, double tnorm) {
    LeafSample s;
    s.t = tnorm;
    Leaf l = unf.leaf(tnorm);
    auto taus = unf.leaf_intersections(tnorm);
    s.n_hits = static_cast<int>(taus.size());
    if (taus.size() < 2) return s;

    double best_lo = std::numeric_limits<double>::infinity(), best_hi = -best_lo;
    double tau_lo = 0, tau_hi = 0;
    for (double tau : taus) {
        double xi = dot(unf.plan_point(tau) - l.point, l.dir);
        if (xi < best_lo) { best_lo = xi; tau_lo = tau; }
        if (xi > best_hi) { best_hi = xi; tau_hi = tau; }
    }
    s.xi_minus = best_lo;
    s.xi_plus = best_hi;
    s.tau_minus = tau_lo;
    s.tau_plus = tau_hi;
    bool tang_lo = false, tang_hi = false;
    s.alpha_minus = leaf_angle(l.dir, l.transverse, unf.plan_tangent(tau_lo), &tang_lo);
    s.alpha_plus = leaf_angle(l.dir, l.transverse, unf.plan_tangent(tau_hi), &tang_hi);
    s.valid = !tang_lo && !tang_hi;
    return s;
}

struct JumpInterval {
    double t_lo = 0, t_hi = 0;
    bool plus_profile = false;   // which profile jumps
    bool ascending = false;
    bool from_invalid = false;   // marks cells blocked by tangential samples
};

struct FoliationAngleProfile {
    std::vector<LeafSample> samples;
    std::vector<JumpInterval> jumps;
    double grid_step = 0;
    double oscillation_threshold = 0.5;  // rad per grid cell

    bool in_jump(double t) const {
        for (const auto& j : jumps)
            if (t >= j.t_lo && t <= j.t_hi) return true;
        return false;
    }
};

inline FoliationAngleProfile angle_profiles(const Unfolding& unf, int grid = 1024) {
    FoliationAngleProfile prof;
    prof.grid_step = 1.0 / grid;
    prof.samples.resize(grid);
    detail::parallel_rows(grid, [&](int k) {
        double t = (k + 0.5) / grid;
        LeafSample s = eval_leaf(unf, t);
        if (!s.valid && s.n_hits >= 2) {
            // tangential extreme: refine locally x16 before giving up
            for (int j = 1; j <= 16 && !s.valid; ++j) {
                double nudge = (j % 2 ? 1 : -1) * (j / 2 + 1) * prof.grid_step / 16.0;
                LeafSample s2 = eval_leaf(unf, t + nudge);
                if (s2.valid) s = s2;
            }
        }
        prof.samples[k] = s;
    });
    for (int k = 0; k + 1 < grid; ++k) {
        const LeafSample& a = prof.samples[k];
        const LeafSample& b = prof.samples[k + 1];
        if (!a.valid || !b.valid) {
            prof.jumps.push_back({a.t, b.t, false, false, true});
            continue;
        }
        if (std::fabs(b.alpha_minus - a.alpha_minus) > prof.oscillation_threshold)
            prof.jumps.push_back({a.t, b.t, false, b.alpha_minus > a.alpha_minus, false});
        if (std::fabs(b.alpha_plus - a.alpha_plus) > prof.oscillation_threshold)
            prof.jumps.push_back({a.t, b.t, true, b.alpha_plus > a.alpha_plus, false});
    }
    return prof;
}

// ---------------------------------------------------------------------------
// Parallel pair on a leaf
// ---------------------------------------------------------------------------

struct LeafPair {
    double t0 = 0;            // normalized leaf parameter
    double u_leaf = 0;
    double tau_minus = 0, tau_plus = 0;
    Vec2 plan_minus, plan_plus;
    double angle_3d = 0;      // between the 3-D tangent lines
};

// Locate the smallest sign change of beta = alpha_plus - alpha_minus on a
// continuity interval (jump cells are excluded), bisect it, and return the
// extreme pair. The 3-D tangents must pass the parallelism check.
inline LeafPair find_parallel_on_leaf(const Unfolding& unf, const FoliationAngleProfile& prof,
                                      double angle_tol = 1e-6) {
    const auto& S = prof.samples;
    auto first_valid = std::find_if(S.begin(), S.end(), [](const LeafSample& s) { return s.valid; });
    auto last_valid = std::find_if(S.rbegin(), S.rend(), [](const LeafSample& s) { return s.valid; });
    if (first_valid == S.end() || last_valid == S.rend())
        throw ProfileNotFound("profile has no valid samples");
    if (first_valid->beta() <= 0 || last_valid->beta() >= 0)
        throw ProfileNotFound("profile boundary behavior violated: beta(0+) = " +
                              std::to_string(first_valid->beta()) + ", beta(1-) = " +
                              std::to_string(last_valid->beta()));

    for (size_t k = 0; k + 1 < S.size(); ++k) {
        const LeafSample& a = S[k];
        const LeafSample& b = S[k + 1];
        if (!a.valid || !b.valid) continue;
        if (prof.in_jump(a.t) || prof.in_jump(b.t)) continue;
        if (!(a.beta() > 0 && b.beta() <= 0)) continue;
        double t0 = detail::bisect(
            [&](double t) {
                LeafSample s = eval_leaf(unf, t);
                return s.valid ? s.beta() : a.beta();
            },
            a.t, b.t, 1e-12);
        LeafSample s0 = eval_leaf(unf, t0);
        if (!s0.valid) continue;
        Vec3 v1 = unf.loop_point(s0.tau_minus, 1), v2 = unf.loop_point(s0.tau_plus, 1);
        double ang = line_angle(v1, v2);
        if (ang <= angle_tol) {
            LeafPair pair;
            pair.t0 = t0;
            pair.u_leaf = unf.leaf_u(t0);
            pair.tau_minus = s0.tau_minus;
            pair.tau_plus = s0.tau_plus;
            pair.plan_minus = unf.plan_point(s0.tau_minus);
            pair.plan_plus = unf.plan_point(s0.tau_plus);
            pair.angle_3d = ang;
            return pair;
        }
    }
    throw ProfileNotFound(
        "no beta sign change on a continuity interval produced a parallel pair");
}

// Remark-style shortcut for parallel foliations: the longest leaf chord.
inline LeafPair cylinder_shortcut(const Unfolding& unf, int grid = 1024, double angle_tol = 1e-6) {
    if (unf.surface().kind() != DevelopableSurface::Kind::Cylinder)
        throw std::invalid_argument("cylinder_shortcut: foliation is not by parallel lines");
    auto chord = [&](double t) {
        LeafSample s = eval_leaf(unf, t);
        return s.n_hits >= 2 ? s.xi_plus - s.xi_minus : -1.0;
    };
    int best = -1;
    double best_val = -1;
    std::vector<double> vals(grid);
    for (int k = 0; k < grid; ++k) {
        vals[k] = chord((k + 0.5) / grid);
        if (vals[k] > best_val) { best_val = vals[k]; best = k; }
    }
    double t_lo = std::max(0.0, (best - 0.5) / grid), t_hi = std::min(1.0, (best + 1.5) / grid);
    double t0 = detail::golden_min([&](double t) { return -chord(t); }, t_lo, t_hi, 1e-12);
    LeafSample s0 = eval_leaf(unf, t0);
    Vec3 v1 = unf.loop_point(s0.tau_minus, 1), v2 = unf.loop_point(s0.tau_plus, 1);
    double ang = line_angle(v1, v2);
    if (ang > angle_tol)
        throw ProfileNotFound("cylinder shortcut maximizer failed the parallelism check (angle " +
                              std::to_string(ang) + "); chord maximum may sit on a jump");
    return {t0, unf.leaf_u(t0), s0.tau_minus, s0.tau_plus,
            unf.plan_point(s0.tau_minus), unf.plan_point(s0.tau_plus), ang};
}

// Shortcut for concurrent foliations: the extreme distance ratio from the
// common point of the leaves.
inline LeafPair cone_shortcut(const Unfolding& unf, int grid = 1024, double angle_tol = 1e-6) {
    if (unf.surface().kind() != DevelopableSurface::Kind::Cone)
        throw std::invalid_argument("cone_shortcut: foliation is not by concurrent lines");
    auto ratio = [&](double t) {
        LeafSample s = eval_leaf(unf, t);
        if (s.n_hits < 2) return -1.0;
        double lo = std::min(std::fabs(s.xi_minus), std::fabs(s.xi_plus));
        double hi = std::max(std::fabs(s.xi_minus), std::fabs(s.xi_plus));
        return lo > 0 ? hi / lo : -1.0;
    };
    int best = -1;
    double best_val = -1;
    for (int k = 0; k < grid; ++k) {
        double v = ratio((k + 0.5) / grid);
        if (v > best_val) { best_val = v; best = k; }
    }
    double t_lo = std::max(0.0, (best - 0.5) / grid), t_hi = std::min(1.0, (best + 1.5) / grid);
    double t0 = detail::golden_min([&](double t) { return -ratio(t); }, t_lo, t_hi, 1e-12);
    LeafSample s0 = eval_leaf(unf, t0);
    Vec3 v1 = unf.loop_point(s0.tau_minus, 1), v2 = unf.loop_point(s0.tau_plus, 1);
    double ang = line_angle(v1, v2);
    if (ang > angle_tol)
        throw ProfileNotFound("cone shortcut maximizer failed the parallelism check (angle " +
                              std::to_string(ang) + "); ratio maximum may sit on a jump");
    return {t0, unf.leaf_u(t0), s0.tau_minus, s0.tau_plus,
            unf.plan_point(s0.tau_minus), unf.plan_point(s0.tau_plus), ang};
}

}  // namespace skewloop
