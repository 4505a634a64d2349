#pragma once

// Folded-triangle fixture: a smooth convex curve hugging an equilateral
// triangle, with the three corners folded up along lines that cut across
// them. The folds are isometric bends with an analytic (erf) curvature
// profile, so the folded loop stays analytic and admits an accurate trig
// fit. The folded surface keeps flat pieces and is rejected by the ruled
// constructors.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "skewloop/detail/numeric.hpp"
#include "skewloop/developable.hpp"
#include "skewloop/trig.hpp"

namespace skewloop {

struct InvalidFixture : std::domain_error {
    using std::domain_error::domain_error;
};

struct FoldSpec {
    Vec2 normal;      // unit, pointing toward the folded corner
    double distance;  // fold line = {x . normal = distance}
    double dihedral;  // total turn of the bend
    double radius;    // transition length scale
};

namespace detail {

// Isometric bend cross-section in the (normal, z) plane: signed distance h
// from the fold line maps to (X(h), Z(h)). The turning profile is
// theta(h) = dihedral * (1 + erf(2 h / radius)) / 2, flat outside |h| <
// cut to machine precision.
class FoldBend {
  public:
    FoldBend() = default;
    FoldBend(double dihedral, double radius)
        : dihedral_(dihedral), radius_(radius), cut_(3.0 * radius) {
        flat_hi_ = section_raw(cut_);
    }

    double turn(double h) const {
        return dihedral_ * 0.5 * (1.0 + std::erf(2.0 * h / radius_));
    }

    Vec2 section(double h) const {
        if (dihedral_ == 0.0) return {h, 0.0};
        if (h <= -cut_) return {h, 0.0};
        if (h >= cut_)
            return flat_hi_ + Vec2{std::cos(dihedral_), std::sin(dihedral_)} * (h - cut_);
        return section_raw(h);
    }

    double cut() const { return cut_; }

  private:
    Vec2 section_raw(double h) const {
        double x = integrate([this](double s) { return std::cos(turn(s)); }, -cut_, h, 24);
        double z = integrate([this](double s) { return std::sin(turn(s)); }, -cut_, h, 24);
        return Vec2{-cut_ + x, z};
    }

    double dihedral_ = 0, radius_ = 1, cut_ = 3;
    Vec2 flat_hi_;
};

}  // namespace detail

// Smooth convex rounded triangle from the support function
// h(theta) = 1 + eps cos(3 theta); convex for eps < 1/8.
inline Vec2 rounded_triangle_point(double eps, double theta) {
    double h = 1.0 + eps * std::cos(3.0 * theta);
    double h1 = -3.0 * eps * std::sin(3.0 * theta);
    double c = std::cos(theta), s = std::sin(theta);
    return {h * c - h1 * s, h * s + h1 * c};
}

inline Vec2 rounded_triangle_tangent(double eps, double theta) {
    double h = 1.0 + eps * std::cos(3.0 * theta);
    double h2 = -9.0 * eps * std::cos(3.0 * theta);
    double c = std::cos(theta), s = std::sin(theta);
    return Vec2{-s, c} * (h + h2);
}

struct BuragoFixture {
    TrigLoop loop;                // fitted closed trig representation
    double max_fit_deviation = 0; // vs the exact folded model
    std::array<FoldSpec, 3> folds;
    double dihedral = 0;
    double fold_radius = 0;       // in side-length units
    double support_eps = 0;
    std::vector<std::array<Vec3, 3>> mesh;

    // exact folded embedding of a point of the original flat domain
    Vec3 fold_map(const Vec2& x) const {
        int active = -1;
        double h_best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < 3; ++i) {
            double h = dot(x, folds[i].normal) - folds[i].distance;
            if (h > h_best) {
                h_best = h;
                active = i;
            }
        }
        const FoldSpec& f = folds[active];
        if (h_best <= -bends_[active].cut()) return {x.x, x.y, 0.0};
        Vec2 foot = x - f.normal * h_best;
        Vec2 cs = bends_[active].section(h_best);
        Vec2 planar = foot + f.normal * cs.x;
        return {planar.x, planar.y, cs.y};
    }

    Vec3 loop_exact(double theta) const {
        return fold_map(rounded_triangle_point(support_eps, theta));
    }

    std::array<detail::FoldBend, 3> bends_;
};

struct BuragoOptions {
    double support_eps = 0.10;
    std::array<double, 3> tilts = {0.0, 0.15, 0.30};      // fold-line normals vs corners
    std::array<double, 3> zone_halfwidth = {0.60, 1.05, 1.05};
    int fit_degree = 160;
    int fit_samples = 2048;
    double fit_tol = 1e-6;
    int mesh_rings = 16;
    int mesh_sectors = 72;
};

// Construct the folded-triangle fixture. fold_radius is measured in units
// of the triangle side length; the defaults put each corner's fold zone
// across the corner, tilted off the symmetric position so the folded
// tangent directions miss all planar partners.
inline BuragoFixture burago_fixture(double fold_radius = 0.05,
                                    double dihedral = std::numbers::pi / 3.0,
                                    BuragoOptions opt = {}) {
    if (fold_radius <= 0) throw InvalidFixture("burago_fixture: fold_radius must be > 0");
    BuragoFixture fx;
    fx.dihedral = dihedral;
    fx.fold_radius = fold_radius;
    fx.support_eps = opt.support_eps;

    // side length of the circumscribing triangle (corner radius 1 + eps)
    const double side = (1.0 + opt.support_eps) * std::sqrt(3.0);
    const double rho = fold_radius * side;

    for (int i = 0; i < 3; ++i) {
        double corner = two_pi * i / 3.0;
        double ndir = corner + opt.tilts[i];
        Vec2 m{std::cos(ndir), std::sin(ndir)};
        double edge_theta = ndir + opt.zone_halfwidth[i];
        double d = dot(rounded_triangle_point(opt.support_eps, edge_theta), m);
        fx.folds[i] = FoldSpec{m, d, dihedral, rho};
        fx.bends_[i] = detail::FoldBend(dihedral, rho);
    }

    if (dihedral != 0.0) {
        // fold lenses must be disjoint inside the disc
        for (int i = 0; i < 3; ++i) {
            int j = (i + 1) % 3;
            const Vec2 &mi = fx.folds[i].normal, &mj = fx.folds[j].normal;
            double det = cross(mi, mj);
            if (std::fabs(det) < 1e-9) throw InvalidFixture("fold lines parallel");
            Vec2 xint{(fx.folds[i].distance * mj.y - fx.folds[j].distance * mi.y) / det,
                      (mi.x * fx.folds[j].distance - mj.x * fx.folds[i].distance) / det};
            double support = dot(rounded_triangle_point(opt.support_eps,
                                                        std::atan2(xint.y, xint.x)),
                                 Vec2{std::cos(std::atan2(xint.y, xint.x)),
                                      std::sin(std::atan2(xint.y, xint.x))});
            if (norm(xint) < support + 0.02)
                throw InvalidFixture("fold lines cross inside the domain");
        }
        // every planar point of the loop must have its tangent-direction
        // partner (theta + pi) folded through nearly the full dihedral
        const int n = 4096;
        for (int k = 0; k < n; ++k) {
            double theta = two_pi * k / n;
            Vec2 x = rounded_triangle_point(opt.support_eps, theta);
            double h1 = -std::numeric_limits<double>::infinity(), h2 = h1;
            for (const auto& f : fx.folds) {
                double h = dot(x, f.normal) - f.distance;
                if (h > h1) { h2 = h1; h1 = h; }
                else if (h > h2) h2 = h;
            }
            if (h2 > -2.5 * rho)
                throw InvalidFixture("two folds active at theta = " + std::to_string(theta));
            if (h1 <= -1.5 * rho) {  // planar point
                Vec2 y = rounded_triangle_point(opt.support_eps, theta + std::numbers::pi);
                double hp = -std::numeric_limits<double>::infinity();
                for (const auto& f : fx.folds) hp = std::max(hp, dot(y, f.normal) - f.distance);
                if (hp < 1.0 * rho)
                    throw InvalidFixture("planar tangent partner not captured by a fold at theta = " +
                                         std::to_string(theta));
            }
        }
    }

    // accurate closed trig representation of the folded loop
    int K = opt.fit_degree, N = opt.fit_samples;
    for (int attempt = 0; attempt < 3; ++attempt) {
        fx.loop = TrigLoop::fit([&](double th) { return fx.loop_exact(th); }, K, N);
        double dev = 0;
        for (int k = 0; k < 8192; ++k) {
            double th = two_pi * k / 8192.0;
            Vec3 d = fx.loop.eval(th) - fx.loop_exact(th);
            dev = std::max(dev, norm(d));
        }
        fx.max_fit_deviation = dev;
        if (dev <= opt.fit_tol) break;
        K += K / 2;
        N = 4 * K + 8;
    }
    if (fx.max_fit_deviation > opt.fit_tol)
        throw InvalidFixture("trig fit of the folded loop misses tolerance: deviation " +
                             std::to_string(fx.max_fit_deviation));

    // surface mesh: polar triangulation of the flat domain mapped through the fold
    const int R = opt.mesh_rings, S = opt.mesh_sectors;
    auto vertex = [&](int j, int k) {
        double r = double(j) / R;
        double th = two_pi * k / S;
        return fx.fold_map(rounded_triangle_point(opt.support_eps, th) * r);
    };
    for (int j = 0; j < R; ++j) {
        for (int k = 0; k < S; ++k) {
            int k1 = (k + 1) % S;
            Vec3 a = vertex(j, k), b = vertex(j + 1, k), c = vertex(j + 1, k1), d = vertex(j, k1);
            fx.mesh.push_back({a, b, c});
            if (j > 0) fx.mesh.push_back({a, c, d});
        }
    }
    return fx;
}

// A folded surface with flat pieces admits no continuous line foliation:
// the flat region borders strips with pairwise non-parallel rulings, so
// the ruled constructors must reject it.
inline DevelopableSurface make_ruled_from_folded(const BuragoFixture& fx) {
    if (fx.dihedral == 0.0)
        throw std::invalid_argument(
            "make_ruled_from_folded: unfolded fixture is a plane; use a cylinder patch instead");
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            if (std::fabs(cross(fx.folds[i].normal, fx.folds[j].normal)) > 1e-12) {
                throw NonRuled(
                    "surface contains a flat piece bordered by bends with non-parallel rulings; "
                    "no continuous ruling foliation exists");
            }
        }
    }
    throw NonRuled("folded surface with flat pieces is not a ruled developable");
}

}  // namespace skewloop
