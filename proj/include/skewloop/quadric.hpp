#pragma once

// Pseudo-Euclidean linear algebra for diagonal forms of signature (p+1, q),
// the unit quadric {x . x = 1}, and affine parallelism of tangent lines.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewloop/detail/numeric.hpp"

namespace skewloop {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Euclidean reference products; parallelism and proximity are affine
// notions and never use the pseudo-metric.
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotNormalizable : std::domain_error {
    using std::domain_error::domain_error;
};

struct EmptySection : std::domain_error {
    using std::domain_error::domain_error;
};

// Diagonal bilinear form given by a sign sequence. dim is the length of the
// sequence; the loop solvers are written for dim == 3 (V = R^3, n = 1).
class PseudoMetric {
  public:
    explicit PseudoMetric(std::vector<int> signs) : signs_(std::move(signs)) {
        for (int s : signs_) {
            if (s == 1) ++p_plus_;
            else if (s == -1) ++q_minus_;
            else throw std::invalid_argument("PseudoMetric: signs must be +1 or -1");
        }
        if (p_plus_ < 1)
            throw std::invalid_argument("PseudoMetric: need at least one +1 (quadric must be non-empty)");
    }

    static PseudoMetric euclidean(int dim = 3) { return PseudoMetric(std::vector<int>(dim, 1)); }

    int dim() const { return static_cast<int>(signs_.size()); }
    int p_plus() const { return p_plus_; }
    int q_minus() const { return q_minus_; }
    int sign(int i) const { return signs_[i]; }
    const std::vector<int>& signs() const { return signs_; }

    bool operator==(const PseudoMetric& o) const { return signs_ == o.signs_; }

  private:
    std::vector<int> signs_;
    int p_plus_ = 0, q_minus_ = 0;
};

inline double pseudo_dot(const Vec3& u, const Vec3& v, const PseudoMetric& m) {
    if (m.dim() > 3) throw DimensionMismatch("pseudo_dot: dim > 3 not supported by Vec3 backend");
    double s = 0;
    for (int i = 0; i < m.dim(); ++i) s += m.sign(i) * u[i] * v[i];
    return s;
}

// The unit pseudosphere Q = {x : x.x = 1}. With signature (p+1, q) the
// paper-level invariants are p = p_plus - 1 and q = q_minus.
struct Quadric {
    PseudoMetric metric;

    explicit Quadric(PseudoMetric m) : metric(std::move(m)) {}
    static Quadric sphere() { return Quadric(PseudoMetric({1, 1, 1})); }
    // z^2 - x^2 - y^2 = 1, two sheets
    static Quadric two_sheeted() { return Quadric(PseudoMetric({-1, -1, 1})); }
    // x^2 + y^2 - z^2 = 1, one sheet
    static Quadric one_sheeted() { return Quadric(PseudoMetric({1, 1, -1})); }

    int p() const { return metric.p_plus() - 1; }
    int q() const { return metric.q_minus(); }
};

inline bool on_quadric(const Vec3& x, const Quadric& q, double tol = 1e-12) {
    return std::fabs(pseudo_dot(x, x, q.metric) - 1.0) <= tol;
}

// Radial projection g -> g / sqrt(g.g). Defined only on rays that meet Q.
inline Vec3 normalize_to_quadric(const Vec3& g, const Quadric& q) {
    double gg = pseudo_dot(g, g, q.metric);
    if (gg <= 0)
        throw NotNormalizable("normalize_to_quadric: g.g = " + std::to_string(gg) +
                              " <= 0, ray misses the quadric");
    return g / std::sqrt(gg);
}

// Unoriented angle between the lines spanned by v1 and v2, Euclidean
// reference product, in [0, pi/2].
inline double line_angle(const Vec3& v1, const Vec3& v2) {
    double n1 = norm(v1), n2 = norm(v2);
    if (n1 == 0 || n2 == 0) throw std::invalid_argument("line_angle: zero vector");
    double s = norm(cross(v1, v2)) / (n1 * n2);
    return std::asin(std::min(1.0, s));
}

inline bool lines_parallel(const Vec3& v1, const Vec3& v2, double angle_tol = 1e-7) {
    if (angle_tol <= 0) throw std::invalid_argument("lines_parallel: angle_tol must be > 0");
    return line_angle(v1, v2) <= angle_tol;
}

// Sampled intersection of a 2-plane U = span(u1, u2) with Q.
//
// The restriction of the metric to U is diagonalized; positive directions
// are parameterized by angle, mixed-sign sections by hyperbolic angle on a
// window [-asinh(R), asinh(R)] per branch (sections are unbounded).
struct PlaneSection {
    enum class Kind { Ellipse, Hyperbola, ParallelLines };
    Kind kind;
    std::vector<std::vector<Vec3>> branches;
};

inline PlaneSection plane_section(const Vec3& u1, const Vec3& u2, const Quadric& q,
                                  int samples = 256, double window = 10.0) {
    if (norm(cross(u1, u2)) <= 1e-14 * norm(u1) * norm(u2))
        throw std::invalid_argument("plane_section: u1, u2 linearly dependent");

    // Gram matrix of the pseudo-metric restricted to span(u1, u2).
    const double g11 = pseudo_dot(u1, u1, q.metric);
    const double g12 = pseudo_dot(u1, u2, q.metric);
    const double g22 = pseudo_dot(u2, u2, q.metric);

    // Diagonalize [[g11, g12], [g12, g22]] by a rotation of the (u1, u2)
    // coordinates; eigenvectors give metric-diagonal directions in U.
    const double theta = 0.5 * std::atan2(2.0 * g12, g11 - g22);
    const double ct = std::cos(theta), st = std::sin(theta);
    const Vec3 w1 = u1 * ct + u2 * st;
    const Vec3 w2 = u1 * (-st) + u2 * ct;
    double lam1 = pseudo_dot(w1, w1, q.metric);
    double lam2 = pseudo_dot(w2, w2, q.metric);
    Vec3 e_pos = w1, e_other = w2;
    if (lam1 < lam2) {
        std::swap(lam1, lam2);
        e_pos = w2;
        e_other = w1;
    }
    // Now lam1 >= lam2.
    const double zero_tol = 1e-12 * (std::fabs(lam1) + std::fabs(lam2));
    if (lam1 <= zero_tol) throw EmptySection("plane_section: restriction of metric to U is <= 0");

    PlaneSection out;
    const Vec3 a = e_pos / std::sqrt(lam1);
    if (lam2 > zero_tol) {
        out.kind = PlaneSection::Kind::Ellipse;
        const Vec3 b = e_other / std::sqrt(lam2);
        std::vector<Vec3> branch;
        branch.reserve(samples);
        for (int i = 0; i < samples; ++i) {
            double t = two_pi * i / samples;
            branch.push_back(a * std::cos(t) + b * std::sin(t));
        }
        out.branches.push_back(std::move(branch));
    } else if (lam2 < -zero_tol) {
        out.kind = PlaneSection::Kind::Hyperbola;
        const Vec3 b = e_other / std::sqrt(-lam2);
        const double eta_max = std::asinh(window);
        for (int sgn : {+1, -1}) {
            std::vector<Vec3> branch;
            branch.reserve(samples);
            for (int i = 0; i < samples; ++i) {
                double eta = -eta_max + 2.0 * eta_max * i / (samples - 1);
                branch.push_back(a * (sgn * std::cosh(eta)) + b * std::sinh(eta));
            }
            out.branches.push_back(std::move(branch));
        }
    } else {
        // Degenerate direction: the section is a pair of parallel lines.
        out.kind = PlaneSection::Kind::ParallelLines;
        for (int sgn : {+1, -1}) {
            std::vector<Vec3> branch;
            branch.reserve(samples);
            for (int i = 0; i < samples; ++i) {
                double t = -window + 2.0 * window * i / (samples - 1);
                branch.push_back(a * double(sgn) + e_other * t);
            }
            out.branches.push_back(std::move(branch));
        }
    }
    return out;
}

}  // namespace skewloop
