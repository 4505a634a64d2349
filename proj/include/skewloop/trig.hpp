#pragma once

// Scalar and vector-valued trigonometric polynomials with period 2*pi.
// Derivatives are exact (term by term); sums and products stay in the
// class, which is what lets surface fixtures carry exact on-surface loops.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "skewloop/detail/numeric.hpp"
#include "skewloop/quadric.hpp"

namespace skewloop {

class TrigPoly {
  public:
    TrigPoly() = default;
    explicit TrigPoly(double c0, std::vector<double> a = {}, std::vector<double> b = {})
        : c0_(c0), a_(std::move(a)), b_(std::move(b)) {
        if (a_.size() != b_.size()) {
            size_t n = std::max(a_.size(), b_.size());
            a_.resize(n, 0.0);
            b_.resize(n, 0.0);
        }
        trim();
    }

    static TrigPoly constant(double c) { return TrigPoly(c); }

    // a*cos(k t) + b*sin(k t)
    static TrigPoly harmonic(int k, double a, double b) {
        if (k < 1) throw std::invalid_argument("TrigPoly::harmonic: k >= 1");
        std::vector<double> av(k, 0.0), bv(k, 0.0);
        av[k - 1] = a;
        bv[k - 1] = b;
        return TrigPoly(0.0, std::move(av), std::move(bv));
    }

    int degree() const { return static_cast<int>(a_.size()); }
    double c0() const { return c0_; }
    double a(int k) const { return (k >= 1 && k <= degree()) ? a_[k - 1] : 0.0; }
    double b(int k) const { return (k >= 1 && k <= degree()) ? b_[k - 1] : 0.0; }

    double eval(double t, int order = 0) const {
        double s = (order == 0) ? c0_ : 0.0;
        for (int k = 1; k <= degree(); ++k) {
            const double ck = std::cos(k * t), sk = std::sin(k * t);
            const double ak = a_[k - 1], bk = b_[k - 1];
            switch (order) {
                case 0: s += ak * ck + bk * sk; break;
                case 1: s += k * (-ak * sk + bk * ck); break;
                case 2: s += -double(k) * k * (ak * ck + bk * sk); break;
                case 3: s += double(k) * k * k * (ak * sk - bk * ck); break;
                default: throw std::invalid_argument("TrigPoly::eval: order > 3");
            }
        }
        return s;
    }

    TrigPoly derivative() const {
        std::vector<double> a(degree()), b(degree());
        for (int k = 1; k <= degree(); ++k) {
            a[k - 1] = k * b_[k - 1];
            b[k - 1] = -k * a_[k - 1];
        }
        return TrigPoly(0.0, std::move(a), std::move(b));
    }

    TrigPoly operator+(const TrigPoly& o) const {
        int n = std::max(degree(), o.degree());
        std::vector<double> a(n, 0.0), b(n, 0.0);
        for (int k = 1; k <= n; ++k) {
            a[k - 1] = this->a(k) + o.a(k);
            b[k - 1] = this->b(k) + o.b(k);
        }
        return TrigPoly(c0_ + o.c0_, std::move(a), std::move(b));
    }

    TrigPoly operator-(const TrigPoly& o) const { return *this + (o * -1.0); }

    TrigPoly operator*(double s) const {
        std::vector<double> a(a_), b(b_);
        for (auto& v : a) v *= s;
        for (auto& v : b) v *= s;
        return TrigPoly(c0_ * s, std::move(a), std::move(b));
    }

    // Exact product via the complex coefficient convolution.
    TrigPoly operator*(const TrigPoly& o) const {
        const int K1 = degree(), K2 = o.degree(), K = K1 + K2;
        // complex coefficients c_m = (a_m - i b_m)/2 for m > 0, c_0 = c0
        auto cre = [](const TrigPoly& p, int m) {
            if (m == 0) return p.c0();
            return 0.5 * p.a(std::abs(m));
        };
        auto cim = [](const TrigPoly& p, int m) {
            if (m == 0) return 0.0;
            return (m > 0 ? -0.5 : 0.5) * p.b(std::abs(m));
        };
        std::vector<double> re(K + 1, 0.0), im(K + 1, 0.0);
        for (int m1 = -K1; m1 <= K1; ++m1) {
            for (int m2 = -K2; m2 <= K2; ++m2) {
                int m = m1 + m2;
                if (m < 0) continue;  // conjugate symmetry supplies m < 0
                double xr = cre(*this, m1) * cre(o, m2) - cim(*this, m1) * cim(o, m2);
                double xi = cre(*this, m1) * cim(o, m2) + cim(*this, m1) * cre(o, m2);
                re[m] += xr;
                im[m] += xi;
            }
        }
        std::vector<double> a(K, 0.0), b(K, 0.0);
        for (int m = 1; m <= K; ++m) {
            a[m - 1] = 2.0 * re[m];
            b[m - 1] = -2.0 * im[m];
        }
        return TrigPoly(re[0], std::move(a), std::move(b));
    }

    // Projection of a periodic function onto degree-K trig polynomials by
    // the trapezoid rule on n samples (spectrally accurate; exact for
    // band-limited inputs when n > 2K).
    template <class F>
    static TrigPoly fit(F&& f, int K, int n = 0) {
        if (n <= 0) n = std::max(4 * K + 8, 64);
        std::vector<double> vals(n);
        for (int j = 0; j < n; ++j) vals[j] = f(two_pi * j / n);
        double c0 = 0;
        for (double v : vals) c0 += v;
        c0 /= n;
        std::vector<double> a(K, 0.0), b(K, 0.0);
        for (int k = 1; k <= K; ++k) {
            double ak = 0, bk = 0;
            for (int j = 0; j < n; ++j) {
                double t = two_pi * j / n;
                ak += vals[j] * std::cos(k * t);
                bk += vals[j] * std::sin(k * t);
            }
            a[k - 1] = 2.0 * ak / n;
            b[k - 1] = 2.0 * bk / n;
        }
        return TrigPoly(c0, std::move(a), std::move(b));
    }

  private:
    void trim() {
        while (!a_.empty() && a_.back() == 0.0 && b_.back() == 0.0) {
            a_.pop_back();
            b_.pop_back();
        }
    }

    double c0_ = 0;
    std::vector<double> a_, b_;  // a_[k-1] cos(kt) + b_[k-1] sin(kt)
};

inline TrigPoly operator*(double s, const TrigPoly& p) { return p * s; }

// A closed parametric curve with trig-polynomial coordinates. dim is 2 for
// curves in the graph-quadric base plane W, 3 otherwise; the unused third
// coordinate is identically zero.
class TrigLoop {
  public:
    TrigLoop() : dim_(3) {}
    TrigLoop(TrigPoly x, TrigPoly y, TrigPoly z) : dim_(3), c_{std::move(x), std::move(y), std::move(z)} {}

    static TrigLoop planar(TrigPoly x, TrigPoly y) {
        TrigLoop l(std::move(x), std::move(y), TrigPoly{});
        l.dim_ = 2;
        return l;
    }

    int dim() const { return dim_; }
    int degree() const { return std::max({c_[0].degree(), c_[1].degree(), c_[2].degree()}); }
    const TrigPoly& coord(int i) const { return c_[i]; }

    Vec3 eval(double t, int order = 0) const {
        return {c_[0].eval(t, order), c_[1].eval(t, order), c_[2].eval(t, order)};
    }

    TrigLoop derivative() const {
        TrigLoop d(c_[0].derivative(), c_[1].derivative(), c_[2].derivative());
        d.dim_ = dim_;
        return d;
    }

    TrigLoop operator+(const TrigLoop& o) const {
        TrigLoop r(c_[0] + o.c_[0], c_[1] + o.c_[1], c_[2] + o.c_[2]);
        r.dim_ = std::max(dim_, o.dim_);
        return r;
    }

    TrigLoop operator-(const TrigLoop& o) const {
        TrigLoop r(c_[0] - o.c_[0], c_[1] - o.c_[1], c_[2] - o.c_[2]);
        r.dim_ = std::max(dim_, o.dim_);
        return r;
    }

    // Scale each coordinate by the same scalar trig polynomial.
    TrigLoop scaled_by(const TrigPoly& w) const {
        TrigLoop r(c_[0] * w, c_[1] * w, c_[2] * w);
        r.dim_ = dim_;
        return r;
    }

    TrigLoop translated(const Vec3& v) const {
        TrigLoop r(c_[0] + TrigPoly::constant(v.x), c_[1] + TrigPoly::constant(v.y),
                   c_[2] + TrigPoly::constant(v.z));
        r.dim_ = dim_;
        return r;
    }

    template <class F>
    static TrigLoop fit(F&& f, int K, int n = 0) {
        return TrigLoop(TrigPoly::fit([&](double t) { return f(t).x; }, K, n),
                        TrigPoly::fit([&](double t) { return f(t).y; }, K, n),
                        TrigPoly::fit([&](double t) { return f(t).z; }, K, n));
    }

  private:
    int dim_;
    std::array<TrigPoly, 3> c_;
};

}  // namespace skewloop
