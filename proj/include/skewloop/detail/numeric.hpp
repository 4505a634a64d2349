#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace skewloop {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double t) {
    t = std::fmod(t, two_pi);
    if (t < 0) t += two_pi;
    return t;
}

// Distance between two angles on the circle R/2piZ, in [0, pi].
inline double circle_dist(double a, double b) {
    double d = std::fabs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, two_pi - d);
}

namespace detail {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
struct Gauss16 {
    static constexpr std::array<double, 8> x = {
        0.09501250983763744019, 0.28160355077925891323,
        0.45801677765722738634, 0.61787624440264374845,
        0.75540440835500303390, 0.86563120238783174388,
        0.94457502307323257608, 0.98940093499164993260};
    static constexpr std::array<double, 8> w = {
        0.18945061045506849629, 0.18260341504492358887,
        0.16915651939500253819, 0.14959598881657673208,
        0.12462897125553387205, 0.09515851168249278481,
        0.06225352393864789286, 0.02715245941175409485};
};

// Integral of f over [a, b] with a single 16-point Gauss panel.
template <class F>
double gauss_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 8; ++i) {
        s += Gauss16::w[i] * (f(c + h * Gauss16::x[i]) + f(c - h * Gauss16::x[i]));
    }
    return s * h;
}

// Composite Gauss integration with n panels.
template <class F>
double integrate(F&& f, double a, double b, int panels = 64) {
    double s = 0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) s += gauss_panel(f, a + k * h, a + (k + 1) * h);
    return s;
}

// Cumulative integral of f from a: panelized prefix sums plus a tail panel,
// so repeated evaluations at scattered points stay O(1) panels each.
class CumulativeIntegral {
  public:
    template <class F>
    CumulativeIntegral(F&& f, double a, double b, int panels = 512)
        : fn_(std::forward<F>(f)), a_(a), h_((b - a) / panels), prefix_(panels + 1, 0.0) {
        for (int k = 0; k < panels; ++k) {
            prefix_[k + 1] = prefix_[k] + gauss_panel(fn_, a_ + k * h_, a_ + (k + 1) * h_);
        }
    }

    double operator()(double x) const {
        double u = (x - a_) / h_;
        int k = std::clamp(static_cast<int>(std::floor(u)), 0,
                           static_cast<int>(prefix_.size()) - 2);
        return prefix_[k] + gauss_panel(fn_, a_ + k * h_, x);
    }

    double total() const { return prefix_.back(); }

  private:
    std::function<double(double)> fn_;
    double a_, h_;
    std::vector<double> prefix_;
};

// Bisection on a bracketed sign change; returns the midpoint of the final
// interval. f(lo) and f(hi) must have opposite (or zero) signs.
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-12, int max_iter = 200) {
    double flo = f(lo);
    for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((flo <= 0 && fm <= 0) || (flo >= 0 && fm >= 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Golden-section minimization on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, double xtol = 1e-12) {
    constexpr double invphi = 0.6180339887498948482;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a); f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// Eigenvalues of the symmetric 2x2 matrix [[a, b], [b, c]], ascending.
inline std::array<double, 2> sym2_eigenvalues(double a, double b, double c) {
    const double tr = a + c;
    const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
    return {0.5 * tr - disc, 0.5 * tr + disc};
}

// Deterministic uniform doubles in [0, 1); independent of libstdc++
// distribution internals so frozen test values stay portable.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::uint64_t state_;
};

inline int thread_count_from_env() {
    if (const char* s = std::getenv("SKEWLOOP_THREADS")) {
        int n = std::atoi(s);
        if (n >= 1) return n;
    }
    return 1;
}

// Static row partition; each worker fills its own slot, results are merged
// in index order so the outcome is independent of the thread count.
template <class Body>
void parallel_rows(int n_rows, Body&& body) {
    int n_threads = std::min(thread_count_from_env(), n_rows > 0 ? n_rows : 1);
    if (n_threads <= 1) {
        for (int r = 0; r < n_rows; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w] {
            for (int r = w; r < n_rows; r += n_threads) body(r);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail
}  // namespace skewloop
