#pragma once

// Morse-Bott bookkeeping: measured indices of the critical manifolds,
// Poincare-polynomial arithmetic over the integers, the
// sum t^mu_i P(N_i) = P(L) + (1+t) Q_t identity check, and the
// signature-specific count-bound verifiers.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skewloop/detail/numeric.hpp"
#include "skewloop/loop.hpp"
#include "skewloop/pair_critical.hpp"
#include "skewloop/quadric.hpp"

namespace skewloop {

// Polynomial with integer coefficients; coefficient of t^k at position k.
// Used both for Poincare polynomials (coefficients >= 0) and for the
// quotient Q_t, whose coefficients may go negative when the inequalities
// fail.
class IntPoly {
  public:
    IntPoly() = default;
    IntPoly(std::initializer_list<long long> c) : c_(c) { trim(); }
    explicit IntPoly(std::vector<long long> c) : c_(std::move(c)) { trim(); }

    static IntPoly zero() { return IntPoly{}; }
    static IntPoly one() { return IntPoly{1}; }
    static IntPoly monomial(int k, long long coeff = 1) {
        std::vector<long long> c(k + 1, 0);
        c[k] = coeff;
        return IntPoly(std::move(c));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    long long coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : 0;
    }
    const std::vector<long long>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    bool nonnegative() const {
        return std::all_of(c_.begin(), c_.end(), [](long long v) { return v >= 0; });
    }

    IntPoly operator+(const IntPoly& o) const {
        std::vector<long long> c(std::max(c_.size(), o.c_.size()), 0);
        for (size_t k = 0; k < c.size(); ++k) c[k] = coeff(int(k)) + o.coeff(int(k));
        return IntPoly(std::move(c));
    }
    IntPoly operator-(const IntPoly& o) const {
        std::vector<long long> c(std::max(c_.size(), o.c_.size()), 0);
        for (size_t k = 0; k < c.size(); ++k) c[k] = coeff(int(k)) - o.coeff(int(k));
        return IntPoly(std::move(c));
    }
    IntPoly operator*(const IntPoly& o) const {
        if (is_zero() || o.is_zero()) return {};
        std::vector<long long> c(c_.size() + o.c_.size() - 1, 0);
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
        return IntPoly(std::move(c));
    }
    IntPoly operator*(long long s) const {
        std::vector<long long> c(c_);
        for (auto& v : c) v *= s;
        return IntPoly(std::move(c));
    }
    bool operator==(const IntPoly& o) const { return c_ == o.c_; }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::string s;
        for (int k = 0; k <= degree(); ++k) {
            long long v = coeff(k);
            if (v == 0) continue;
            if (!s.empty()) s += v > 0 ? " + " : " - ";
            else if (v < 0) s += "-";
            long long av = v < 0 ? -v : v;
            if (av != 1 || k == 0) s += std::to_string(av);
            if (k >= 1) s += av != 1 ? "*t" : "t";
            if (k >= 2) s += "^" + std::to_string(k);
        }
        return s;
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<long long> c_;
};

// Exact division by (1 + t): returns {quotient, remainder}; remainder is a
// constant (the value of the dividend at t = -1).
inline std::pair<IntPoly, long long> divide_by_one_plus_t(const IntPoly& p) {
    int d = p.degree();
    if (d < 0) return {IntPoly::zero(), 0};
    std::vector<long long> q(std::max(d, 0), 0);
    long long carry = 0;
    for (int k = d; k >= 1; --k) {
        long long qk = p.coeff(k) - carry;
        q[k - 1] = qk;
        carry = qk;
    }
    long long rem = p.coeff(0) - carry;
    return {IntPoly(std::move(q)), rem};
}

enum class ManifoldKind { Diagonal, Double, Antipodal, Isolated };

inline const char* to_string(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::Diagonal: return "diagonal";
        case ManifoldKind::Double: return "double";
        case ManifoldKind::Antipodal: return "antipodal";
        case ManifoldKind::Isolated: return "isolated";
    }
    return "?";
}

struct CriticalManifoldRecord {
    ManifoldKind kind = ManifoldKind::Isolated;
    int morse_index = 0;
    IntPoly poincare = IntPoly::one();
    long long multiplicity = 1;  // for isolated points
};

struct MorseLedger {
    std::vector<CriticalManifoldRecord> records;
    IntPoly ambient;            // Poincare polynomial of M x M
    IntPoly lhs;                // sum of t^mu * P(N_i), filled by the check
    IntPoly q_t;                // quotient, possibly with negative coefficients
    long long remainder = 0;
    bool division_exact = false;
    bool q_nonnegative = false;
    bool satisfied = false;
    bool diagonal_refused = false;   // induced form changes type along the loop
    bool degenerate_present = false; // non-Morse data fed in; identity not applicable
    std::vector<std::string> notes;
};

// Fill lhs / q_t / satisfied by exact integer arithmetic.
inline MorseLedger check_morse_inequalities(MorseLedger ledger) {
    IntPoly lhs;
    for (const auto& rec : ledger.records)
        lhs = lhs + IntPoly::monomial(rec.morse_index) * rec.poincare * rec.multiplicity;
    ledger.lhs = lhs;
    auto [q, rem] = divide_by_one_plus_t(lhs - ledger.ambient);
    ledger.q_t = q;
    ledger.remainder = rem;
    ledger.division_exact = rem == 0;
    ledger.q_nonnegative = q.nonnegative();
    ledger.satisfied = !ledger.diagonal_refused && !ledger.degenerate_present &&
                       ledger.division_exact && ledger.q_nonnegative;
    if (!ledger.division_exact)
        ledger.notes.push_back("division by (1+t) leaves remainder " + std::to_string(rem));
    if (!ledger.q_nonnegative)
        ledger.notes.push_back("Q_t has a negative coefficient: " + ledger.q_t.to_string());
    return ledger;
}

// ---------------------------------------------------------------------------
// Measured restricted indices
// ---------------------------------------------------------------------------

struct DegenerateIndex : std::domain_error {
    using std::domain_error::domain_error;
};

// Index at an isolated critical point or census pair: the number of
// negative eigenvalues of the full 2x2 Hessian (A and B are isolated in
// the loop case, so the normal bundle is everything).
inline int restricted_index(const QuadricLoop& loop, const PairPoint& p,
                            double eigen_tol = 1e-10) {
    auto g = phi_grad(loop, p);
    if (std::hypot(g[0], g[1]) > 1e-9)
        throw std::invalid_argument("restricted_index: point is not critical, |grad| = " +
                                    std::to_string(std::hypot(g[0], g[1])));
    auto h = phi_hess(loop, p);
    auto eig = detail::sym2_eigenvalues(h[0], h[1], h[2]);
    if (std::fabs(eig[0]) < eigen_tol || std::fabs(eig[1]) < eigen_tol)
        throw DegenerateIndex("restricted_index: eigenvalue within tolerance of zero");
    return (eig[0] < 0) + (eig[1] < 0);
}

// Index of the diagonal at (s, s): second derivative of phi along the
// normal direction (u, -u). Equals the sign class of -(f'.f'), so it is 1
// on space-like arcs and 0 on time-like ones.
inline int restricted_index_diagonal(const QuadricLoop& loop, double s,
                                     double eigen_tol = 1e-10) {
    PairPoint p{s, s};
    auto h = phi_hess(loop, p);
    double normal_hess = h[0] - 2.0 * h[1] + h[2];
    if (std::fabs(normal_hess) < eigen_tol)
        throw DegenerateIndex("restricted_index_diagonal: degenerate normal Hessian");
    return normal_hess < 0 ? 1 : 0;
}

struct IndexCounts {
    int d0 = 0, d1 = 0, d2 = 0;  // per unordered parallel-tangent pair
    int total() const { return d0 + d1 + d2; }
};

inline IndexCounts count_indices(const std::vector<CriticalPointRecord>& records) {
    IndexCounts c;
    for (const auto& r : records) {
        if (r.cls != CriticalClass::ParallelTangent) continue;
        if (r.morse_index == 0) ++c.d0;
        else if (r.morse_index == 1) ++c.d1;
        else ++c.d2;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Ledger assembly from measured data
// ---------------------------------------------------------------------------

struct DiagonalData {
    bool constant_type = false;  // sign of f'.f' constant along the loop
    bool space_like = false;
    double min_tangent_square = 0;
    double max_tangent_square = 0;
    int measured_index = -1;
};

inline DiagonalData diagonal_data(const QuadricLoop& loop, int grid = 4096) {
    DiagonalData d;
    d.min_tangent_square = std::numeric_limits<double>::infinity();
    d.max_tangent_square = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        double t = two_pi * i / grid;
        Vec3 v = loop.eval(t, 1);
        double vv = pseudo_dot(v, v, loop.quadric().metric);
        d.min_tangent_square = std::min(d.min_tangent_square, vv);
        d.max_tangent_square = std::max(d.max_tangent_square, vv);
    }
    d.constant_type = d.min_tangent_square > 0 || d.max_tangent_square < 0;
    d.space_like = d.min_tangent_square > 0;
    if (d.constant_type) d.measured_index = d.space_like ? 1 : 0;
    return d;
}

// Assemble the ledger from measured indices: the diagonal circle, each
// census pair entered twice (as (x,y) and (y,x)), and each isolated
// parallel-tangent pair entered twice. Indices are measured, never taken
// from closed forms.
inline MorseLedger build_measured_ledger(const QuadricLoop& loop, const IntersectionCensus& cen,
                                         const CriticalPointResult& cps) {
    MorseLedger ledger;
    ledger.ambient = IntPoly{1, 2, 1};  // torus

    DiagonalData diag = diagonal_data(loop);
    if (!diag.constant_type) {
        ledger.diagonal_refused = true;
        ledger.notes.push_back(
            "NonConstantType: tangent square form changes sign along the loop; the diagonal "
            "is not a non-degenerate critical manifold");
    } else {
        CriticalManifoldRecord d;
        d.kind = ManifoldKind::Diagonal;
        d.morse_index = diag.measured_index;
        d.poincare = IntPoly{1, 1};  // circle
        d.multiplicity = 1;
        ledger.records.push_back(d);
    }

    auto add_pairs = [&](const std::vector<CensusPair>& pairs, ManifoldKind kind) {
        for (const auto& p : pairs) {
            if (!p.transversal) {
                ledger.notes.push_back("tangential census pair skipped in ledger");
                continue;
            }
            CriticalManifoldRecord r;
            r.kind = kind;
            r.morse_index = restricted_index(loop, PairPoint{p.s, p.t});
            r.poincare = IntPoly::one();
            r.multiplicity = 2;
            ledger.records.push_back(r);
        }
    };
    add_pairs(cen.double_points, ManifoldKind::Double);
    add_pairs(cen.antipodal_points, ManifoldKind::Antipodal);

    for (const auto& r : cps.records) {
        if (r.cls == CriticalClass::Degenerate) {
            ledger.degenerate_present = true;
            ledger.notes.push_back("degenerate critical point present; identity not applicable");
            continue;
        }
        if (r.cls != CriticalClass::ParallelTangent) continue;  // A/B covered by the census
        CriticalManifoldRecord rec;
        rec.kind = ManifoldKind::Isolated;
        rec.morse_index = r.morse_index;
        rec.poincare = IntPoly::one();
        rec.multiplicity = 2;
        ledger.records.push_back(rec);
    }
    return check_morse_inequalities(std::move(ledger));
}

// ---------------------------------------------------------------------------
// Count-bound verification per signature
// ---------------------------------------------------------------------------

struct SpaceLikeViolation : std::domain_error {
    double parameter;
    explicit SpaceLikeViolation(double t)
        : std::domain_error("loop is not space-like near t = " + std::to_string(t)),
          parameter(t) {}
};

struct BoundCheck {
    std::string name;
    long long measured = 0;
    long long bound = 0;
    bool pass = false;
};

struct TheoremReport {
    std::string signature_case;  // which hypersurface case applies
    std::vector<BoundCheck> checks;
    bool all_pass = false;
    bool space_like = false;
    bool covered = true;  // false when the signature/census lies outside the proved cases
    std::vector<std::string> notes;
};

inline TheoremReport theorem_bounds(const IntersectionCensus& cen, const IndexCounts& counts,
                                    const Quadric& quadric, const QuadricLoop& loop) {
    TheoremReport rep;
    const int p = quadric.p(), q = quadric.q();
    const long long a = cen.a, b = cen.b;
    const long long total = counts.total();

    auto add = [&](std::string name, long long measured, long long bound) {
        rep.checks.push_back({std::move(name), measured, bound, measured >= bound});
    };

    // Non-emptiness holds on every non-degenerate quadric.
    add("parallel_tangent_pairs >= 1", total, 1);

    if (p == 0 && q == 2) {
        rep.signature_case = "two_sheeted_hyperboloid";
        if (b != 0) {
            rep.covered = false;
            rep.notes.push_back("antipodal pairs present on a two-sheeted hyperboloid loop");
        }
        add("d1 >= 1 + a", counts.d1, 1 + a);
        add("d2 >= 1", counts.d2, 1);
        add("d1 + d2 >= 2 + a", counts.d1 + counts.d2, 2 + a);
    } else if (p == 1 && q == 1) {
        rep.signature_case = "one_sheeted_hyperboloid";
        DiagonalData diag = diagonal_data(loop);
        if (!diag.space_like) {
            // locate an offending parameter for the error message
            for (int i = 0; i < 4096; ++i) {
                double t = two_pi * i / 4096;
                Vec3 v = loop.eval(t, 1);
                if (pseudo_dot(v, v, quadric.metric) <= 0) throw SpaceLikeViolation(t);
            }
            throw SpaceLikeViolation(0.0);
        }
        rep.space_like = true;
        add("d0 + d2 >= a + b", counts.d0 + counts.d2, a + b);
        if (a == 0 && b == 0) add("total >= 2 (a = b = 0)", total, 2);
    } else if (p == 2 && q == 0) {
        rep.signature_case = "sphere";
        if (b == 0) {
            add("total >= a + 2 (b = 0)", total, a + 2);
        } else {
            add("total >= a + b", total, a + b);
            rep.notes.push_back("sharper spherical bound requires b = 0");
        }
    } else {
        rep.signature_case = "other";
        rep.covered = false;
    }

    rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                               [](const BoundCheck& c) { return c.pass; });
    return rep;
}

}  // namespace skewloop
