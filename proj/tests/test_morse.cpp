#include <gtest/gtest.h>

#include "skewloop/morse.hpp"
#include "test_util.hpp"

using namespace skewloop;
using namespace testutil;

TEST(IntPoly, ExactArithmetic) {
    IntPoly a{1, 1};           // 1 + t
    IntPoly sq = a * a;        // (1 + t)^2
    EXPECT_EQ(sq, (IntPoly{1, 2, 1}));
    EXPECT_EQ(a + a, (IntPoly{2, 2}));
    EXPECT_EQ(IntPoly::monomial(2, 3), (IntPoly{0, 0, 3}));
    EXPECT_EQ((IntPoly{1, 0, -1}) - (IntPoly{1, 0, -1}), IntPoly::zero());
}

TEST(IntPoly, DivisionByOnePlusT) {
    detail::Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<long long> q(1 + trial % 4);
        for (auto& c : q) c = static_cast<long long>(rng.uniform(-5, 6));
        IntPoly quotient(q);
        IntPoly prod = quotient * IntPoly{1, 1};
        auto [back, rem] = divide_by_one_plus_t(prod);
        EXPECT_EQ(rem, 0);
        EXPECT_EQ(back, quotient);  // re-multiplication round trip
        auto [q2, rem2] = divide_by_one_plus_t(prod + IntPoly{3});
        EXPECT_EQ(rem2, 3);
    }
}

TEST(Ledger, HeightFunctionOnCircle) {
    // two critical points, indices 0 and 1; L = circle
    MorseLedger ledger;
    ledger.ambient = IntPoly{1, 1};
    ledger.records.push_back({ManifoldKind::Isolated, 0, IntPoly::one(), 1});
    ledger.records.push_back({ManifoldKind::Isolated, 1, IntPoly::one(), 1});
    ledger = check_morse_inequalities(std::move(ledger));
    EXPECT_TRUE(ledger.satisfied);
    EXPECT_TRUE(ledger.q_t.is_zero());
}

TEST(Ledger, SphereSkewHypothesisContradiction) {
    // diagonal only (index 1, circle) against the torus: Q_t = -1
    MorseLedger ledger;
    ledger.ambient = IntPoly{1, 2, 1};
    ledger.records.push_back({ManifoldKind::Diagonal, 1, IntPoly{1, 1}, 1});
    ledger = check_morse_inequalities(std::move(ledger));
    EXPECT_FALSE(ledger.satisfied);
    EXPECT_TRUE(ledger.division_exact);
    EXPECT_EQ(ledger.q_t, (IntPoly{-1}));
}

TEST(Ledger, TwoSheetedWorkedExample) {
    // a = 0, d = (0, 1, 1): LHS = (1+t) + 2t + 2t^2, Q_t = t
    MorseLedger ledger;
    ledger.ambient = IntPoly{1, 2, 1};
    ledger.records.push_back({ManifoldKind::Diagonal, 0, IntPoly{1, 1}, 1});
    ledger.records.push_back({ManifoldKind::Isolated, 1, IntPoly::one(), 2});
    ledger.records.push_back({ManifoldKind::Isolated, 2, IntPoly::one(), 2});
    ledger = check_morse_inequalities(std::move(ledger));
    EXPECT_TRUE(ledger.satisfied);
    EXPECT_EQ(ledger.lhs, (IntPoly{1, 3, 2}));
    EXPECT_EQ(ledger.q_t, (IntPoly{0, 1}));
}

TEST(RestrictedIndex, MeasuredAgainstClosedForms) {
    // A-points measure p, B-points measure q, signature by signature
    struct Case {
        QuadricLoop loop;
        int expect_a_index;  // -1 = no A points
        int expect_b_index;  // -1 = no B points
    };
    std::vector<Case> cases;
    cases.push_back({figure_eight_sphere(), 2, -1});          // (3,0): p = 2
    cases.push_back({antipodal_sphere(), -1, 0});             // (3,0): q = 0
    cases.push_back({figure_eight_two_sheeted(), 0, -1});     // (1,2): p = 0
    cases.push_back({double_wind_one_sheeted(), 1, 1});       // (2,1): p = q = 1
    cases.push_back({antipodal_one_sheeted(), -1, 1});        // (2,1): q = 1

    for (const auto& c : cases) {
        IntersectionCensus cen = census(c.loop);
        if (c.expect_a_index >= 0) {
            ASSERT_FALSE(cen.double_points.empty());
            for (const auto& p : cen.double_points)
                EXPECT_EQ(restricted_index(c.loop, {p.s, p.t}), c.expect_a_index);
        }
        if (c.expect_b_index >= 0) {
            ASSERT_FALSE(cen.antipodal_points.empty());
            for (const auto& p : cen.antipodal_points)
                EXPECT_EQ(restricted_index(c.loop, {p.s, p.t}), c.expect_b_index);
        }
    }
}

TEST(RestrictedIndex, DiagonalByInducedType) {
    // two-sheeted hyperboloid: time-like tangents, diagonal index 0
    QuadricLoop upper = perturbed_latitude_two_sheeted();
    for (double s : {0.0, 1.0, 2.5, 5.0}) EXPECT_EQ(restricted_index_diagonal(upper, s), 0);
    DiagonalData d2 = diagonal_data(upper);
    EXPECT_TRUE(d2.constant_type);
    EXPECT_FALSE(d2.space_like);
    EXPECT_EQ(d2.measured_index, 0);

    // space-like loop on the one-sheeted hyperboloid: measured index 1
    QuadricLoop one = space_like_one_sheeted();
    for (double s : {0.3, 2.2, 4.4}) EXPECT_EQ(restricted_index_diagonal(one, s), 1);
    DiagonalData d1 = diagonal_data(one);
    EXPECT_TRUE(d1.space_like);
    EXPECT_EQ(d1.measured_index, 1);

    // sphere: space-like (Euclidean), index 1
    EXPECT_EQ(restricted_index_diagonal(perturbed_latitude_sphere(), 1.7), 1);
}

TEST(RestrictedIndex, RejectsNonCritical) {
    QuadricLoop loop = perturbed_latitude_sphere();
    EXPECT_THROW(restricted_index(loop, {0.3, 2.0}), std::invalid_argument);
}

TEST(MeasuredLedger, SatisfiedOnGenericFixtures) {
    for (const QuadricLoop& loop :
         {perturbed_latitude_sphere(), perturbed_latitude_two_sheeted(), space_like_one_sheeted(),
          figure_eight_sphere(), figure_eight_two_sheeted(), double_wind_one_sheeted(),
          antipodal_sphere(), antipodal_one_sheeted()}) {
        IntersectionCensus cen = census(loop);
        auto cps = find_critical_points(loop, cen);
        ASSERT_FALSE(cps.non_generic);
        MorseLedger ledger = build_measured_ledger(loop, cen, cps);
        EXPECT_TRUE(ledger.satisfied) << "lhs = " << ledger.lhs.to_string()
                                      << ", q_t = " << ledger.q_t.to_string();
        // verify the division by re-multiplication
        IntPoly rebuilt = ledger.ambient + ledger.q_t * IntPoly{1, 1};
        EXPECT_EQ(rebuilt, ledger.lhs);
    }
}

TEST(MeasuredLedger, RefusesMixedTypeDiagonal) {
    // non-space-like loop on the one-sheeted hyperboloid: tangent square
    // form changes sign, the diagonal is refused
    QuadricLoop mixed(TrigLoop(TrigPoly::harmonic(1, 1, 0), TrigPoly::harmonic(1, 0, 1),
                               TrigPoly::constant(0.2) + TrigPoly::harmonic(3, 0, 0.35)),
                      Quadric::one_sheeted(), LoopMode::Normalized);
    DiagonalData d = diagonal_data(mixed);
    EXPECT_FALSE(d.constant_type);
    IntersectionCensus cen = census(mixed);
    auto cps = find_critical_points(mixed, cen);
    MorseLedger ledger = build_measured_ledger(mixed, cen, cps);
    EXPECT_TRUE(ledger.diagonal_refused);
    EXPECT_FALSE(ledger.satisfied);
}

TEST(TheoremBounds, TwoSheetedCases) {
    QuadricLoop loop = perturbed_latitude_two_sheeted();
    IntersectionCensus cen = census(loop);
    auto cps = find_critical_points(loop, cen);
    TheoremReport rep = theorem_bounds(cen, count_indices(cps.records), loop.quadric(), loop);
    EXPECT_EQ(rep.signature_case, "two_sheeted_hyperboloid");
    EXPECT_TRUE(rep.all_pass);

    QuadricLoop fig8 = figure_eight_two_sheeted();
    IntersectionCensus cen8 = census(fig8);
    auto cps8 = find_critical_points(fig8, cen8);
    IndexCounts counts8 = count_indices(cps8.records);
    TheoremReport rep8 = theorem_bounds(cen8, counts8, fig8.quadric(), fig8);
    EXPECT_TRUE(rep8.all_pass);
    EXPECT_GE(counts8.d1, 1 + cen8.a);
    EXPECT_GE(counts8.d1 + counts8.d2, 2 + cen8.a);
}

TEST(TheoremBounds, OneSheetedCases) {
    QuadricLoop loop = space_like_one_sheeted();
    IntersectionCensus cen = census(loop);
    auto cps = find_critical_points(loop, cen);
    TheoremReport rep = theorem_bounds(cen, count_indices(cps.records), loop.quadric(), loop);
    EXPECT_EQ(rep.signature_case, "one_sheeted_hyperboloid");
    EXPECT_TRUE(rep.space_like);
    EXPECT_TRUE(rep.all_pass);

    QuadricLoop wind = double_wind_one_sheeted();
    IntersectionCensus cenw = census(wind);
    auto cpsw = find_critical_points(wind, cenw);
    IndexCounts countsw = count_indices(cpsw.records);
    TheoremReport repw = theorem_bounds(cenw, countsw, wind.quadric(), wind);
    EXPECT_TRUE(repw.all_pass);
    EXPECT_GE(countsw.d0 + countsw.d2, cenw.a + cenw.b);
}

TEST(TheoremBounds, SpaceLikeViolationCarriesParameter) {
    QuadricLoop mixed(TrigLoop(TrigPoly::harmonic(1, 1, 0), TrigPoly::harmonic(1, 0, 1),
                               TrigPoly::constant(0.2) + TrigPoly::harmonic(3, 0, 0.35)),
                      Quadric::one_sheeted(), LoopMode::Normalized);
    IntersectionCensus cen = census(mixed);
    IndexCounts counts;
    EXPECT_THROW(theorem_bounds(cen, counts, mixed.quadric(), mixed), SpaceLikeViolation);
}

TEST(TheoremBounds, NonEmptyOnAllFixtures) {
    // every generic loop on every implemented quadric has a pair
    for (const QuadricLoop& loop :
         {perturbed_latitude_sphere(), perturbed_latitude_two_sheeted(),
          space_like_one_sheeted(), figure_eight_sphere(), figure_eight_two_sheeted(),
          double_wind_one_sheeted(), antipodal_sphere(), antipodal_one_sheeted()}) {
        ParallelPairs pp = parallel_pairs(loop);
        EXPECT_FALSE(pp.pairs.empty());
    }
}
