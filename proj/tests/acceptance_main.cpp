// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Each criterion pins its tolerances in code; the corpus is seeded and
// fixed, so two runs of this binary see identical inputs.

#include <array>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "skewloop/burago.hpp"
#include "skewloop/formats.hpp"
#include "skewloop/report.hpp"
#include "surface_fixtures.hpp"
#include "test_util.hpp"

using namespace skewloop;
using namespace testutil;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            details.push_back(what);
        }
    }
};

struct CorpusEntry {
    std::string quadric;
    std::uint64_t seed;
    QuadricAnalysis analysis;
    bool oracle_bijection;
    double seconds;
};

std::vector<CorpusEntry> run_corpus() {
    struct Spec {
        std::string name;
        Quadric q;
        Vec3 base;
        RandomLoopOptions opt;
    };
    std::vector<Spec> specs = {
        {"sphere", Quadric::sphere(), {0, 0, 0.4}, {8, 0.35, -1.0}},
        {"two-sheeted", Quadric::two_sheeted(), {0, 0, 2.0}, {8, 0.35, -1.0}},
        {"one-sheeted", Quadric::one_sheeted(), {0, 0, 0.25}, {8, 0.35, 0.15}},
    };
    std::vector<CorpusEntry> out;
    for (const auto& spec : specs) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            QuadricLoop loop = make_random_loop(spec.q, seed, spec.base, spec.opt);
            CorpusEntry e;
            e.quadric = spec.name;
            e.seed = seed;
            e.analysis = analyze_quadric(loop);
            e.seconds = e.analysis.seconds;

            // bijection within torus distance 1e-5
            std::vector<PairPoint> mine;
            for (const auto& r : e.analysis.critical.records)
                if (r.cls == CriticalClass::ParallelTangent) mine.push_back(r.location);
            const auto& oracle = e.analysis.oracle.pairs;
            bool bij = !e.analysis.oracle.continuum_detected && mine.size() == oracle.size();
            if (bij)
                for (const auto& p : mine) {
                    double best = 1e9;
                    for (const auto& q : oracle) best = std::min(best, torus_dist(p, q));
                    if (best > 1e-5) { bij = false; break; }
                }
            e.oracle_bijection = bij;
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::string run_cli_capture(const std::string& args, int* exit_code) {
    std::string cmd = std::string(SKEWLOOP_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        *exit_code = -1;
        return out;
    }
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    *exit_code = WEXITSTATUS(pclose(pipe));
    return out;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;
    auto corpus = run_corpus();

    // ---- criterion 1: equivalence of the two detection routes ----
    {
        Criterion c{1, "critical-point route matches the brute-force oracle on 60 seeded loops"};
        for (const auto& e : corpus) {
            c.require(e.oracle_bijection,
                      e.quadric + " seed " + std::to_string(e.seed) + ": no bijection at 1e-5");
            c.require(e.seconds <= 60.0, e.quadric + " seed " + std::to_string(e.seed) +
                                             ": runtime " + std::to_string(e.seconds) + "s > 60s");
        }
        criteria.push_back(std::move(c));
    }

    // ---- criterion 2: non-emptiness on the whole corpus ----
    {
        Criterion c{2, "every corpus loop has a parallel-tangent pair; no bound violations"};
        for (const auto& e : corpus) {
            c.require(e.analysis.counts.total() >= 1,
                      e.quadric + " seed " + std::to_string(e.seed) + ": empty pair set");
            c.require(e.analysis.exit_code != exit_code::theorem_violation,
                      e.quadric + " seed " + std::to_string(e.seed) + ": exit code 2");
        }
        criteria.push_back(std::move(c));
    }

    // ---- criterion 3: count bounds per signature ----
    {
        Criterion c{3, "count bounds hold, including the a = 1 figure-eight fixtures"};
        for (const auto& e : corpus) {
            c.require(e.analysis.theorems.all_pass,
                      e.quadric + " seed " + std::to_string(e.seed) + ": bound check failed");
            if (e.quadric == "two-sheeted") {
                long long a = e.analysis.census.a;
                c.require(e.analysis.counts.d1 + e.analysis.counts.d2 >= 2 + a,
                          "two-sheeted seed " + std::to_string(e.seed) + ": d1+d2 < 2+a");
            }
            if (e.quadric == "one-sheeted") {
                long long a = e.analysis.census.a, b = e.analysis.census.b;
                c.require(e.analysis.counts.d0 + e.analysis.counts.d2 >= a + b,
                          "one-sheeted seed " + std::to_string(e.seed) + ": d0+d2 < a+b");
                if (a == 0 && b == 0)
                    c.require(e.analysis.counts.total() >= 2,
                              "one-sheeted seed " + std::to_string(e.seed) + ": total < 2");
            }
        }
        QuadricAnalysis fig8s = analyze_quadric(figure_eight_sphere());
        c.require(fig8s.census.a == 1, "sphere figure-eight census a != 1");
        c.require(fig8s.counts.total() >= 3, "sphere figure-eight has fewer than 3 pairs");
        c.require(fig8s.exit_code == exit_code::ok, "sphere figure-eight pipeline failed");
        QuadricAnalysis fig82 = analyze_quadric(figure_eight_two_sheeted());
        c.require(fig82.census.a == 1, "two-sheeted figure-eight census a != 1");
        c.require(fig82.counts.d1 + fig82.counts.d2 >= 3,
                  "two-sheeted figure-eight: d1+d2 < 2+a with a = 1");
        criteria.push_back(std::move(c));
    }

    // ---- criterion 4: measured restricted indices ----
    {
        Criterion c{4, "measured indices match the closed forms on every census point"};
        struct IdxCase {
            std::string name;
            QuadricLoop loop;
            int a_index, b_index;  // -1 = locus empty
        };
        std::vector<IdxCase> cases;
        cases.push_back({"sphere figure-eight", figure_eight_sphere(), 2, -1});
        cases.push_back({"sphere antipodal", antipodal_sphere(), -1, 0});
        cases.push_back({"two-sheeted figure-eight", figure_eight_two_sheeted(), 0, -1});
        cases.push_back({"one-sheeted double-wind", double_wind_one_sheeted(), 1, 1});
        cases.push_back({"one-sheeted antipodal", antipodal_one_sheeted(), -1, 1});
        for (const auto& k : cases) {
            IntersectionCensus cen = census(k.loop);
            if (k.a_index >= 0) {
                c.require(!cen.double_points.empty(), k.name + ": expected double points");
                for (const auto& p : cen.double_points)
                    c.require(restricted_index(k.loop, {p.s, p.t}) == k.a_index,
                              k.name + ": A-point index != p");
            }
            if (k.b_index >= 0) {
                c.require(!cen.antipodal_points.empty(), k.name + ": expected antipodal points");
                for (const auto& p : cen.antipodal_points)
                    c.require(restricted_index(k.loop, {p.s, p.t}) == k.b_index,
                              k.name + ": B-point index != q");
            }
            // eigenvalues bounded away from zero on census Hessians
            for (const auto& lst : {cen.double_points, cen.antipodal_points})
                for (const auto& p : lst) {
                    auto h = phi_hess(k.loop, {p.s, p.t});
                    auto eig = detail::sym2_eigenvalues(h[0], h[1], h[2]);
                    c.require(std::fabs(eig[0]) > 1e-8 && std::fabs(eig[1]) > 1e-8,
                              k.name + ": census Hessian eigenvalue within 1e-8 of zero");
                }
        }
        // diagonal index on the two-sheeted hyperboloid measures 0
        QuadricLoop upper = perturbed_latitude_two_sheeted();
        for (int i = 0; i < 32; ++i)
            c.require(restricted_index_diagonal(upper, two_pi * i / 32) == 0,
                      "two-sheeted diagonal index != 0");
        // eigenvalues of isolated critical points across the corpus
        for (const auto& e : corpus)
            for (const auto& r : e.analysis.critical.records)
                if (r.cls == CriticalClass::ParallelTangent)
                    c.require(std::fabs(r.hessian_eigenvalues[0]) > 1e-8 &&
                                  std::fabs(r.hessian_eigenvalues[1]) > 1e-8,
                              e.quadric + " seed " + std::to_string(e.seed) +
                                  ": eigenvalue within 1e-8 of zero");
        // the case (ii) diagonal-index discrepancy is reported, and the
        // bounds pass regardless
        QuadricLoop sl = space_like_one_sheeted();
        QuadricAnalysis slan = analyze_quadric(sl);
        CurveFile slcf;
        slcf.signature = {1, 1, -1};
        slcf.mode = LoopMode::Normalized;
        slcf.raw = sl.raw();
        ordered_json sljson = analysis_json(slan, slcf, AnalysisOptions{});
        c.require(sljson["diagonal"]["index_convention_discrepancy"].get<bool>(),
                  "case (ii) diagonal-index discrepancy not reported");
        c.require(slan.diagonal.measured_index == 1, "case (ii) measured diagonal index != 1");
        c.require(slan.theorems.all_pass, "case (ii) bounds fail under the measured convention");
        criteria.push_back(std::move(c));
    }

    // ---- criterion 5: ledger identity ----
    {
        Criterion c{5, "ledger identity: worked examples exact, corpus ledgers satisfied"};
        // two-point height function on the circle
        MorseLedger circle;
        circle.ambient = IntPoly{1, 1};
        circle.records.push_back({ManifoldKind::Isolated, 0, IntPoly::one(), 1});
        circle.records.push_back({ManifoldKind::Isolated, 1, IntPoly::one(), 1});
        circle = check_morse_inequalities(std::move(circle));
        c.require(circle.satisfied && circle.q_t.is_zero(), "circle example: Q_t != 0");

        // sphere skew hypothesis: diagonal alone against the torus
        MorseLedger sphere;
        sphere.ambient = IntPoly{1, 2, 1};
        sphere.records.push_back({ManifoldKind::Diagonal, 1, IntPoly{1, 1}, 1});
        sphere = check_morse_inequalities(std::move(sphere));
        c.require(!sphere.satisfied && sphere.division_exact && sphere.q_t == IntPoly{-1},
                  "sphere contradiction example: Q_t != -1");

        // two-sheeted case with a = 0, d = (0, 1, 1)
        MorseLedger hyper;
        hyper.ambient = IntPoly{1, 2, 1};
        hyper.records.push_back({ManifoldKind::Diagonal, 0, IntPoly{1, 1}, 1});
        hyper.records.push_back({ManifoldKind::Isolated, 1, IntPoly::one(), 2});
        hyper.records.push_back({ManifoldKind::Isolated, 2, IntPoly::one(), 2});
        hyper = check_morse_inequalities(std::move(hyper));
        c.require(hyper.satisfied && hyper.lhs == (IntPoly{1, 3, 2}) && hyper.q_t == (IntPoly{0, 1}),
                  "two-sheeted example: LHS or Q_t wrong");

        for (const auto& e : corpus)
            c.require(e.analysis.ledger.satisfied,
                      e.quadric + " seed " + std::to_string(e.seed) + ": measured ledger violated");
        criteria.push_back(std::move(c));
    }

    // ---- criterion 6: developable fixtures ----
    {
        Criterion c{6, "on-leaf pairs on 10 developable fixtures, isometry and shortcuts"};
        auto fixtures = acceptance_surface_fixtures();
        c.require(fixtures.size() == 10, "fixture count != 10");
        for (const auto& fx : fixtures) {
            try {
                Unfolding unf(fx.surface, fx.loop);
                double iso = unf.verify_isometry(100);
                c.require(iso <= 1e-9, fx.name + ": isometry error " + std::to_string(iso));
                FoliationAngleProfile prof = angle_profiles(unf, 1024);
                LeafPair pair = find_parallel_on_leaf(unf, prof);
                Vec3 v1 = unf.loop_point(pair.tau_minus, 1), v2 = unf.loop_point(pair.tau_plus, 1);
                c.require(lines_parallel(v1, v2, 1e-6), fx.name + ": 3-D tangents not parallel");

                OraclePairs oracle = brute_force_pairs(fx.loop);
                double best = 1e9;
                for (const auto& q : oracle.pairs)
                    best = std::min(best, torus_dist(PairPoint{pair.tau_minus, pair.tau_plus}, q));
                c.require(best <= 1e-4, fx.name + ": oracle does not confirm the pair");

                if (fx.surface.kind() == DevelopableSurface::Kind::Cylinder) {
                    LeafPair quick = cylinder_shortcut(unf);
                    c.require(detail::pair_torus_dist(pair.tau_minus, pair.tau_plus,
                                                      quick.tau_minus, quick.tau_plus) <= 1e-6,
                              fx.name + ": cylinder shortcut disagrees");
                } else if (fx.surface.kind() == DevelopableSurface::Kind::Cone) {
                    LeafPair quick = cone_shortcut(unf);
                    c.require(detail::pair_torus_dist(pair.tau_minus, pair.tau_plus,
                                                      quick.tau_minus, quick.tau_plus) <= 1e-6,
                              fx.name + ": cone shortcut disagrees");
                }
            } catch (const std::exception& ex) {
                c.require(false, fx.name + ": " + ex.what());
            }
        }
        criteria.push_back(std::move(c));
    }

    // ---- criterion 7: folded-triangle certificate ----
    {
        Criterion c{7, "folded triangle certifies skew at grid 2048 and flattens to non-skew"};
        try {
            BuragoFixture fx = burago_fixture();
            OracleOptions opt;
            opt.grid = 2048;
            SkewCertificate cert = certify_skew(fx.loop, opt, 1e-3);
            c.require(cert.is_skew, "folded loop not certified skew");
            c.require(cert.min_angle > 1e-3,
                      "min angle " + std::to_string(cert.min_angle) + " <= 1e-3");
            BuragoFixture flat = burago_fixture(0.05, 0.0);
            SkewCertificate fcert = certify_skew(flat.loop, opt, 1e-3);
            c.require(!fcert.is_skew, "flattened loop still certified skew");
        } catch (const std::exception& ex) {
            c.require(false, std::string("fixture failed: ") + ex.what());
        }
        criteria.push_back(std::move(c));
    }

    // ---- criterion 8: numerical hygiene ----
    {
        Criterion c{8, "derivative checks at 1000 points; byte-identical reports"};
        QuadricLoop loop = make_random_loop(Quadric::one_sheeted(), 4242, {0, 0, 0.25},
                                            {8, 0.35, 0.15});
        GraphQuadric gq = GraphQuadric::hyperbolic_paraboloid();
        TrigLoop g = TrigLoop::planar(TrigPoly::harmonic(1, 1, 0) + TrigPoly::harmonic(2, 0.08, 0),
                                      TrigPoly::harmonic(1, 0, 0.6) + TrigPoly::harmonic(3, 0, 0.03));
        TrigLoop g1 = g.derivative(), g2 = g1.derivative();
        detail::Rng rng(515151);
        const double h = 1e-5;
        int checked = 0;
        for (int k = 0; k < 1000; ++k) {
            double s = rng.uniform(0, two_pi), t = rng.uniform(0, two_pi);
            // phi: analytic gradient vs central differences of phi
            auto gr = phi_grad(loop, {s, t});
            double fd_s = (phi(loop, {s + h, t}) - phi(loop, {s - h, t})) / (2 * h);
            double fd_t = (phi(loop, {s, t + h}) - phi(loop, {s, t - h})) / (2 * h);
            c.require(std::fabs(gr[0] - fd_s) <= 1e-6 * std::max(1.0, std::fabs(gr[0])),
                      "phi gradient s-component FD mismatch");
            c.require(std::fabs(gr[1] - fd_t) <= 1e-6 * std::max(1.0, std::fabs(gr[1])),
                      "phi gradient t-component FD mismatch");
            // phi: analytic Hessian vs central differences of the gradient
            auto hess = phi_hess(loop, {s, t});
            double h_ss = (phi_grad(loop, {s + h, t})[0] - phi_grad(loop, {s - h, t})[0]) / (2 * h);
            double h_st = (phi_grad(loop, {s, t + h})[0] - phi_grad(loop, {s, t - h})[0]) / (2 * h);
            double h_tt = (phi_grad(loop, {s, t + h})[1] - phi_grad(loop, {s, t - h})[1]) / (2 * h);
            c.require(std::fabs(hess[0] - h_ss) <= 1e-6 * std::max(1.0, std::fabs(hess[0])),
                      "phi Hessian ss FD mismatch");
            c.require(std::fabs(hess[1] - h_st) <= 1e-6 * std::max(1.0, std::fabs(hess[1])),
                      "phi Hessian st FD mismatch");
            c.require(std::fabs(hess[2] - h_tt) <= 1e-6 * std::max(1.0, std::fabs(hess[2])),
                      "phi Hessian tt FD mismatch");
            // psi: same checks
            auto pg = psi_grad(gq, g, g1, {s, t});
            double pfd_s = (psi(gq, g, {s + h, t}) - psi(gq, g, {s - h, t})) / (2 * h);
            double pfd_t = (psi(gq, g, {s, t + h}) - psi(gq, g, {s, t - h})) / (2 * h);
            c.require(std::fabs(pg[0] - pfd_s) <= 1e-6 * std::max(1.0, std::fabs(pg[0])),
                      "psi gradient s-component FD mismatch");
            c.require(std::fabs(pg[1] - pfd_t) <= 1e-6 * std::max(1.0, std::fabs(pg[1])),
                      "psi gradient t-component FD mismatch");
            auto ph = psi_hess(gq, g, g1, g2, {s, t});
            double p_ss =
                (psi_grad(gq, g, g1, {s + h, t})[0] - psi_grad(gq, g, g1, {s - h, t})[0]) / (2 * h);
            double p_tt =
                (psi_grad(gq, g, g1, {s, t + h})[1] - psi_grad(gq, g, g1, {s, t - h})[1]) / (2 * h);
            c.require(std::fabs(ph[0] - p_ss) <= 1e-6 * std::max(1.0, std::fabs(ph[0])),
                      "psi Hessian ss FD mismatch");
            c.require(std::fabs(ph[2] - p_tt) <= 1e-6 * std::max(1.0, std::fabs(ph[2])),
                      "psi Hessian tt FD mismatch");
            ++checked;
        }
        c.require(checked == 1000, "expected 1000 evaluation points");

        // determinism: the command-line tool twice on the same seeded input
        std::string dir = "/tmp/skewloop-acceptance/";
        std::string mk = "mkdir -p " + dir;
        c.require(std::system(mk.c_str()) == 0, "cannot create temp dir");
        int rc1 = 0, rc2 = 0, rcg = 0;
        run_cli_capture("gen-loop --quadric two-sheeted --seed 77 --out " + dir + "d.curve", &rcg);
        std::string out1 = run_cli_capture("analyze-quadric " + dir + "d.curve", &rc1);
        std::string out2 = run_cli_capture("analyze-quadric " + dir + "d.curve", &rc2);
        c.require(rcg == 0 && rc1 == 0 && rc2 == 0, "CLI runs failed");
        c.require(!out1.empty() && out1 == out2, "reports differ between identical runs");
        criteria.push_back(std::move(c));
    }

    // ---- summary ----
    bool all = true;
    for (const auto& c : criteria) {
        std::printf("criterion %d [%s]: %s\n", c.id, c.pass ? "PASS" : "FAIL", c.name.c_str());
        for (const auto& d : c.details) std::printf("    - %s\n", d.c_str());
        all = all && c.pass;
    }
    std::printf("acceptance: %s\n", all ? "ALL CRITERIA PASS" : "FAILURES PRESENT");
    return all ? 0 : 1;
}
