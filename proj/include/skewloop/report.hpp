#pragma once

// Pipelines and deterministic report emission. Every number in a report
// comes from a module output; key order is fixed and floats are written by
// the JSON library's shortest round-trip form, so identical inputs give
// byte-identical documents.

#include <chrono>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "skewloop/burago.hpp"
#include "skewloop/developable.hpp"
#include "skewloop/formats.hpp"
#include "skewloop/loop.hpp"
#include "skewloop/morse.hpp"
#include "skewloop/oracle.hpp"
#include "skewloop/pair_critical.hpp"
#include "skewloop/quadric.hpp"

namespace skewloop {

using ordered_json = nlohmann::ordered_json;

// exit codes shared by the pipelines and the command-line tool
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int not_skew = 1;
inline constexpr int theorem_violation = 2;
inline constexpr int non_generic = 3;
inline constexpr int parse_error = 64;
inline constexpr int immersion_error = 65;
inline constexpr int non_ruled = 66;
inline constexpr int usage_error = 67;
inline constexpr int failure = 70;
}  // namespace exit_code

struct AnalysisOptions {
    int census_grid = 1024;
    int solver_grid = 512;
    int oracle_grid = 1024;
    double newton_tol = 1e-12;
    double band = 0.02;
    double angle_tol = 1e-6;
    double margin = 1e-3;
    bool with_timings = false;
};

struct QuadricAnalysis {
    IntersectionCensus census;
    CriticalPointResult critical;
    OraclePairs oracle;
    IndexCounts counts;
    MorseLedger ledger;
    TheoremReport theorems;
    GenericityReport genericity;
    DiagonalData diagonal;
    bool oracle_matches = false;
    double oracle_match_radius = 1e-5;
    int exit_code = exit_code::ok;
    double seconds = 0;
};

// Full pipeline: census -> critical points -> oracle -> ledger -> bounds.
inline QuadricAnalysis analyze_quadric(const QuadricLoop& loop, AnalysisOptions opt = {}) {
    auto t0 = std::chrono::steady_clock::now();
    QuadricAnalysis an;
    an.census = census(loop, opt.census_grid);

    SolveOptions sopt;
    sopt.grid = opt.solver_grid;
    sopt.newton_tol = opt.newton_tol;
    sopt.band = opt.band;
    an.critical = find_critical_points(loop, an.census, sopt);

    OracleOptions oopt;
    oopt.grid = opt.oracle_grid;
    oopt.band = opt.band;
    an.oracle = brute_force_pairs(loop, oopt);

    // bijective matching between the two routes within the torus radius
    an.oracle_matches = true;
    std::vector<PairPoint> mine;
    for (const auto& r : an.critical.records)
        if (r.cls == CriticalClass::ParallelTangent) mine.push_back(r.location);
    if (an.oracle.continuum_detected || mine.size() != an.oracle.pairs.size()) {
        an.oracle_matches = !an.oracle.continuum_detected && mine.size() == an.oracle.pairs.size();
    } else {
        for (const auto& p : mine) {
            bool hit = false;
            for (const auto& q : an.oracle.pairs)
                if (torus_dist(p, q) <= an.oracle_match_radius) { hit = true; break; }
            if (!hit) { an.oracle_matches = false; break; }
        }
    }

    an.counts = count_indices(an.critical.records);
    an.ledger = build_measured_ledger(loop, an.census, an.critical);
    an.diagonal = diagonal_data(loop);
    an.genericity = genericity_report(loop, &an.census);
    if (an.critical.non_generic) {
        an.genericity.critical_nondegenerate = false;
        an.genericity.pass = false;
        an.genericity.failures.push_back("degenerate critical points present");
    }
    an.genericity.has_solver_data = true;
    double min_det = std::numeric_limits<double>::infinity();
    for (const auto& r : an.critical.records)
        min_det = std::min(min_det, std::fabs(r.hessian_eigenvalues[0] * r.hessian_eigenvalues[1]));
    an.genericity.min_abs_hessian_det = min_det;

    an.theorems = theorem_bounds(an.census, an.counts, loop.quadric(), loop);

    if (!an.genericity.pass)
        an.exit_code = exit_code::non_generic;
    else if (!an.theorems.all_pass || !an.ledger.satisfied)
        an.exit_code = exit_code::theorem_violation;
    an.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return an;
}

// ---------------------------------------------------------------------------
// JSON emission
// ---------------------------------------------------------------------------

namespace detail {

inline ordered_json pair_json(const PairPoint& p) {
    return ordered_json{{"s", p.s}, {"t", p.t}};
}

inline ordered_json census_pair_json(const CensusPair& p) {
    return ordered_json{{"s", p.s},
                        {"t", p.t},
                        {"transversal", p.transversal},
                        {"residual", p.residual},
                        {"crossing_angle", p.crossing_angle}};
}

inline ordered_json poly_json(const IntPoly& p) {
    ordered_json arr = ordered_json::array();
    for (int k = 0; k <= p.degree(); ++k) arr.push_back(p.coeff(k));
    return arr;
}

}  // namespace detail

inline ordered_json to_json(const IntersectionCensus& c) {
    ordered_json j;
    j["a"] = c.a;
    j["b"] = c.b;
    j["double_points"] = ordered_json::array();
    for (const auto& p : c.double_points) j["double_points"].push_back(detail::census_pair_json(p));
    j["antipodal_points"] = ordered_json::array();
    for (const auto& p : c.antipodal_points)
        j["antipodal_points"].push_back(detail::census_pair_json(p));
    j["non_generic"] = c.non_generic;
    j["continuum_detected"] = c.continuum_detected;
    j["notes"] = c.notes;
    return j;
}

inline ordered_json to_json(const CriticalPointResult& r) {
    ordered_json j;
    j["records"] = ordered_json::array();
    for (const auto& rec : r.records) {
        ordered_json rj;
        rj["s"] = rec.location.s;
        rj["t"] = rec.location.t;
        rj["value"] = rec.value;
        rj["class"] = to_string(rec.cls);
        rj["morse_index"] = rec.morse_index;
        rj["hessian_eigenvalues"] = {rec.hessian_eigenvalues[0], rec.hessian_eigenvalues[1]};
        rj["gradient_residual"] = rec.gradient_residual;
        j["records"].push_back(rj);
    }
    j["non_generic"] = r.non_generic;
    j["degenerate_family"] = r.degenerate_family;
    j["discarded_seeds"] = r.discarded_seeds;
    j["diagonal_hits"] = r.diagonal_hits;
    j["notes"] = r.notes;
    return j;
}

inline ordered_json to_json(const OraclePairs& o) {
    ordered_json j;
    j["pairs"] = ordered_json::array();
    for (const auto& p : o.pairs) j["pairs"].push_back(detail::pair_json(p));
    j["continuum_detected"] = o.continuum_detected;
    j["rejected_candidates"] = o.rejected_candidates;
    j["min_scanned_angle"] = o.min_scanned_angle;
    return j;
}

inline ordered_json to_json(const MorseLedger& l) {
    ordered_json j;
    j["records"] = ordered_json::array();
    for (const auto& r : l.records) {
        j["records"].push_back(ordered_json{{"kind", to_string(r.kind)},
                                            {"morse_index", r.morse_index},
                                            {"poincare", detail::poly_json(r.poincare)},
                                            {"multiplicity", r.multiplicity}});
    }
    j["ambient"] = detail::poly_json(l.ambient);
    j["lhs"] = detail::poly_json(l.lhs);
    j["q_t"] = detail::poly_json(l.q_t);
    j["remainder"] = l.remainder;
    j["division_exact"] = l.division_exact;
    j["q_nonnegative"] = l.q_nonnegative;
    j["satisfied"] = l.satisfied;
    j["diagonal_refused"] = l.diagonal_refused;
    j["degenerate_present"] = l.degenerate_present;
    j["notes"] = l.notes;
    return j;
}

inline ordered_json to_json(const TheoremReport& t) {
    ordered_json j;
    j["signature_case"] = t.signature_case;
    j["checks"] = ordered_json::array();
    for (const auto& c : t.checks) {
        j["checks"].push_back(ordered_json{
            {"name", c.name}, {"measured", c.measured}, {"bound", c.bound}, {"pass", c.pass}});
    }
    j["all_pass"] = t.all_pass;
    j["space_like"] = t.space_like;
    j["covered"] = t.covered;
    j["notes"] = t.notes;
    return j;
}

inline ordered_json to_json(const GenericityReport& g) {
    ordered_json j;
    j["pass"] = g.pass;
    j["immersed"] = g.immersed;
    j["min_speed"] = g.min_speed;
    j["min_speed_param"] = g.min_speed_param;
    j["crossings_transversal"] = g.crossings_transversal;
    j["min_crossing_angle"] = g.min_crossing_angle;
    j["continuum_free"] = g.continuum_free;
    j["critical_nondegenerate"] = g.critical_nondegenerate;
    j["has_solver_data"] = g.has_solver_data;
    j["min_abs_hessian_det"] = g.min_abs_hessian_det;
    j["failures"] = g.failures;
    j["thresholds"] = ordered_json{{"transversality_angle", g.transversality_threshold},
                                   {"hessian_det", g.hessian_det_threshold},
                                   {"immersion_speed", g.immersion_threshold}};
    return j;
}

inline ordered_json to_json(const SkewCertificate& c) {
    ordered_json j;
    j["is_skew"] = c.is_skew;
    j["min_angle"] = c.min_angle;
    j["witness_pair"] = detail::pair_json(c.witness_pair);
    j["grid"] = c.grid;
    j["exclusion_band"] = c.exclusion_band;
    j["margin"] = c.margin;
    j["continuum_detected"] = c.continuum_detected;
    return j;
}

inline ordered_json analysis_json(const QuadricAnalysis& an, const CurveFile& input,
                                  const AnalysisOptions& opt) {
    ordered_json j;
    j["format"] = "skewloop-analysis-1";
    j["input"] = ordered_json{{"signature", input.signature},
                              {"mode", input.mode == LoopMode::Exact ? "exact" : "normalized"},
                              {"degree", input.raw.degree()}};
    j["options"] = ordered_json{{"census_grid", opt.census_grid},
                                {"solver_grid", opt.solver_grid},
                                {"oracle_grid", opt.oracle_grid},
                                {"newton_tol", opt.newton_tol},
                                {"band", opt.band},
                                {"angle_tol", opt.angle_tol}};
    j["census"] = to_json(an.census);
    j["critical_points"] = to_json(an.critical);
    j["oracle"] = to_json(an.oracle);
    j["oracle_matches"] = an.oracle_matches;
    j["index_counts"] =
        ordered_json{{"d0", an.counts.d0}, {"d1", an.counts.d1}, {"d2", an.counts.d2}};
    j["ledger"] = to_json(an.ledger);
    j["theorems"] = to_json(an.theorems);
    j["genericity"] = to_json(an.genericity);
    int n_plus = 0;
    for (int sgn : input.signature) n_plus += sgn > 0;
    const bool mixed_signature = n_plus == 2 && input.signature.size() == 3;
    const bool index_discrepancy =
        mixed_signature && an.diagonal.space_like && an.diagonal.measured_index == 1;
    j["diagonal"] = ordered_json{
        {"constant_type", an.diagonal.constant_type},
        {"space_like", an.diagonal.space_like},
        {"measured_index", an.diagonal.measured_index},
        {"min_tangent_square", an.diagonal.min_tangent_square},
        {"max_tangent_square", an.diagonal.max_tangent_square},
        {"index_convention_discrepancy", index_discrepancy},
        {"note", index_discrepancy
                     ? "measured diagonal index is 1 for space-like loops here; an alternative "
                       "convention assigns 0; the count bounds hold under either"
                     : ""}};
    j["exit_code"] = an.exit_code;
    if (opt.with_timings) j["timings"] = ordered_json{{"seconds", an.seconds}};
    return j;
}

// ---------------------------------------------------------------------------
// CSV / plot data
// ---------------------------------------------------------------------------

inline std::string critical_points_csv(const CriticalPointResult& r) {
    std::ostringstream os;
    os << "s,t,value,class,morse_index,eig0,eig1,gradient_residual\n";
    auto sorted = r.records;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.location.s != b.location.s ? a.location.s < b.location.s
                                            : a.location.t < b.location.t;
    });
    for (const auto& rec : sorted) {
        os << detail::format_double(rec.location.s) << ',' << detail::format_double(rec.location.t) << ','
           << detail::format_double(rec.value) << ',' << to_string(rec.cls) << ',' << rec.morse_index
           << ',' << detail::format_double(rec.hessian_eigenvalues[0]) << ','
           << detail::format_double(rec.hessian_eigenvalues[1]) << ','
           << detail::format_double(rec.gradient_residual) << "\n";
    }
    return os.str();
}

inline std::string profile_csv(const FoliationAngleProfile& prof) {
    std::ostringstream os;
    os << "t,alpha_minus,alpha_plus,beta,jump\n";
    for (const auto& s : prof.samples) {
        os << detail::format_double(s.t) << ',' << detail::format_double(s.alpha_minus) << ','
           << detail::format_double(s.alpha_plus) << ',' << detail::format_double(s.beta()) << ','
           << (prof.in_jump(s.t) ? 1 : 0) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Unfold pipeline
// ---------------------------------------------------------------------------

struct UnfoldAnalysis {
    LeafPair pair;
    bool shortcut_available = false;
    LeafPair shortcut;
    double shortcut_agreement = 0;  // torus distance between the two answers
    double isometry_error = 0;
    bool oracle_confirmed = false;
    double oracle_distance = 0;
    FoliationAngleProfile profile;
    int exit_code = exit_code::ok;
};

inline UnfoldAnalysis unfold_analysis(const DevelopableSurface& surface, const TrigLoop& loop,
                                      int profile_grid = 1024) {
    UnfoldAnalysis ua;
    Unfolding unf(surface, loop);
    ua.isometry_error = unf.verify_isometry(100);
    ua.profile = angle_profiles(unf, profile_grid);
    ua.pair = find_parallel_on_leaf(unf, ua.profile);

    if (surface.kind() == DevelopableSurface::Kind::Cylinder) {
        ua.shortcut = cylinder_shortcut(unf);
        ua.shortcut_available = true;
    } else if (surface.kind() == DevelopableSurface::Kind::Cone) {
        ua.shortcut = cone_shortcut(unf);
        ua.shortcut_available = true;
    }
    if (ua.shortcut_available) {
        ua.shortcut_agreement =
            detail::pair_torus_dist(ua.pair.tau_minus, ua.pair.tau_plus, ua.shortcut.tau_minus,
                                    ua.shortcut.tau_plus);
    }

    // cross-check against the tangent-line oracle on the 3-D loop
    OraclePairs op = brute_force_pairs(loop);
    ua.oracle_distance = std::numeric_limits<double>::infinity();
    PairPoint mine{ua.pair.tau_minus, ua.pair.tau_plus};
    for (const auto& q : op.pairs)
        ua.oracle_distance = std::min(ua.oracle_distance, torus_dist(mine, q));
    ua.oracle_confirmed = ua.oracle_distance <= 1e-4;
    return ua;
}

inline ordered_json to_json(const UnfoldAnalysis& ua) {
    ordered_json j;
    j["format"] = "skewloop-unfold-1";
    j["pair"] = ordered_json{{"t0", ua.pair.t0},
                             {"u_leaf", ua.pair.u_leaf},
                             {"tau_minus", ua.pair.tau_minus},
                             {"tau_plus", ua.pair.tau_plus},
                             {"angle_3d", ua.pair.angle_3d}};
    j["shortcut_available"] = ua.shortcut_available;
    if (ua.shortcut_available) {
        j["shortcut"] = ordered_json{{"t0", ua.shortcut.t0},
                                     {"tau_minus", ua.shortcut.tau_minus},
                                     {"tau_plus", ua.shortcut.tau_plus},
                                     {"angle_3d", ua.shortcut.angle_3d}};
        j["shortcut_agreement"] = ua.shortcut_agreement;
    }
    j["isometry_error"] = ua.isometry_error;
    j["oracle_confirmed"] = ua.oracle_confirmed;
    j["oracle_distance"] = ua.oracle_distance;
    j["exit_code"] = ua.exit_code;
    return j;
}

// ---------------------------------------------------------------------------
// Manual ledger entry point (morse-report)
// ---------------------------------------------------------------------------

// Input document:
//   {"ambient": [1,2,1],
//    "records": [{"kind": "diagonal", "index": 1, "poincare": [1,1],
//                 "multiplicity": 1}, ...]}
inline MorseLedger ledger_from_json(const ordered_json& doc) {
    MorseLedger ledger;
    std::vector<long long> amb = doc.at("ambient").get<std::vector<long long>>();
    ledger.ambient = IntPoly(amb);
    for (const auto& r : doc.at("records")) {
        CriticalManifoldRecord rec;
        std::string kind = r.at("kind").get<std::string>();
        if (kind == "diagonal") rec.kind = ManifoldKind::Diagonal;
        else if (kind == "double") rec.kind = ManifoldKind::Double;
        else if (kind == "antipodal") rec.kind = ManifoldKind::Antipodal;
        else if (kind == "isolated") rec.kind = ManifoldKind::Isolated;
        else throw std::invalid_argument("unknown record kind '" + kind + "'");
        rec.morse_index = r.at("index").get<int>();
        if (r.contains("poincare"))
            rec.poincare = IntPoly(r.at("poincare").get<std::vector<long long>>());
        if (r.contains("multiplicity")) rec.multiplicity = r.at("multiplicity").get<long long>();
        ledger.records.push_back(rec);
    }
    return check_morse_inequalities(std::move(ledger));
}

}  // namespace skewloop
