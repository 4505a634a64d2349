// Command-line surface for loop analysis on quadrics and developables:
//   analyze-quadric  census, critical points, oracle, ledger, count bounds
//   certify-skew     brute-force skewness certificate
//   unfold           develop a surface loop and find the on-leaf pair
//   morse-report     ledger arithmetic on a manual record list
//   gen-loop         seeded random loop fixtures

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "skewloop/burago.hpp"
#include "skewloop/formats.hpp"
#include "skewloop/report.hpp"

using namespace skewloop;

namespace {

void emit_output(const ordered_json& j, const std::string& out_path) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
        write_file(out_path, text);
    }
}

int immersion_check(const TrigLoop& loop) {
    double min_speed = std::numeric_limits<double>::infinity();
    double at = 0;
    for (int i = 0; i < 4096; ++i) {
        double t = two_pi * i / 4096;
        double sp = norm(loop.eval(t, 1));
        if (sp < min_speed) {
            min_speed = sp;
            at = t;
        }
    }
    if (min_speed <= 1e-8) {
        std::cerr << "ImmersionError: |f'| = " << min_speed << " at t = " << at << "\n";
        return exit_code::immersion_error;
    }
    return exit_code::ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel-tangent analysis of closed loops on quadrics and developables"};
    app.require_subcommand(1);

    // ----- analyze-quadric -----
    auto* analyze = app.add_subcommand("analyze-quadric",
                                       "run the census / critical point / oracle / ledger pipeline");
    std::string an_curve, an_out, an_csv;
    AnalysisOptions an_opt;
    analyze->add_option("curve", an_curve, "curve file")->required();
    analyze->add_option("--grid", an_opt.census_grid, "census grid per axis");
    analyze->add_option("--solver-grid", an_opt.solver_grid, "Newton seed grid per axis");
    analyze->add_option("--oracle-grid", an_opt.oracle_grid, "oracle grid per axis");
    analyze->add_option("--newton-tol", an_opt.newton_tol, "gradient convergence target");
    analyze->add_option("--band", an_opt.band, "diagonal exclusion band");
    analyze->add_option("--angle-tol", an_opt.angle_tol, "parallelism angle tolerance");
    analyze->add_option("--out", an_out, "write the JSON report here (default stdout)");
    analyze->add_option("--csv", an_csv, "also write the critical point table as CSV");
    analyze->add_flag("--timings", an_opt.with_timings, "include wall-clock timings");

    // ----- certify-skew -----
    auto* certify = app.add_subcommand("certify-skew", "certify absence of parallel tangent pairs");
    std::string ct_curve, ct_out;
    int ct_grid = 1024;
    double ct_band = 0.02, ct_margin = 1e-3;
    certify->add_option("curve", ct_curve, "curve file")->required();
    certify->add_option("--grid", ct_grid, "scan grid per axis");
    certify->add_option("--band", ct_band, "diagonal exclusion band");
    certify->add_option("--margin", ct_margin, "skewness margin in radians");
    certify->add_option("--out", ct_out, "write the JSON certificate here");

    // ----- unfold -----
    auto* unfold = app.add_subcommand("unfold", "develop a surface loop and find the on-leaf pair");
    std::string uf_surface, uf_curve, uf_out, uf_profile;
    int uf_grid = 1024;
    unfold->add_option("surface", uf_surface, "surface file")->required();
    unfold->add_option("curve", uf_curve, "curve file (exact 3-D loop on the surface)")->required();
    unfold->add_option("--grid", uf_grid, "leaf profile grid");
    unfold->add_option("--out", uf_out, "write the JSON report here");
    unfold->add_option("--profile-csv", uf_profile, "write the angle profile CSV here");

    // ----- morse-report -----
    auto* morse = app.add_subcommand("morse-report", "ledger arithmetic on a manual record list");
    std::string mr_input, mr_out;
    morse->add_option("records", mr_input, "JSON document with ambient + records")->required();
    morse->add_option("--out", mr_out, "write the JSON ledger here");

    // ----- gen-loop -----
    auto* gen = app.add_subcommand("gen-loop", "write a seeded random loop fixture");
    std::string gl_quadric = "sphere", gl_out;
    std::uint64_t gl_seed = 1;
    int gl_degree = 8;
    double gl_amplitude = 0.35, gl_z_amplitude = -1.0;
    gen->add_option("--quadric", gl_quadric, "sphere | two-sheeted | one-sheeted");
    gen->add_option("--seed", gl_seed, "random seed");
    gen->add_option("--degree", gl_degree, "trig degree");
    gen->add_option("--amplitude", gl_amplitude, "perturbation amplitude scale");
    gen->add_option("--z-amplitude", gl_z_amplitude, "third coordinate amplitude override");
    gen->add_option("--out", gl_out, "output curve file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) {
            CurveFile cf;
            try {
                cf = parse_curve(read_file(an_curve));
            } catch (const ParseError& e) {
                std::cerr << "parse error in " << an_curve << ": " << e.what() << "\n";
                return exit_code::parse_error;
            }
            QuadricLoop loop = cf.to_quadric_loop();
            if (!loop.immersed()) {
                std::cerr << "ImmersionError: |f'| = " << loop.min_speed() << " at t = "
                          << loop.min_speed_param() << "\n";
                return exit_code::immersion_error;
            }
            QuadricAnalysis an = analyze_quadric(loop, an_opt);
            emit_output(analysis_json(an, cf, an_opt), an_out);
            if (!an_csv.empty()) write_file(an_csv, critical_points_csv(an.critical));
            return an.exit_code;
        }

        if (*certify) {
            CurveFile cf;
            try {
                cf = parse_curve(read_file(ct_curve));
            } catch (const ParseError& e) {
                std::cerr << "parse error in " << ct_curve << ": " << e.what() << "\n";
                return exit_code::parse_error;
            }
            OracleOptions opt;
            opt.grid = ct_grid;
            opt.band = ct_band;
            SkewCertificate cert;
            if (cf.mode == LoopMode::Exact) {
                if (int rc = immersion_check(cf.raw); rc != exit_code::ok) return rc;
                cert = certify_skew(cf.raw, opt, ct_margin);
            } else {
                QuadricLoop loop = cf.to_quadric_loop();
                if (!loop.immersed()) {
                    std::cerr << "ImmersionError: |f'| = " << loop.min_speed() << " at t = "
                              << loop.min_speed_param() << "\n";
                    return exit_code::immersion_error;
                }
                cert = certify_skew(loop, opt, ct_margin);
            }
            emit_output(to_json(cert), ct_out);
            return cert.is_skew ? exit_code::ok : exit_code::not_skew;
        }

        if (*unfold) {
            SurfaceFile sf;
            CurveFile cf;
            try {
                sf = parse_surface(read_file(uf_surface));
                cf = parse_curve(read_file(uf_curve));
            } catch (const ParseError& e) {
                std::cerr << "parse error: " << e.what() << "\n";
                return exit_code::parse_error;
            }
            DevelopableSurface surface = sf.to_surface();  // NonRuled for folded kinds
            UnfoldAnalysis ua = unfold_analysis(surface, cf.raw, uf_grid);
            emit_output(to_json(ua), uf_out);
            if (!uf_profile.empty()) write_file(uf_profile, profile_csv(ua.profile));
            return ua.exit_code;
        }

        if (*morse) {
            ordered_json doc = ordered_json::parse(read_file(mr_input), nullptr, true);
            MorseLedger ledger = ledger_from_json(doc);
            emit_output(to_json(ledger), mr_out);
            return ledger.satisfied ? exit_code::ok : exit_code::theorem_violation;
        }

        if (*gen) {
            Quadric q = Quadric::sphere();
            Vec3 base{0, 0, 0.4};
            if (gl_quadric == "two-sheeted") {
                q = Quadric::two_sheeted();
                base = {0, 0, 2.0};
            } else if (gl_quadric == "one-sheeted") {
                q = Quadric::one_sheeted();
                base = {0, 0, 0.25};
                if (gl_z_amplitude < 0) gl_z_amplitude = 0.15;
            } else if (gl_quadric != "sphere") {
                std::cerr << "unknown quadric '" << gl_quadric << "'\n";
                return exit_code::usage_error;
            }
            RandomLoopOptions opt;
            opt.degree = gl_degree;
            opt.amplitude = gl_amplitude;
            opt.z_amplitude = gl_z_amplitude;
            QuadricLoop loop = make_random_loop(q, gl_seed, base, opt);
            CurveFile cf;
            cf.signature = q.metric.signs();
            cf.mode = LoopMode::Normalized;
            cf.raw = loop.raw();
            std::string text = write_curve(cf);
            if (gl_out.empty()) std::fwrite(text.data(), 1, text.size(), stdout);
            else write_file(gl_out, text);
            return exit_code::ok;
        }
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_code::parse_error;
    } catch (const NonRuled& e) {
        std::cerr << "NonRuled: " << e.what() << "\n";
        return exit_code::non_ruled;
    } catch (const NotNormalizable& e) {
        std::cerr << "NotNormalizable: " << e.what() << "\n";
        return exit_code::immersion_error;
    } catch (const OutOfWindow& e) {
        std::cerr << "OutOfWindow: " << e.what() << "\n";
        return exit_code::failure;
    } catch (const Singular& e) {
        std::cerr << "Singular: " << e.what() << "\n";
        return exit_code::failure;
    } catch (const NotOnSurface& e) {
        std::cerr << "NotOnSurface: " << e.what() << "\n";
        return exit_code::failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code::failure;
    }
    return exit_code::usage_error;
}
