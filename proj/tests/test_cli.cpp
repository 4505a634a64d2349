// End-to-end checks of the command-line tool: exit codes, output
// determinism, and the documented error paths.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "skewloop/burago.hpp"
#include "skewloop/formats.hpp"

using namespace skewloop;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(SKEWLOOP_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string fixture(const std::string& name) {
    return std::string(SKEWLOOP_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST(Cli, AnalyzeQuadricPassesOnGenericLoop) {
    auto r = run_cli("analyze-quadric " + fixture("two_sheeted_latitude.curve"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("\"all_pass\": true"), std::string::npos);
}

TEST(Cli, AnalyzeQuadricNonGenericCircle) {
    auto r = run_cli("analyze-quadric " + fixture("great_circle.curve"));
    EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, MalformedFileGivesParseExit) {
    auto r = run_cli("analyze-quadric " + fixture("malformed.curve"));
    EXPECT_EQ(r.exit_code, 64);
}

TEST(Cli, CuspLoopGivesImmersionExit) {
    auto r = run_cli("certify-skew " + fixture("cusp_astroid.curve"));
    EXPECT_EQ(r.exit_code, 65);
}

TEST(Cli, CertifyGreatCircleNotSkew) {
    auto r = run_cli("certify-skew " + fixture("great_circle.curve"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("\"is_skew\": false"), std::string::npos);
}

TEST(Cli, CertifyBuragoLoopSkew) {
    // write the folded-triangle loop out through the curve format first
    BuragoFixture fx = burago_fixture();
    CurveFile cf;
    cf.signature = {1, 1, 1};
    cf.mode = LoopMode::Exact;
    cf.raw = fx.loop;
    std::string path = std::string(::testing::TempDir()) + "burago_loop.curve";
    write_file(path, write_curve(cf));
    auto r = run_cli("certify-skew " + path + " --grid 2048");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("\"is_skew\": true"), std::string::npos);
}

TEST(Cli, UnfoldCylinderAndCone) {
    for (const char* pair : {"flat_strip", "cone_round"}) {
        auto r = run_cli("unfold " + fixture(std::string(pair) + ".surface") + " " +
                         fixture(std::string(pair) + "_loop.curve"));
        EXPECT_EQ(r.exit_code, 0) << pair;
        EXPECT_NE(r.output.find("\"oracle_confirmed\": true"), std::string::npos) << pair;
        EXPECT_NE(r.output.find("\"shortcut_available\": true"), std::string::npos) << pair;
    }
}

TEST(Cli, UnfoldTangentDevelopable) {
    auto r = run_cli("unfold " + fixture("tangent_mild.surface") + " " +
                     fixture("tangent_mild_loop.curve"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("\"oracle_confirmed\": true"), std::string::npos);
}

TEST(Cli, UnfoldFoldedSurfaceRejected) {
    auto r = run_cli("unfold " + fixture("folded_triangle.surface") + " " +
                     fixture("flat_strip_loop.curve"));
    EXPECT_EQ(r.exit_code, 66);
}

TEST(Cli, MorseReportWorkedExamples) {
    std::string dir = ::testing::TempDir();
    // sphere-contradiction ledger: diagonal circle at index 1 vs the torus
    write_file(dir + "sphere_ledger.json",
               R"({"ambient": [1,2,1], "records": [{"kind": "diagonal", "index": 1, "poincare": [1,1]}]})");
    auto r1 = run_cli("morse-report " + dir + "sphere_ledger.json");
    EXPECT_EQ(r1.exit_code, 2);
    EXPECT_NE(r1.output.find("\"q_t\": [\n    -1\n  ]"), std::string::npos);

    write_file(dir + "circle_ledger.json",
               R"({"ambient": [1,1], "records": [{"kind": "isolated", "index": 0}, {"kind": "isolated", "index": 1}]})");
    auto r2 = run_cli("morse-report " + dir + "circle_ledger.json");
    EXPECT_EQ(r2.exit_code, 0);
}

TEST(Cli, GenLoopDeterministicAndAnalyzable) {
    std::string dir = ::testing::TempDir();
    auto g1 = run_cli("gen-loop --quadric one-sheeted --seed 5 --out " + dir + "g1.curve");
    auto g2 = run_cli("gen-loop --quadric one-sheeted --seed 5 --out " + dir + "g2.curve");
    ASSERT_EQ(g1.exit_code, 0);
    EXPECT_EQ(read_file(dir + "g1.curve"), read_file(dir + "g2.curve"));
    auto r = run_cli("analyze-quadric " + dir + "g1.curve");
    EXPECT_EQ(r.exit_code, 0);
}

TEST(Cli, ReportsByteIdenticalAcrossRuns) {
    auto r1 = run_cli("analyze-quadric " + fixture("sphere_figure_eight.curve"));
    auto r2 = run_cli("analyze-quadric " + fixture("sphere_figure_eight.curve"));
    EXPECT_EQ(r1.exit_code, 0);
    EXPECT_EQ(r1.output, r2.output);
}
