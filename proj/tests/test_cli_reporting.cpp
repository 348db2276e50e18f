#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "cheegerkit/commands.hpp"
#include "cheegerkit/volume_grid.hpp"
#include "support.hpp"

using namespace cheegerkit;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scenes_dir() {
    const char *s = std::getenv("CHEEGERKIT_SCENES");
    return s ? fs::path(s) : fs::path(CHEEGERKIT_SCENES_DIR);
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliRun {
    int code = -1;
    fs::path out;
    std::string err;
};

fs::path scratch(const std::string &name) {
    fs::path p = fs::temp_directory_path() / ("cheegerkit_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

CliRun cli(const std::string &op, const fs::path &scene, const std::string &tag, const std::string &extra = "") {
    const char *bin = std::getenv("CHEEGERKIT_CLI");
    CliRun r;
    r.out = scratch(tag);
    fs::path err = r.out / "stderr.txt";
    std::string cmd = std::string("\"") + (bin ? bin : CHEEGERKIT_CLI_PATH) + "\" " + op + " --quiet --scene \"" +
                      scene.string() + "\" --out \"" + r.out.string() + "\" " + extra + " 2> \"" + err.string() + "\"";
    int status = std::system(cmd.c_str());
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

nlohmann::json values(const CliRun &r, const std::string &op) {
    return nlohmann::json::parse(slurp(r.out / (op + ".json")))["values"];
}

fs::path write_scene(const std::string &name, const std::string &text) {
    fs::path p = scratch("scenes") / name;
    std::ofstream(p) << text;
    return p;
}

Scene scene(const std::string &name) { return load_scene((scenes_dir() / name).string()); }

bool all_finite(const nlohmann::json &j) {
    if (j.is_number_float()) return std::isfinite(j.get<double>());
    if (j.is_structured())
        for (const auto &x : j)
            if (!all_finite(x)) return false;
    return true;
}

} // namespace

TEST(Curvature, FlatSummaryMeanIsZero) {
    CliRun r = cli("curvature", scenes_dir() / "flat_cylinder.json", "flat_curv");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(values(r, "curvature")["mean_H"].get<double>(), 0.0);
    EXPECT_TRUE(fs::exists(r.out / "curvature.csv"));
    EXPECT_TRUE(fs::exists(r.out / "manifest.json"));
}

TEST(Curvature, ParabolaVertexRow) {
    CliRun r = cli("curvature", scenes_dir() / "parabola.json", "parabola_curv");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream csv(slurp(r.out / "curvature.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "x,H");
    bool found = false;
    while (std::getline(csv, line)) {
        double x = 0, H = 0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf", &x, &H), 2);
        if (x == 0.0) {
            found = true;
            EXPECT_NEAR(H, -2.0, 1e-2);
        }
    }
    EXPECT_TRUE(found);
}

TEST(Scene, MalformedJsonReportsLineAndColumn) {
    fs::path p = write_scene("broken.json", "{\n  \"domain\": {\n    \"container\": \"cylinder\",,\n  }\n}\n");
    CliRun r = cli("curvature", p, "broken");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("column"), std::string::npos) << r.err;
}

TEST(Scene, UnknownKeyIsRejected) {
    auto j = nlohmann::json::parse(slurp(scenes_dir() / "flat_cylinder.json"));
    j["colour"] = "blue";
    CliRun r = cli("curvature", write_scene("unknown.json", j.dump()), "unknown");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("colour"), std::string::npos) << r.err;
}

TEST(Cheeger, UnitStripIsNearOne) {
    CliRun r = cli("cheeger", scenes_dir() / "flat_cylinder.json", "flat_cheeger");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(values(r, "cheeger")["h"].get<double>(), 1.0, 0.03);
    EXPECT_EQ(slurp(r.out / "cheeger_mask.pgm").substr(0, 2), "P2");
}

TEST(Cheeger, OracleAgreesOnTinyScene) {
    CliRun a = cli("cheeger", scenes_dir() / "tiny.json", "tiny_plain");
    CliRun b = cli("cheeger", scenes_dir() / "tiny.json", "tiny_oracle", "--oracle");
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(values(a, "cheeger")["h"].get<double>(), values(b, "cheeger")["h"].get<double>());
}

TEST(Cheeger, OracleRefusesFiftyCells) {
    CliRun r = cli("cheeger", scenes_dir() / "fifty_cells.json", "fifty", "--oracle");
    EXPECT_EQ(r.code, 2);
    CliRun plain = cli("cheeger", scenes_dir() / "fifty_cells.json", "fifty_plain");
    EXPECT_EQ(plain.code, 0) << plain.err;
}

TEST(Audit, FlatCylinderAllPass) {
    CliRun r = cli("audit", scenes_dir() / "flat_cylinder.json", "flat_audit");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = values(r, "audit");
    for (const auto &e : report["entries"]) EXPECT_EQ(e["status"], "pass") << e.dump();
    EXPECT_TRUE(fs::exists(r.out / "convergence.csv"));
}

TEST(Audit, AffineReportsTorsionFailure) {
    CliRun r = cli("audit", scenes_dir() / "affine.json", "affine_audit");
    ASSERT_EQ(r.code, 0) << r.err;
    bool torsion_seen = false;
    const auto report = values(r, "audit");
    for (const auto &e : report["entries"]) {
        if (e["check"] == "torsion") {
            torsion_seen = true;
            EXPECT_EQ(e["status"], "fail");
        }
        if (e["check"] == "orthogonality") EXPECT_EQ(e["status"], "warn");
    }
    EXPECT_TRUE(torsion_seen);
}

TEST(Sweep, HeightRowsFollowClosedForm) {
    CommandResult r = run_command("sweep", scene("height_sweep.json"));
    const auto &rows = r.document["values"]["rows"];
    ASSERT_EQ(rows.size(), 3u);
    double prev = INFINITY;
    for (const auto &row : rows) {
        double h = row["value"], lam = row["lambda1"];
        EXPECT_NEAR(lam, M_PI * M_PI / (4 * h * h), 0.01 * M_PI * M_PI / (4 * h * h));
        EXPECT_LT(lam, prev);
        prev = lam;
    }
}

TEST(Sweep, BumpAmplitudeFlipIsRecorded) {
    CommandResult r = run_command("sweep", scene("bump_sweep.json"));
    const auto &v = r.document["values"];
    ASSERT_TRUE(v.contains("grad_flip_between"));
    EXPECT_EQ(v["rows"][0]["grad_satisfied"], true);
    EXPECT_LT(v["grad_flip_between"][0].get<double>(), v["grad_flip_between"][1].get<double>());
}

TEST(Sweep, EmptyRangeExitsTwo) {
    auto j = nlohmann::json::parse(slurp(scenes_dir() / "height_sweep.json"));
    j["sweep"]["values"] = nlohmann::json::array();
    CliRun r = cli("sweep", write_scene("empty_sweep.json", j.dump()), "empty_sweep");
    EXPECT_EQ(r.code, 2);
}

TEST(Sweep, OrderDoesNotDependOnThreads) {
    Scene s = scene("height_sweep.json");
    CommandOptions one, many;
    one.threads = 1;
    many.threads = 3;
    EXPECT_EQ(run_command("sweep", s, one).artifacts[0].content, run_command("sweep", s, many).artifacts[0].content);
}

TEST(ExitCodes, SolverFailuresMapToThree) {
    EXPECT_TRUE(is_solver_failure(ErrorKind::non_convergence));
    EXPECT_TRUE(is_solver_failure(ErrorKind::linear_solve));
    EXPECT_FALSE(is_solver_failure(ErrorKind::parse));
    EXPECT_FALSE(is_solver_failure(ErrorKind::size));
}

TEST(Determinism, RepeatedRunsAreByteIdentical) {
    for (std::string op : {"curvature", "cheeger", "torsion", "witness"}) {
        CliRun a = cli(op, scenes_dir() / "affine.json", "det_a_" + op);
        CliRun b = cli(op, scenes_dir() / "affine.json", "det_b_" + op);
        ASSERT_EQ(a.code, 0) << a.err;
        for (const auto &f : fs::directory_iterator(a.out)) {
            std::string name = f.path().filename().string();
            if (name == "manifest.json" || name == "stderr.txt") continue;
            EXPECT_EQ(slurp(f.path()), slurp(b.out / name)) << op << " " << name;
        }
    }
}

TEST(Reports, NumbersFiniteAndKeysSorted) {
    Scene s = scene("affine.json");
    for (const auto &op : command_names()) {
        if (op == "sweep") continue;
        CommandResult r = run_command(op, s);
        EXPECT_TRUE(all_finite(r.document)) << op;
        std::string text = r.document.dump();
        EXPECT_EQ(nlohmann::json::parse(text).dump(), text) << op;
        EXPECT_EQ(r.document["op"], op);
    }
}

TEST(Reports, ManifestListsEveryStageOnce) {
    CommandResult r = run_command("torsion", scene("flat_cylinder.json"));
    auto m = manifest(r, "torsion.json");
    EXPECT_EQ(m["tool_version"], kToolVersion);
    EXPECT_EQ(m["stages"].size(), 3u);
    for (const char *stage : {"mesh", "solve", "certificate"}) EXPECT_TRUE(m["stages"].contains(stage));
    EXPECT_EQ(m["outputs"].size(), 3u);
}

TEST(Reports, DigestIsStableAndSensitive) {
    Scene s = scene("flat_cylinder.json");
    auto d1 = run_command("curvature", s).document["inputs_digest"];
    auto d2 = run_command("curvature", scene("flat_cylinder.json")).document["inputs_digest"];
    EXPECT_EQ(d1, d2);
    EXPECT_NE(d1, run_command("minkowski", s).document["inputs_digest"]);
    EXPECT_NE(d1, run_command("curvature", scene("affine.json")).document["inputs_digest"]);
}

TEST(Reports, NumberFormatRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, M_PI, 1e-300, -2.5e17}) EXPECT_EQ(std::stod(format_number(x)), x);
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(NAN), "");
}

TEST(Reports, PgmMarksExactlyTheMaskCells) {
    Scene s = scene("affine.json");
    VolumeGrid g = rasterize(s.subgraph(), s.delta);
    SubsetMask m(g);
    for (std::size_t k = 0; k < g.inside_count(); k += 3) m.set(k, true);
    std::istringstream pgm(mask_pgm(m));
    std::string magic;
    int w = 0, h = 0, maxv = 0;
    pgm >> magic >> w >> h >> maxv;
    std::size_t in = 0, on = 0;
    for (int v; pgm >> v;) {
        in += v != 0;
        on += v == 255;
    }
    EXPECT_EQ(magic, "P2");
    EXPECT_EQ(std::size_t(w) * h, g.cells(0) * std::size_t(g.cells(1)));
    EXPECT_EQ(in, g.inside_count());
    EXPECT_EQ(on, m.count());
}
