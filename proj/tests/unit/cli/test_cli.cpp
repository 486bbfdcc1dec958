#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "run_config.hpp"
#include "svg_plot.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;
using namespace fieldline::cli;
using nlohmann::json;

namespace {

const fs::path sourceDir = FIELDLINE_SOURCE_DIR;
const fs::path cliPath = FIELDLINE_CLI_PATH;

fs::path freshDir(const std::string& name)
{
    fs::path dir = fs::temp_directory_path() / "fieldline_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// run the CLI with a shell command line; returns its exit status, stderr goes to `errFile`
int runCli(const std::string& args, const fs::path& errFile, const std::string& env = "FIELDLINE_LOG=warn")
{
    std::string cmd = env + " '" + cliPath.string() + "' " + args + " > /dev/null 2> '" + errFile.string() + "'";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path writeConfig(const fs::path& dir, const std::string& name, const json& doc)
{
    fs::path p = dir / name;
    std::ofstream(p) << doc.dump(2);
    return p;
}

int failureCode(const json& doc)
{
    try {
        parseRunConfig(doc, ".", "run");
    } catch(const Failure& f) {
        return f.exitCode();
    }
    return 0;
}

json circleDoc()
{
    return json::parse(R"({
        "profile": {"name": "uniform"},
        "constants": {"k1": 0, "k2": 1, "k3": 1},
        "method": "quadrature",
        "time": {"t_end": 3, "samples": 31}
    })");
}

}  // namespace

TEST_CASE("configuration parsing")
{
    auto c = parseRunConfig(circleDoc(), "/some/dir", "circle");
    CHECK(c.output.prefix == "circle");
    CHECK(c.tEnd == 3);
    CHECK(c.samples == 31);
    REQUIRE(c.constants);
    CHECK(c.constants->k.k2 == 1);
    CHECK(c.methods() == std::vector<fl_method>{FL_METHOD_QUADRATURE});

    json all = circleDoc();
    all["method"] = "all";
    CHECK(parseRunConfig(all, ".", "x").methods().size() == 3);
}

TEST_CASE("invalid configurations are configuration errors")
{
    json unknownTop = circleDoc();
    unknownTop["colour"] = "red";
    CHECK(failureCode(unknownTop) == ExitConfig);

    json unknownNested = circleDoc();
    unknownNested["time"]["t_stop"] = 4;
    CHECK(failureCode(unknownNested) == ExitConfig);

    json wrongType = circleDoc();
    wrongType["time"]["samples"] = "many";
    CHECK(failureCode(wrongType) == ExitConfig);

    json badMethod = circleDoc();
    badMethod["method"] = "euler";
    CHECK(failureCode(badMethod) == ExitConfig);

    json missingK = circleDoc();
    missingK["constants"].erase("k3");
    CHECK(failureCode(missingK) == ExitConfig);
}

TEST_CASE("sub-runs inherit the base configuration")
{
    json doc = circleDoc();
    doc["output"] = {{"prefix", "grid"}};
    doc["runs"] = json::array({json{{"label", "a"}, {"constants", {{"k1", 0}, {"k2", 2}, {"k3", 4}}}},
                               json{{"label", "b"}, {"time", {{"t_end", 7}}}}});
    auto c = parseRunConfig(doc, ".", "x");
    REQUIRE(c.runs.size() == 2);
    CHECK(c.runs[0].output.prefix == "grid_a");
    CHECK(c.runs[0].constants->k.k2 == 2);
    CHECK(c.runs[0].tEnd == 3);
    CHECK(c.runs[1].tEnd == 7);
    CHECK(c.runs[1].samples == 31);

    Overrides o;
    o.method = "ode";
    o.outDir = "/tmp/elsewhere";
    applyOverrides(c, o);
    CHECK(c.runs[1].methods() == std::vector<fl_method>{FL_METHOD_ODE});
    CHECK(c.runs[0].output.dir == fs::path("/tmp/elsewhere"));
}

TEST_CASE("status to exit code mapping")
{
    CHECK(exitCodeFor(FL_OK) == ExitOk);
    CHECK(exitCodeFor(FL_ERR_CONFIG) == ExitConfig);
    CHECK(exitCodeFor(FL_ERR_USAGE) == ExitConfig);
    CHECK(exitCodeFor(FL_ERR_IO) == ExitConfig);
    CHECK(exitCodeFor(FL_ERR_NUMERIC) == ExitNumeric);
    CHECK(exitCodeFor(FL_ERR_DOMAIN) == ExitNumeric);
    CHECK(exitCodeFor(FL_ERR_INVARIANT) == ExitInvariant);
    CHECK(exitCodeFor(FL_ERR_INTERNAL) == ExitInvariant);
}

TEST_CASE("axis ticks")
{
    auto s = niceScale(0, 1);
    CHECK(s.step == doctest::Approx(0.2));
    auto t = s.ticks();
    CHECK(t.front() == 0);
    CHECK(t.back() == doctest::Approx(1));
    auto w = niceScale(-3.3, 47.1);
    CHECK(w.lo <= -3.3);
    CHECK(w.hi >= 47.1);
    CHECK(w.step == 10);
    auto flat = niceScale(2, 2);
    CHECK(flat.lo < 2);
    CHECK(flat.hi > 2);
}

TEST_CASE("SVG keeps one unit the same length on both axes")
{
    std::vector<double> x, y;
    for(int i = 0; i <= 360; i++) {
        x.push_back(3 + 2 * std::cos(i * M_PI / 180));
        y.push_back(-1 + 2 * std::sin(i * M_PI / 180));
    }
    std::string svg = trajectorySvg(x, y, "circle <r=2>");
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("circle &lt;r=2&gt;") != std::string::npos);
    CHECK(svg.find(">x</text>") != std::string::npos);
    CHECK(svg.find(">y</text>") != std::string::npos);

    auto pts = svg.substr(svg.find("points=\"") + 8);
    pts = pts.substr(0, pts.find('"'));
    std::regex pair(R"(([-0-9.]+),([-0-9.]+))");
    double xmin = 1e9, xmax = -1e9, ymin = 1e9, ymax = -1e9;
    int count = 0;
    for(auto it = std::sregex_iterator(pts.begin(), pts.end(), pair); it != std::sregex_iterator(); ++it) {
        double px = std::stod((*it)[1]), py = std::stod((*it)[2]);
        xmin = std::min(xmin, px);
        xmax = std::max(xmax, px);
        ymin = std::min(ymin, py);
        ymax = std::max(ymax, py);
        count++;
    }
    CHECK(count == 361);
    CHECK(std::fabs((xmax - xmin) - (ymax - ymin)) < 0.05);
}

TEST_CASE("command line: successful runs write their files")
{
    auto dir = freshDir("success");
    auto err = dir / "stderr.txt";
    CHECK(runCli("trajectory --config '" + (sourceDir / "configs/uniform_circle.json").string() + "' --out '" +
                     dir.string() + "'",
                 err) == 0);
    for(const char* name : {"uniform_quadrature.csv", "uniform_quadrature.json", "uniform_quadrature.svg",
                            "uniform_ode.csv", "uniform_comparison.json"})
        CHECK_MESSAGE(fs::exists(dir / name), name);

    auto report = json::parse(slurp(dir / "uniform_comparison.json"));
    CHECK(report.contains("pairs"));

    CHECK(runCli("field --config '" + (sourceDir / "configs/exp_field.json").string() + "' --out '" + dir.string() +
                     "'",
                 err) == 0);
    CHECK(runCli("susy --config '" + (sourceDir / "configs/susy_uniform.json").string() + "' --out '" +
                     dir.string() + "'",
                 err) == 0);
    auto verdict = json::parse(slurp(dir / "susy_uniform_verdict.json"));
    CHECK(verdict["verdict"] == "NORMALIZABLE");
}

TEST_CASE("command line: exit codes")
{
    auto dir = freshDir("exit_codes");
    auto err = dir / "stderr.txt";

    SUBCASE("2: bad arguments, missing or invalid configuration")
    {
        CHECK(runCli("trajectory", err) == 2);
        CHECK(runCli("orbit --config x.json", err) == 2);
        CHECK(runCli("trajectory --config '" + (dir / "absent.json").string() + "'", err) == 2);
        json doc = circleDoc();
        doc["colour"] = "red";
        auto cfg = writeConfig(dir, "unknown_key.json", doc);
        CHECK(runCli("trajectory --config '" + cfg.string() + "' --out '" + dir.string() + "'", err) == 2);
        CHECK(slurp(err).find("colour") != std::string::npos);
        // b0 = k2 m / q = 1 contradicts an explicit b0
        json contradictory = circleDoc();
        contradictory["profile"]["b0"] = 5;
        cfg = writeConfig(dir, "contradictory.json", contradictory);
        CHECK(runCli("trajectory --config '" + cfg.string() + "' --out '" + dir.string() + "'", err) == 2);
        std::ofstream(dir / "broken.json") << "{ \"profile\": ";
        CHECK(runCli("trajectory --config '" + (dir / "broken.json").string() + "'", err) == 2);
    }
    SUBCASE("3: numerical or domain failure")
    {
        CHECK(runCli("susy --config '" + (sourceDir / "configs/susy_rational.json").string() + "' --out '" +
                         dir.string() + "'",
                     err) == 3);
        // the verdict is still written before the spectrum fails
        CHECK(fs::exists(dir / "susy_rational_verdict.json"));

        json doc = circleDoc();
        doc["method"] = "ode";
        doc["tolerances"] = {{"ode_max_steps", 3}};
        auto cfg = writeConfig(dir, "steps.json", doc);
        CHECK(runCli("trajectory --config '" + cfg.string() + "' --out '" + dir.string() + "'", err) == 3);
    }
    SUBCASE("4: conserved quantity outside its bound")
    {
        json doc = circleDoc();
        doc["method"] = "ode";
        doc["tolerances"] = {{"energy_invariant", 1e-18}};
        auto cfg = writeConfig(dir, "tight.json", doc);
        CHECK(runCli("trajectory --config '" + cfg.string() + "' --out '" + dir.string() + "'", err) == 4);
        CHECK(fs::exists(dir / "tight_ode.csv"));
    }
    SUBCASE("quiet logging suppresses diagnostics")
    {
        CHECK(runCli("trajectory --config '" + (dir / "absent.json").string() + "'", err, "FIELDLINE_LOG=quiet") ==
              2);
        CHECK(slurp(err).empty());
    }
}

TEST_CASE("command line: repeated runs give identical files")
{
    auto a = freshDir("determinism_a"), b = freshDir("determinism_b");
    std::string cfg = (sourceDir / "configs/exp_decay_grid.json").string();
    REQUIRE(runCli("trajectory --plot --config '" + cfg + "' --out '" + a.string() + "'", a / "stderr.txt") == 0);
    REQUIRE(runCli("trajectory --plot --config '" + cfg + "' --out '" + b.string() + "'", b / "stderr.txt") == 0);
    std::map<std::string, std::string> first;
    for(auto& e : fs::directory_iterator(a))
        if(e.path().filename() != "stderr.txt") first[e.path().filename().string()] = slurp(e.path());
    CHECK(first.size() >= 12);
    for(auto& [name, content] : first) CHECK_MESSAGE(slurp(b / name) == content, name);
}
