#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path dir = fs::temp_directory_path() / "irrevflow_test_cli";

fs::path write_config(const std::string& name, const std::string& body)
{
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream(p) << body;
    return p;
}

int cli(const std::string& args)
{
    const std::string cmd = std::string(IRREVFLOW_CLI_PATH) + ' ' + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("exit status 0 when all checks pass")
{
    const fs::path cfg = write_config("ok.json", R"({"energy": {"n": 128}})");
    CHECK(cli("build-mf --config " + cfg.string() + " --out " + (dir / "ok").string()) == 0);
    CHECK(fs::exists(dir / "ok" / "trajectory.csv"));
    CHECK(fs::exists(dir / "ok" / "residuals.csv"));
    CHECK(fs::exists(dir / "ok" / "report.json"));
    const fs::path smooth = write_config("smooth.json", R"({"energy": {"n": 256}, "state": {"family": "random-seeded"}})");
    CHECK(cli("trajectory --config " + smooth.string() + " --out " + (dir / "seeded").string() + " --seed 3") == 0);
}

TEST_CASE("exit status 1 when a check fails")
{
    const fs::path cfg = write_config("strict.json", R"({"energy": {"n": 128}, "projector_tolerance": 1e-12})");
    CHECK(cli("time-observable --config " + cfg.string() + " --out " + (dir / "strict").string()) == 1);
    CHECK(fs::exists(dir / "strict" / "report.json"));
}

TEST_CASE("exit status 2 on configuration errors")
{
    const fs::path unknown = write_config("unknown.json", R"({"energy": {"n": 128}, "colour": "red"})");
    CHECK(cli("build-mf --config " + unknown.string() + " --out " + (dir / "e1").string()) == 2);
    const fs::path broken = write_config("broken.json", R"({"energy": )");
    CHECK(cli("build-mf --config " + broken.string() + " --out " + (dir / "e2").string()) == 2);
    CHECK(cli("build-mf --config " + (dir / "missing.json").string() + " --out " + (dir / "e3").string()) == 2);
    CHECK(cli("build-mf --out " + (dir / "e4").string()) == 2);
    CHECK(cli("no-such-command --config " + unknown.string() + " --out x") == 2);
    CHECK(cli("") == 2);
    const fs::path grid = write_config("grid.json", R"({"energy": {"n": 64, "rule": "midpoint"}})");
    CHECK(cli("build-mf --config " + grid.string() + " --out " + (dir / "e5").string()) == 2);
}

TEST_CASE("version flag")
{
    CHECK(cli("--version") == 0);
}
