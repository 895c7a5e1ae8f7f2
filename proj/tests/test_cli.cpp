#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string err;
};

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("cavcool-test-cli-" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Result cavcool(const std::string& args, const fs::path& dir) {
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string(CAVCOOL_CLI) + " " + args + " -q > /dev/null 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    fs::remove(err);
    return r;
}

std::string out_flag(const fs::path& d) { return "--out '" + d.string() + "'"; }

}  // namespace

TEST_CASE("run writes every export and exits 0") {
    const auto d = scratch("run");
    const auto r = cavcool("run " + out_flag(d), d);
    INFO(r.err);
    REQUIRE(r.code == 0);
    for (const char* f : {"manifest.cfg", "trajectory.tsv", "regime.txt", "spectrum.tsv", "schedule.sched"})
        REQUIRE(fs::exists(d / f));
    REQUIRE_THAT(slurp(d / "manifest.cfg"), ContainsSubstring("J_max = 8"));
    REQUIRE_THAT(slurp(d / "trajectory.tsv"), ContainsSubstring("molecule = OH"));
    REQUIRE_THAT(slurp(d / "regime.txt"), ContainsSubstring("v0-0:J3-1"));
}

TEST_CASE("dry run writes only the manifest") {
    const auto d = scratch("dry");
    REQUIRE(cavcool("run --dry-run " + out_flag(d), d).code == 0);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(d)) files.push_back(e.path().filename().string());
    REQUIRE(files == std::vector<std::string>{"manifest.cfg"});
}

TEST_CASE("configuration errors exit 2 and name the culprit") {
    const auto d = scratch("err");
    auto r = cavcool("run --set molecule=/nonexistent/xyz.mol " + out_flag(d), d);
    REQUIRE(r.code == 2);
    REQUIRE_THAT(r.err, ContainsSubstring("/nonexistent/xyz.mol"));
    r = cavcool("run --set bogus_key=3 " + out_flag(d), d);
    REQUIRE(r.code == 2);
    REQUIRE_THAT(r.err, ContainsSubstring("bogus_key"));
    r = cavcool("run --schedule /nonexistent.sched " + out_flag(d), d);
    REQUIRE(r.code == 2);
    r = cavcool("run --config no-such-config " + out_flag(d), d);
    REQUIRE(r.code == 2);
    r = cavcool("--no-such-flag", d);
    REQUIRE(r.code == 2);

    const auto bad = d / "bad.sched";
    std::ofstream(bad) << "step v0-0:J1-3 60\n";
    r = cavcool("run --schedule '" + bad.string() + "' " + out_flag(d), d);
    REQUIRE(r.code == 2);
    REQUIRE_THAT(r.err, ContainsSubstring("J1-3"));
}

TEST_CASE("regime failure exits 3 unless allowed") {
    const auto d = scratch("regime");
    auto r = cavcool("run --set regime_threshold=1e7 " + out_flag(d), d);
    REQUIRE(r.code == 3);
    REQUIRE_THAT(r.err, ContainsSubstring("regime"));
    REQUIRE(cavcool("run --allow-regime-fail --set regime_threshold=1e7 " + out_flag(d), d).code == 0);
    REQUIRE(cavcool("run --set regime_threshold=1e7 --set regime_hard_fail=false " + out_flag(d), d).code == 0);
}

TEST_CASE("identical seeds give byte-identical exports") {
    const std::vector<std::string> commands = {
        "run",
        "run --schedule oh-optimized",
        "optimize --method greedy --horizon 8",
        "optimize --method evolutionary --horizon 6 --generations 3 --set population_size=6",
        "spectrum",
        "rates --transition v0-0:J3-1",
    };
    for (const auto& c : commands) {
        INFO(c);
        const auto a = scratch("det-a"), b = scratch("det-b");
        REQUIRE(cavcool(c + " --seed 5 " + out_flag(a), a).code == 0);
        REQUIRE(cavcool(c + " --seed 5 " + out_flag(b), b).code == 0);
        std::size_t n = 0;
        for (const auto& e : fs::directory_iterator(a)) {
            ++n;
            INFO(e.path().filename());
            REQUIRE(fs::exists(b / e.path().filename()));
            REQUIRE(slurp(e.path()) == slurp(b / e.path().filename()));
        }
        REQUIRE(n > 0);
    }
}

TEST_CASE("different evolutionary seeds record their seed") {
    const auto a = scratch("seed-a"), b = scratch("seed-b");
    const std::string c = "optimize --method evolutionary --horizon 6 --generations 2 --set population_size=6";
    REQUIRE(cavcool(c + " --seed 1 " + out_flag(a), a).code == 0);
    REQUIRE(cavcool(c + " --seed 2 " + out_flag(b), b).code == 0);
    REQUIRE_THAT(slurp(a / "manifest.cfg"), ContainsSubstring("seed = 1"));
    REQUIRE_THAT(slurp(b / "manifest.cfg"), ContainsSubstring("seed = 2"));
}
