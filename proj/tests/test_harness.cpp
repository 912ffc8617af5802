#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "robinband/errors.hpp"
#include "robinband/harness.hpp"

using namespace robinband;
using namespace robinband::harness;

TEST_CASE("config parsing: sections, comments, types") {
    const auto c = Config::parse_string(R"(
# comment
[experiment]
kind = band
threads = 2

[band]
gamma_grid = -1, 0
xi_min = -1.0   # trailing comment
)");
    CHECK(c.get("experiment.kind") == "band");
    CHECK(c.get_int("experiment.threads") == 2);
    CHECK(c.get_double("band.xi_min") == doctest::Approx(-1.0));
    const auto list = c.get_list("band.gamma_grid");
    REQUIRE(list.size() == 2);
    CHECK(list[0] == -1.0);
    CHECK(c.get_or("missing.key", "fallback") == "fallback");
    CHECK_THROWS_AS(c.get("missing.key"), ConfigInvalid);
    CHECK_THROWS_AS(c.get_double("experiment.kind"), ConfigInvalid);
    CHECK_THROWS_AS(Config::parse_string("[open\nx=1"), ConfigInvalid);
    CHECK_THROWS_AS(Config::parse_string("just a line"), ConfigInvalid);
}

TEST_CASE("run config validation") {
    auto c = Config::parse_string("[experiment]\nkind = nonsense\n");
    CHECK_THROWS_AS(RunConfig::from_config(c), ConfigInvalid);
    c.set("experiment.kind", "band");
    c.set("experiment.budget", "sometimes");
    CHECK_THROWS_AS(RunConfig::from_config(c), ConfigInvalid);
    c.set("experiment.budget", "full");
    const auto rc = RunConfig::from_config(c);
    CHECK(rc.budget == Budget::Full);
}

TEST_CASE("band experiment: reproducible table and tamper detection") {
    namespace fs = std::filesystem;
    const std::string dir = "harness_band_test";
    fs::remove_all(dir);
    auto c = Config::parse_string(R"(
[experiment]
kind = band
[band]
gamma_grid = -1, 0
xi_min = -1.0
xi_max = 2.0
xi_step = 0.25
p_max = 2
)");
    c.set("experiment.out", dir);
    c.set("experiment.threads", "2");
    const auto rc = RunConfig::from_config(c);

    const auto first = run_experiment(rc);
    CHECK(first.ok);
    // second run must agree with the snapshot bit for bit
    const auto second = run_experiment(rc);
    CHECK(second.ok);
    bool regression_checked = false;
    for (const auto& chk : second.report.checks())
        if (chk.name == "band-snapshot-regression") {
            regression_checked = true;
            CHECK(chk.pass);
        }
    CHECK(regression_checked);

    // corrupt one snapshot value: the named diff must flag it
    {
        std::ifstream in(dir + "/band_table.snapshot");
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        in.close();
        const auto pos = text.find_last_of('.');
        text[pos + 1] = text[pos + 1] == '5' ? '6' : '5';
        std::ofstream out(dir + "/band_table.snapshot");
        out << text;
    }
    const auto third = run_experiment(rc);
    CHECK(!third.ok);
    for (const auto& chk : third.report.checks())
        if (chk.name == "band-snapshot-regression") {
            CHECK(!chk.pass);
            CHECK(chk.detail.find("first diff at") != std::string::npos);
        }
    fs::remove_all(dir);
}

TEST_CASE("limits experiment produces a finite report") {
    namespace fs = std::filesystem;
    const std::string dir = "harness_limits_test";
    fs::remove_all(dir);
    auto c = Config::parse_string(R"(
[experiment]
kind = limits
[geometry]
shape = circle
radius = 1.0
nodes = 128
[physics]
b = 1.0
gamma = -1.0
alpha = 0.5
lambda = 0.9
[band]
gamma_grid = -1.5, -1, -0.5, 0
xi_step = 0.1
p_max = 2
)");
    c.set("experiment.out", dir);
    const auto rep = run_experiment(RunConfig::from_config(c));
    CHECK(rep.ok);
    CHECK(fs::exists(dir + "/report.txt"));
    fs::remove_all(dir);
}

TEST_CASE("lt-check experiment passes") {
    namespace fs = std::filesystem;
    const std::string dir = "harness_lt_test";
    fs::remove_all(dir);
    auto c = Config::parse_string("[experiment]\nkind = lt-check\n[lt]\nspacing = 0.1\n");
    c.set("experiment.out", dir);
    const auto rep = run_experiment(RunConfig::from_config(c));
    CHECK(rep.ok);
    fs::remove_all(dir);
}
