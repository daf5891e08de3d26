#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "peelmap/harness.hpp"

using namespace peelmap;
using doctest::Approx;

namespace {

ExperimentConfig config(Mode mode, double a)
{
    ExperimentConfig c;
    c.mode = mode;
    c.a = a;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_CASE("constants summary")
{
    const Artifacts art = execute(config(Mode::Constants, 2.25));
    const auto& c = art.summary.at("constants");
    CHECK(c.at("dim_a").get<double>() == Approx(7.0));
    CHECK(c.at("a_q").get<double>() == Approx(2.0));
    CHECK(art.pass);
}

TEST_CASE("validation")
{
    ExperimentConfig c = config(Mode::Peel, 2.25);
    CHECK_THROWS_AS(validate(c), ConfigError);  // steps missing
    c.steps = 16;
    CHECK_NOTHROW(validate(c));
    c.a.reset();
    CHECK_THROWS_AS(validate(c), ConfigError);
    c.a = 2.0;
    CHECK_THROWS_AS(validate(c), ConfigError);

    ExperimentConfig d = config(Mode::Dfpp, 2.25);
    d.steps = 100;
    CHECK_THROWS_AS(validate(d), ConfigError);
    ExperimentConfig e = config(Mode::EdenDilute, 1.75);
    e.t_max = 4;
    CHECK_THROWS_AS(validate(e), ConfigError);
}

TEST_CASE("config round trip and overrides")
{
    ExperimentConfig c = config(Mode::Layers, 2.25);
    c.r_max = 8;
    c.seed = 77;
    const ExperimentConfig back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));

    const ExperimentConfig over = config_from_json(nlohmann::json{{"seed", 5}}, c);
    CHECK(over.seed == 5);
    CHECK(over.r_max == 8);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"sede", 5}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"mode", "walk"}}), ConfigError);
    CHECK(parse_mode("eden-dilute") == Mode::EdenDilute);
    CHECK_FALSE(parse_mode("nope"));
}

TEST_CASE("csv output")
{
    CsvWriter w({"x", "y"});
    w << std::int64_t{3} << 0.1;
    w.end_row();
    CHECK(w.str() == "x,y\n3,0.10000000000000001\n");
}

TEST_CASE("runs are deterministic across thread counts")
{
    ExperimentConfig c = config(Mode::Peel, 1.75);
    c.steps = 64;
    c.replicas = 20;
    const std::string one = execute(c).csv;
    c.threads = 3;
    CHECK(execute(c).csv == one);
    c.seed = 2;
    CHECK(execute(c).csv != one);
}

TEST_CASE("exit status")
{
    const auto dir = std::filesystem::temp_directory_path() / "peelmap_harness_test";
    std::filesystem::create_directories(dir);
    ExperimentConfig c = config(Mode::Constants, 1.75);
    c.output_path = (dir / "out").string();
    CHECK(run(c) == 0);
    CHECK(std::filesystem::exists(dir / "out.csv"));
    CHECK(std::filesystem::exists(dir / "out.json"));
    ExperimentConfig d = config(Mode::Dfpp, 2.25);
    d.steps = 10;
    d.output_path = c.output_path;
    CHECK(run(d) == 1);
    ExperimentConfig chk = config(Mode::Check, 2.25);
    chk.output_path = c.output_path;
    CHECK(run(chk) == 0);
    std::filesystem::remove_all(dir);
}
