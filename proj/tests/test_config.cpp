#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "refnav/config.hpp"

using namespace refnav;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("defaults match the documented hyperparameters") {
    RunConfig cfg;
    CHECK(cfg.k == 20);
    CHECK(cfg.c_p == -0.3);
    CHECK(cfg.gamma == 0.9);
    CHECK(cfg.algo == "a2c");
    CHECK(cfg.beta == 0.5);
    CHECK(cfg.delta == 1e-4);
    CHECK(cfg.lambda == 0.5);
    CHECK(cfg.learning_rate == 1e-3);
    CHECK(cfg.d == 64);
    CHECK(cfg.n_episodes == 30);
    CHECK(cfg.hof_filter);
    CHECK_FALSE(cfg.use_similarity);
}

TEST_CASE("config files parse key = value with comments and blanks") {
    auto path = tmp_path("refnav_cfg_ok.txt");
    std::ofstream(path) << "# comment\n"
                        << "\n"
                        << "  gamma = 0.8  \n"
                        << "algo=reinforce\n"
                        << "hof_filter = off\n";
    auto kv = parse_config_file(path);
    CHECK(kv.size() == 3);
    CHECK(kv.at("gamma") == "0.8");

    RunConfig cfg;
    cfg.apply(kv);
    CHECK(cfg.gamma == 0.8);
    CHECK(cfg.algo == "reinforce");
    CHECK_FALSE(cfg.hof_filter);
    CHECK(cfg.k == 20);  // untouched keys keep their defaults

    auto bad = tmp_path("refnav_cfg_bad.txt");
    std::ofstream(bad) << "gamma 0.8\n";
    CHECK_THROWS_WITH_AS(parse_config_file(bad), doctest::Contains(":1"),
                         std::runtime_error);
    CHECK_THROWS_AS(parse_config_file(tmp_path("refnav_cfg_missing.txt")),
                    std::runtime_error);
}

TEST_CASE("apply rejects unknown keys and bad booleans") {
    RunConfig cfg;
    CHECK_THROWS_WITH_AS(cfg.apply({{"nope", "1"}}), doctest::Contains("nope"),
                         std::runtime_error);
    CHECK_THROWS_AS(cfg.apply({{"use_similarity", "maybe"}}), std::invalid_argument);
}

TEST_CASE("serialize emits every key and round-trips") {
    RunConfig cfg;
    cfg.corpus_path = "c.jsonl";
    cfg.task_path = "t.jsonl";
    cfg.gamma = 0.85;
    cfg.seed = 42;
    cfg.use_similarity = true;

    auto path = tmp_path("refnav_cfg_echo.txt");
    std::ofstream(path) << cfg.serialize();
    RunConfig back;
    back.apply(parse_config_file(path));
    CHECK(back.serialize() == cfg.serialize());
    CHECK(back.gamma == 0.85);
    CHECK(back.seed == 42);
    CHECK(back.use_similarity);
}
