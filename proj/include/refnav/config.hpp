#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace refnav {

// Flat run configuration; defaults are the documented hyperparameters.
// Loadable from key=value text, with CLI flags taking precedence.
struct RunConfig {
    std::string corpus_path;
    std::string task_path;
    std::string out_dir = "out";

    std::size_t k = 20;

    double c_p = -0.3;
    double gamma = 0.9;

    std::string algo = "a2c";
    double beta = 0.5;
    double delta = 1e-4;
    double lambda = 0.5;
    double learning_rate = 1e-3;
    std::size_t episodes_per_task = 24;
    int d = 64;
    bool use_similarity = false;

    std::size_t n_episodes = 30;
    std::uint64_t base_seed = 0;
    std::uint64_t seed = 0;

    bool hof_filter = true;
    std::size_t baseline_epochs = 8;

    void apply(const std::map<std::string, std::string>& kv);  // throws on unknown key
    std::string serialize() const;                             // key=value lines
};

std::map<std::string, std::string> parse_config_file(const std::string& path);

}  // namespace refnav
