#include "refnav/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace refnav {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw std::invalid_argument("config: bad boolean value '" + v + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        kv[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    return kv;
}

void RunConfig::apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "corpus") corpus_path = value;
        else if (key == "tasks") task_path = value;
        else if (key == "out_dir") out_dir = value;
        else if (key == "k") k = std::stoul(value);
        else if (key == "c_p") c_p = std::stod(value);
        else if (key == "gamma") gamma = std::stod(value);
        else if (key == "algo") algo = value;
        else if (key == "beta") beta = std::stod(value);
        else if (key == "delta") delta = std::stod(value);
        else if (key == "lambda") lambda = std::stod(value);
        else if (key == "learning_rate") learning_rate = std::stod(value);
        else if (key == "episodes_per_task") episodes_per_task = std::stoul(value);
        else if (key == "d") d = std::stoi(value);
        else if (key == "use_similarity") use_similarity = parse_bool(value);
        else if (key == "n_episodes") n_episodes = std::stoul(value);
        else if (key == "base_seed") base_seed = std::stoull(value);
        else if (key == "seed") seed = std::stoull(value);
        else if (key == "hof_filter") hof_filter = parse_bool(value);
        else if (key == "baseline_epochs") baseline_epochs = std::stoul(value);
        else throw std::runtime_error("config: unknown key '" + key + "'");
    }
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    out << "corpus = " << corpus_path << "\n";
    out << "tasks = " << task_path << "\n";
    out << "out_dir = " << out_dir << "\n";
    out << "k = " << k << "\n";
    out << "c_p = " << fmt_double(c_p) << "\n";
    out << "gamma = " << fmt_double(gamma) << "\n";
    out << "algo = " << algo << "\n";
    out << "beta = " << fmt_double(beta) << "\n";
    out << "delta = " << fmt_double(delta) << "\n";
    out << "lambda = " << fmt_double(lambda) << "\n";
    out << "learning_rate = " << fmt_double(learning_rate) << "\n";
    out << "episodes_per_task = " << episodes_per_task << "\n";
    out << "d = " << d << "\n";
    out << "use_similarity = " << (use_similarity ? "true" : "false") << "\n";
    out << "n_episodes = " << n_episodes << "\n";
    out << "base_seed = " << base_seed << "\n";
    out << "seed = " << seed << "\n";
    out << "hof_filter = " << (hof_filter ? "true" : "false") << "\n";
    out << "baseline_epochs = " << baseline_epochs << "\n";
    return out.str();
}

}  // namespace refnav
