#include "refnav/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace refnav {

double median_lower(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median_lower: empty sample");
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

std::vector<TaskResult> evaluate_agent(const PolicyModel& model, const Vocabulary& vocab,
                                       const Corpus& corpus, const std::vector<Task>& tasks,
                                       const std::map<std::string, NeighborGraph>& graphs,
                                       const std::map<std::string, std::string>& start_ids,
                                       const EvalOptions& options) {
    std::vector<TaskResult> results;
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        const Task& task = tasks[ti];
        const NeighborGraph& graph = graphs.at(task.name());
        auto sit = start_ids.find(task.name());
        const std::string& start =
            sit != start_ids.end() ? sit->second : task.candidate_ids.front();

        TaskResult r;
        r.task = task.name();
        r.method = options.method;
        r.ctn_value = ctn(task.candidate_ids.size(), task.target_ids.size());
        r.hof = hardness_of_find(task.candidate_ids.size(), task.target_ids.size());
        for (std::size_t e = 0; e < options.n_episodes; ++e) {
            std::uint64_t seed = mix_seed(options.base_seed, (ti + 1) * 1000000 + e + 1);
            EpisodeTrace trace = rollout(model, vocab, corpus, task, graph, start,
                                         options.reward, options.policy, seed);
            double reads = trace.succeeded ? static_cast<double>(trace.unique_reads)
                                           : static_cast<double>(r.ctn_value);
            r.reads.push_back(reads);
            r.seeds.push_back(seed);
        }
        r.median_reads = median_lower(r.reads);
        r.ei = evaluation_index(r.hof, r.median_reads, r.ctn_value);
        results.push_back(std::move(r));
    }
    return results;
}

TaskResult baseline_result(const std::string& task_name, std::size_t reads,
                           std::size_t n_candidates, std::size_t n_targets) {
    TaskResult r;
    r.task = task_name;
    r.method = "baseline";
    r.ctn_value = ctn(n_candidates, n_targets);
    r.hof = hardness_of_find(n_candidates, n_targets);
    r.reads.push_back(static_cast<double>(reads));
    r.seeds.push_back(0);
    r.median_reads = static_cast<double>(reads);
    r.ei = evaluation_index(r.hof, r.median_reads, r.ctn_value);
    return r;
}

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

}  // namespace

void emit_report(const std::vector<TaskResult>& results, const std::string& out_dir) {
    if (results.empty()) throw std::invalid_argument("emit_report: no results");
    std::filesystem::create_directories(out_dir);

    auto open = [&](const std::string& name) {
        std::ofstream out(out_dir + "/" + name);
        if (!out) throw std::runtime_error("cannot write " + out_dir + "/" + name);
        return out;
    };

    {
        auto out = open("report.csv");
        out << "method,task,ctn,hof,median_reads,ei\n";
        for (const auto& r : results)
            out << r.method << "," << r.task << "," << r.ctn_value << "," << fmt(r.hof)
                << "," << fmt(r.median_reads) << "," << fmt(r.ei) << "\n";
    }

    {
        auto out = open("boxplot.csv");
        out << "method,task,episode,reads,seed\n";
        for (const auto& r : results)
            for (std::size_t e = 0; e < r.reads.size(); ++e)
                out << r.method << "," << r.task << "," << e << "," << fmt(r.reads[e])
                    << "," << r.seeds[e] << "\n";
    }

    {
        auto out = open("report.txt");
        // group rows by method, preserving first-appearance order
        std::vector<std::string> methods;
        for (const auto& r : results)
            if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
                methods.push_back(r.method);

        out << "method      task            ctn    hof     reads     ei\n";
        for (const auto& m : methods) {
            double total_ei = 0.0;
            for (const auto& r : results) {
                if (r.method != m) continue;
                total_ei += r.ei;
                char line[160];
                std::snprintf(line, sizeof(line), "%-11s %-15s %5zu  %6.3f  %8.1f  %6.3f\n",
                              r.method.c_str(), r.task.c_str(), r.ctn_value, r.hof,
                              r.median_reads, r.ei);
                out << line;
            }
            char line[160];
            std::snprintf(line, sizeof(line), "%-11s %-15s %28s total EI %6.3f\n",
                          m.c_str(), "(all)", "", total_ei);
            out << line;
        }
        out << "note: total EI is summed from unrounded per-task values before rounding\n";
    }
}

void save_results(const std::vector<TaskResult>& results, const std::string& path) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json j;
        j["task"] = r.task;
        j["method"] = r.method;
        j["reads"] = r.reads;
        j["seeds"] = r.seeds;
        j["median_reads"] = r.median_reads;
        j["hof"] = r.hof;
        j["ctn"] = r.ctn_value;
        j["ei"] = r.ei;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write results: " + path);
    out << arr.dump() << "\n";
}

std::vector<TaskResult> load_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results: " + path);
    nlohmann::json arr;
    in >> arr;
    std::vector<TaskResult> results;
    for (const auto& j : arr) {
        TaskResult r;
        r.task = j.at("task").get<std::string>();
        r.method = j.at("method").get<std::string>();
        r.reads = j.at("reads").get<std::vector<double>>();
        r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        r.median_reads = j.at("median_reads").get<double>();
        r.hof = j.at("hof").get<double>();
        r.ctn_value = j.at("ctn").get<std::size_t>();
        r.ei = j.at("ei").get<double>();
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace refnav
