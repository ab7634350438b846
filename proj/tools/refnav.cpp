#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "refnav/agents.hpp"
#include "refnav/baseline.hpp"
#include "refnav/config.hpp"
#include "refnav/corpus.hpp"
#include "refnav/eval.hpp"
#include "refnav/metrics.hpp"
#include "refnav/nn.hpp"
#include "refnav/recsys.hpp"

namespace fs = std::filesystem;
using namespace refnav;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

void echo_config(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    write_file(cfg.out_dir + "/config_effective.txt", cfg.serialize());
}

struct LoadedTasks {
    Corpus corpus;
    Vocabulary vocab;
    std::vector<Task> tasks;
};

LoadedTasks load_inputs(const RunConfig& cfg) {
    LoadedTasks lt;
    lt.corpus = load_corpus(cfg.corpus_path);
    lt.vocab = Vocabulary::build(lt.corpus);
    for (const auto& spec : load_task_specs(cfg.task_path)) {
        Task task = make_task(lt.corpus, spec);
        double hof = hardness_of_find(task.candidate_ids.size(), task.target_ids.size());
        if (cfg.hof_filter && hof <= 0.5) {
            std::cerr << "notice: task '" << task.name() << "' excluded (HoF "
                      << hof << " <= 0.5)\n";
            continue;
        }
        lt.tasks.push_back(std::move(task));
    }
    if (lt.tasks.empty()) throw std::runtime_error("no usable tasks after filtering");
    return lt;
}

std::map<std::string, NeighborGraph> build_graphs(const LoadedTasks& lt, std::size_t k) {
    std::map<std::string, NeighborGraph> graphs;
    for (const auto& task : lt.tasks)
        graphs[task.name()] = build_neighbor_graph(lt.corpus, task.candidate_ids, k);
    return graphs;
}

std::map<std::string, std::string> baseline_starts(const LoadedTasks& lt,
                                                   const std::string& baseline_ckpt) {
    std::map<std::string, std::string> starts;
    if (baseline_ckpt.empty()) return starts;
    ClassifierModel clf = ClassifierModel::load(baseline_ckpt);
    for (const auto& task : lt.tasks) {
        auto ranking = rank_candidates(clf, lt.corpus, lt.vocab, task.candidate_ids);
        starts[task.name()] = ranking.front();
    }
    return starts;
}

// Applies config file first, then explicit CLI flags on top.
void preload_config(CLI::App* sub, RunConfig& cfg, int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config") cfg.apply(parse_config_file(argv[i + 1]));
    }
    std::string ignored;
    sub->add_option("--config", ignored, "flat key=value config file");
}

int cmd_synth(std::size_t n_docs, std::size_t n_targets, std::size_t vocab_size,
              std::uint64_t seed, const std::string& mode, const RunConfig& cfg) {
    SynthMode m = mode == "separable" ? SynthMode::separable : SynthMode::mild;
    auto [corpus, task] = generate_synthetic_corpus(n_docs, n_targets, vocab_size, seed, m);
    fs::create_directories(cfg.out_dir);
    save_corpus(corpus, cfg.out_dir + "/corpus.jsonl");
    save_task_specs({{task.drug, task.genes}}, cfg.out_dir + "/tasks.jsonl");
    echo_config(cfg);
    std::cout << "wrote " << corpus.size() << " documents, "
              << task.target_ids.size() << " targets, HoF "
              << hardness_of_find(task.candidate_ids.size(), task.target_ids.size())
              << "\n";
    return 0;
}

int cmd_ingest(const RunConfig& cfg) {
    LoadedTasks lt = load_inputs(cfg);
    fs::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/tasks_summary.csv");
    out << "task,candidates,targets,hof,ctn\n";
    for (const auto& task : lt.tasks) {
        double hof = hardness_of_find(task.candidate_ids.size(), task.target_ids.size());
        out << task.name() << "," << task.candidate_ids.size() << ","
            << task.target_ids.size() << "," << hof << ","
            << ctn(task.candidate_ids.size(), task.target_ids.size()) << "\n";
    }
    echo_config(cfg);
    std::cout << "loaded " << lt.corpus.size() << " references, vocabulary "
              << lt.vocab.size() - 2 << ", " << lt.tasks.size() << " tasks\n";
    return 0;
}

int cmd_graph(const RunConfig& cfg) {
    LoadedTasks lt = load_inputs(cfg);
    auto graphs = build_graphs(lt, cfg.k);
    fs::create_directories(cfg.out_dir);
    for (const auto& [name, graph] : graphs) {
        std::ofstream out(cfg.out_dir + "/graph_" + name + ".csv");
        export_graph_csv(graph, out);
    }
    echo_config(cfg);
    std::cout << "wrote " << graphs.size() << " neighbor graphs (k=" << cfg.k << ")\n";
    return 0;
}

int cmd_train_baseline(const RunConfig& cfg) {
    LoadedTasks lt = load_inputs(cfg);
    ClassifierTrainOptions opts;
    opts.dim = cfg.d;
    opts.epochs = cfg.baseline_epochs;
    opts.learning_rate = cfg.learning_rate;
    opts.seed = cfg.seed;
    ClassifierModel model = train_classifier(lt.corpus, lt.vocab, lt.tasks, opts);
    fs::create_directories(cfg.out_dir);
    model.save(cfg.out_dir + "/baseline.ckpt.json");
    std::ofstream out(cfg.out_dir + "/rankings.csv");
    out << "task,rank,id,probability\n";
    for (const auto& task : lt.tasks) {
        auto ranking = rank_candidates(model, lt.corpus, lt.vocab, task.candidate_ids);
        write_ranking_csv(task.name(), model, lt.corpus, lt.vocab, ranking, out);
        std::cout << task.name() << ": reads until target "
                  << reads_until_target(ranking, task.target_ids) << "\n";
    }
    echo_config(cfg);
    return 0;
}

int cmd_train_agent(const RunConfig& cfg, const std::string& baseline_ckpt) {
    LoadedTasks lt = load_inputs(cfg);
    auto graphs = build_graphs(lt, cfg.k);
    auto starts = baseline_starts(lt, baseline_ckpt);

    TrainOptions opts;
    opts.algo = parse_algo(cfg.algo);
    opts.episodes_per_task = cfg.episodes_per_task;
    opts.k = cfg.k;
    opts.reward.step_penalty = cfg.c_p;
    opts.reward.discount = cfg.gamma;
    opts.beta = cfg.beta;
    opts.delta = cfg.delta;
    opts.lambda = cfg.lambda;
    opts.learning_rate = cfg.learning_rate;
    opts.use_similarity = cfg.use_similarity;
    opts.dim = cfg.d;
    opts.seed = cfg.seed;

    TrainResult result = train_agent(lt.corpus, lt.vocab, lt.tasks, graphs, starts, opts);
    fs::create_directories(cfg.out_dir);
    result.model.save(cfg.out_dir + "/agent.ckpt.json");
    std::ofstream out(cfg.out_dir + "/train_log.csv");
    write_train_log(result.log, out);
    echo_config(cfg);
    std::cout << "trained " << result.log.size() << " episodes ("
              << algo_name(opts.algo) << ")\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint,
                 const std::string& method, const std::string& baseline_ckpt) {
    LoadedTasks lt = load_inputs(cfg);
    auto graphs = build_graphs(lt, cfg.k);
    auto starts = baseline_starts(lt, baseline_ckpt);
    fs::create_directories(cfg.out_dir);

    std::vector<TaskResult> results;
    if (method == "baseline") {
        if (baseline_ckpt.empty())
            throw std::runtime_error("evaluate: method baseline requires --baseline");
        ClassifierModel clf = ClassifierModel::load(baseline_ckpt);
        for (const auto& task : lt.tasks) {
            auto ranking = rank_candidates(clf, lt.corpus, lt.vocab, task.candidate_ids);
            results.push_back(baseline_result(task.name(),
                                              reads_until_target(ranking, task.target_ids),
                                              task.candidate_ids.size(),
                                              task.target_ids.size()));
        }
    } else {
        PolicyModel model = checkpoint.empty()
                                ? PolicyModel::init(lt.vocab, cfg.d, cfg.seed)
                                : PolicyModel::load(checkpoint);
        EvalOptions opts;
        opts.method = method;
        opts.n_episodes = cfg.n_episodes;
        opts.base_seed = cfg.base_seed;
        opts.reward.step_penalty = cfg.c_p;
        opts.reward.discount = cfg.gamma;
        opts.policy.uniform_random = (method == "random");
        opts.policy.distance_weights = (method == "a2c");
        opts.policy.use_similarity = cfg.use_similarity;
        results = evaluate_agent(model, lt.vocab, lt.corpus, lt.tasks, graphs, starts, opts);
    }
    save_results(results, cfg.out_dir + "/results_" + method + ".json");
    emit_report(results, cfg.out_dir);
    echo_config(cfg);
    for (const auto& r : results)
        std::cout << r.method << " " << r.task << ": median reads " << r.median_reads
                  << ", EI " << r.ei << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& result_files, const RunConfig& cfg) {
    std::vector<TaskResult> all;
    for (const auto& f : result_files) {
        auto part = load_results(f);
        all.insert(all.end(), part.begin(), part.end());
    }
    emit_report(all, cfg.out_dir);
    std::cout << "report written to " << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"literature navigation: corpus ingestion, graph building, training, "
                 "evaluation and reporting"};
    app.require_subcommand(1);

    RunConfig cfg;
    if (const char* env_out = std::getenv("REFNAV_OUT_DIR")) cfg.out_dir = env_out;

    std::size_t n_docs = 500, n_targets = 10, vocab_size = 1000;
    std::string synth_mode = "mild";
    std::string checkpoint, baseline_ckpt, method = "a2c";
    std::vector<std::string> result_files;

    auto add_common = [&](CLI::App* sub, bool needs_inputs) {
        try {
            preload_config(sub, cfg, argc, argv);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            std::exit(2);
        }
        auto* out = sub->add_option("--out", cfg.out_dir, "output directory");
        out->capture_default_str();
        if (needs_inputs) {
            sub->add_option("--corpus", cfg.corpus_path, "corpus JSONL file");
            sub->add_option("--tasks", cfg.task_path, "task JSONL file");
            sub->add_flag("--hof-filter,!--no-hof-filter", cfg.hof_filter,
                          "drop tasks with HoF <= 0.5");
        }
    };

    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic corpus");
    add_common(synth, false);
    synth->add_option("--n-docs", n_docs)->capture_default_str();
    synth->add_option("--n-targets", n_targets)->capture_default_str();
    synth->add_option("--vocab-size", vocab_size)->capture_default_str();
    synth->add_option("--seed", cfg.seed)->capture_default_str();
    synth->add_option("--mode", synth_mode, "mild|separable")->capture_default_str();

    auto* ingest = app.add_subcommand("ingest", "load corpus and tasks, write summary");
    add_common(ingest, true);

    auto* graph = app.add_subcommand("graph", "build and export neighbor graphs");
    add_common(graph, true);
    graph->add_option("--k", cfg.k)->capture_default_str();

    auto* trainb = app.add_subcommand("train-baseline", "train the read/not-read classifier");
    add_common(trainb, true);
    trainb->add_option("--epochs", cfg.baseline_epochs)->capture_default_str();
    trainb->add_option("--seed", cfg.seed)->capture_default_str();
    trainb->add_option("--lr", cfg.learning_rate)->capture_default_str();
    trainb->add_option("--d", cfg.d)->capture_default_str();

    auto* traina = app.add_subcommand("train-agent", "train a REINFORCE or A2C agent");
    add_common(traina, true);
    traina->add_option("--algo", cfg.algo, "reinforce|a2c")->capture_default_str();
    traina->add_option("--episodes-per-task", cfg.episodes_per_task)->capture_default_str();
    traina->add_option("--k", cfg.k)->capture_default_str();
    traina->add_option("--seed", cfg.seed)->capture_default_str();
    traina->add_option("--c-p", cfg.c_p)->capture_default_str();
    traina->add_option("--gamma", cfg.gamma)->capture_default_str();
    traina->add_option("--beta", cfg.beta)->capture_default_str();
    traina->add_option("--delta", cfg.delta)->capture_default_str();
    traina->add_option("--lambda", cfg.lambda)->capture_default_str();
    traina->add_option("--lr", cfg.learning_rate)->capture_default_str();
    traina->add_option("--d", cfg.d)->capture_default_str();
    traina->add_flag("--use-similarity", cfg.use_similarity,
                     "weight A2C logits by 1-distance instead of distance");
    traina->add_option("--baseline", baseline_ckpt, "baseline checkpoint for start papers");

    auto* eval = app.add_subcommand("evaluate", "run the 30-episode median evaluation");
    add_common(eval, true);
    eval->add_option("--checkpoint", checkpoint, "agent checkpoint");
    eval->add_option("--method", method, "baseline|reinforce|a2c|random")
        ->capture_default_str();
    eval->add_option("--episodes", cfg.n_episodes)->capture_default_str();
    eval->add_option("--base-seed", cfg.base_seed)->capture_default_str();
    eval->add_option("--k", cfg.k)->capture_default_str();
    eval->add_option("--baseline", baseline_ckpt, "baseline checkpoint for start papers");
    eval->add_flag("--use-similarity", cfg.use_similarity);

    auto* report = app.add_subcommand("report", "merge result files into a report");
    add_common(report, false);
    report->add_option("--results", result_files, "results JSON files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed())
            return cmd_synth(n_docs, n_targets, vocab_size, cfg.seed, synth_mode, cfg);
        if (ingest->parsed()) return cmd_ingest(cfg);
        if (graph->parsed()) return cmd_graph(cfg);
        if (trainb->parsed()) return cmd_train_baseline(cfg);
        if (traina->parsed()) return cmd_train_agent(cfg, baseline_ckpt);
        if (eval->parsed()) return cmd_evaluate(cfg, checkpoint, method, baseline_ckpt);
        if (report->parsed()) return cmd_report(result_files, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
