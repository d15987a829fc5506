#include "sbcn/cli.hpp"

#include "sbcn/datagen.hpp"
#include "sbcn/error.hpp"
#include "sbcn/eval.hpp"
#include "sbcn/io.hpp"
#include "sbcn/scoring.hpp"
#include "sbcn/search.hpp"
#include "sbcn/suppes.hpp"
#include "sbcn/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace sbcn::cli {

namespace {

using nlohmann::json;

struct UsageError : Error {
    using Error::Error;
};

struct GenerateFlags {
    std::string topology;
    std::size_t nodes = 0;
    std::size_t samples = 0;
    double noise = 0.0;
    std::optional<double> fp_rate;
    std::optional<double> fn_rate;
    std::uint64_t seed = 0;
    std::string out = "data.csv";
    std::string truth = "truth.json";
};

struct InferFlags {
    std::string data;
    std::string out = "inferred.json";
    std::string mask_out;
    std::string search = "hc";
    std::string score = "bic";
    double bde_alpha = 1.0;
    std::string suppes = "on";
    std::optional<double> pr_alpha;
    std::uint64_t seed = 0;
    SearchSpec spec;
};

struct EvalFlags {
    std::string truth;
    std::string inferred;
    bool skeleton = false;
};

struct BenchmarkFlags {
    std::string config;
    std::string out;
    std::string summary;
    std::size_t workers = 1;
    bool fresh = false;
};

std::vector<std::string> header_comments(const json& config) {
    return {kVersion, "config " + config.dump()};
}

int cmd_generate(const GenerateFlags& f, std::ostream& out, std::ostream& /*err*/) {
    TopologyKind kind;
    try {
        kind = parse_topology(f.topology);
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    if (f.nodes == 0) throw UsageError("--nodes must be positive");
    if (f.samples == 0) throw UsageError("--samples must be positive");
    const double fp = f.fp_rate.value_or(f.noise);
    const double fn = f.fn_rate.value_or(f.noise);
    for (double r : {f.noise, fp, fn}) {
        if (!(r >= 0.0 && r <= 1.0)) throw UsageError("noise rates must lie in [0, 1]");
    }

    const json config = {{"command", "generate"},   {"topology", f.topology}, {"nodes", f.nodes},
                         {"samples", f.samples},    {"noise", f.noise},       {"fp_rate", fp},
                         {"fn_rate", fn},           {"seed", f.seed},         {"out", f.out},
                         {"truth", f.truth}};

    Rng structure_rng = Rng::substream(f.seed, "structure");
    Rng sampling_rng = Rng::substream(f.seed, "sampling");
    Rng noise_rng = Rng::substream(f.seed, "noise");
    const GenerativeModel model = generate_structure(kind, f.nodes, structure_rng);
    const BinaryDataset clean = sample_dataset(model, f.samples, sampling_rng);
    const BinaryDataset data = inject_noise(clean, fp, fn, noise_rng);

    write_dataset_file(f.out, data, header_comments(config));
    json truth = graph_to_json(model.dag, data.names());
    truth["model"] = model.to_json();
    truth["version"] = kVersion;
    truth["config"] = config;
    write_json_file(f.truth, truth);

    out << "# " << kVersion << "\n# config " << config.dump() << '\n';
    out << "wrote " << data.samples() << "x" << data.variables() << " dataset to " << f.out << ", "
        << model.dag.arc_count() << "-arc truth to " << f.truth << '\n';
    return kExitOk;
}

int cmd_infer(const InferFlags& f, std::ostream& out, std::ostream& err) {
    ScoreSpec spec;
    SearchSpec search = f.spec;
    try {
        spec.kind = parse_score_kind(f.score);
        search.strategy = parse_search_strategy(f.search);
        spec.equivalent_sample_size = f.bde_alpha;
        spec.max_parents = search.max_parents;
        spec.validate();
        search.validate();
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    if (f.suppes != "on" && f.suppes != "off") throw UsageError("--suppes must be on or off");
    SuppesOptions suppes;
    if (f.pr_alpha) {
        if (!(*f.pr_alpha > 0.0 && *f.pr_alpha < 1.0)) throw UsageError("--pr-alpha must lie in (0, 1)");
        suppes.significance = true;
        suppes.alpha = *f.pr_alpha;
    }
    search.rng_seed = Rng::substream(f.seed, "search").next();

    json config = {{"command", "infer"},
                   {"data", f.data},
                   {"out", f.out},
                   {"search", f.search},
                   {"score", f.score},
                   {"bde_alpha", spec.equivalent_sample_size},
                   {"suppes", f.suppes},
                   {"pr_significance", suppes.significance},
                   {"pr_alpha", suppes.alpha},
                   {"seed", f.seed},
                   {"max_parents", search.max_parents},
                   {"ga_pop", search.ga_population},
                   {"ga_gens", search.ga_generations},
                   {"ga_mut", search.ga_mutation_rate},
                   {"tabu_tenure", search.tabu_tenure},
                   {"tabu_max_iter", search.tabu_max_iterations}};

    const auto start = std::chrono::steady_clock::now();
    const BinaryDataset data = read_dataset_file(f.data);
    const bool use_suppes = f.suppes == "on";
    if (use_suppes) {
        const auto degenerate = degenerate_variables(data);
        for (NodeIndex v : degenerate) {
            err << "warning: variable '" << data.names()[v] << "' is constant; no arcs may touch it\n";
        }
    }
    const ArcMask mask = use_suppes ? prima_facie_mask(data, suppes) : full_mask(data.variables());
    const SearchResult result = run_search(data, mask, spec, search);
    const double wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    json doc = graph_to_json(result.dag, data.names());
    doc["version"] = kVersion;
    doc["config"] = config;
    doc["score"] = result.score;
    doc["mask_size"] = mask.count();
    write_json_file(f.out, doc);
    if (!f.mask_out.empty()) {
        json mask_doc = mask_to_json(mask, data.names());
        mask_doc["version"] = kVersion;
        mask_doc["config"] = config;
        write_json_file(f.mask_out, mask_doc);
    }

    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", wall_ms);
    out << "# " << kVersion << "\n# config " << config.dump() << '\n';
    out << "score=" << format_number(result.score) << " score_kind=" << f.score << " mask_size=" << mask.count()
        << " arcs=" << result.dag.arc_count() << " iterations=" << result.iterations << " wall_time_ms=" << wall
        << '\n';
    return kExitOk;
}

int cmd_eval(const EvalFlags& f, std::ostream& out, std::ostream& /*err*/) {
    const GraphDocument truth = read_graph_file(f.truth);
    const GraphDocument inferred = read_graph_file(f.inferred);
    const auto mode = f.skeleton ? ComparisonMode::skeleton : ComparisonMode::directed;
    const MetricRecord r = metrics(truth.dag, inferred.dag, mode);
    const json config = {{"command", "eval"}, {"truth", f.truth}, {"inferred", f.inferred}, {"skeleton", f.skeleton}};
    out << "# " << kVersion << "\n# config " << config.dump() << '\n';
    out << "mode,n,tp,fp,tn,fn,accuracy,sensitivity,specificity\n";
    out << (f.skeleton ? "skeleton" : "directed") << ',' << truth.dag.nodes() << ',' << r.tp << ',' << r.fp << ','
        << r.tn << ',' << r.fn << ',' << format_number(r.accuracy) << ',' << format_number(r.sensitivity) << ','
        << format_number(r.specificity) << '\n';
    return kExitOk;
}

int cmd_benchmark(const BenchmarkFlags& f, std::ostream& out, std::ostream& err) {
    std::ifstream in(f.config);
    if (!in) throw IoError("cannot open '" + f.config + "' for reading");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("'" + f.config + "': " + e.what());
    }
    ExperimentGrid grid;
    try {
        grid = ExperimentGrid::from_json(doc);
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    if (f.workers == 0) throw UsageError("--workers must be positive");

    const std::string journal = f.out + ".journal";
    if (f.fresh) std::filesystem::remove(journal);

    GridRunOptions options;
    options.workers = f.workers;
    options.journal_path = journal;
    options.on_cell = [&](const CellResult& r, std::size_t done, std::size_t total) {
        if (!r.ok()) err << "cell " << r.key.id() << " failed: " << r.error << '\n';
        if (done == total || done % 50 == 0) err << "progress " << done << "/" << total << '\n';
    };
    const auto results = run_grid(grid, options);

    const json config = {{"command", "benchmark"}, {"grid", grid.to_json()}};
    {
        std::ofstream file(f.out, std::ios::binary);
        if (!file) throw IoError("cannot open '" + f.out + "' for writing");
        write_results(file, results, header_comments(config));
        if (!file) throw IoError("write to '" + f.out + "' failed");
    }
    if (!f.summary.empty()) {
        std::ofstream file(f.summary, std::ios::binary);
        if (!file) throw IoError("cannot open '" + f.summary + "' for writing");
        const auto rows = aggregate(results);
        write_summary(file, rows, header_comments(config));
    }

    std::size_t failures = 0;
    for (const auto& r : results) failures += r.ok() ? 0 : 1;
    out << "# " << kVersion << "\n# config " << config.dump() << '\n';
    out << "cells=" << results.size() << " failures=" << failures << " results=" << f.out << '\n';
    return failures * 100 > results.size() ? kExitFailure : kExitOk;
}

std::size_t default_workers() {
    if (const char* env = std::getenv("SBCN_WORKERS")) {
        try {
            const auto w = std::stoul(env);
            if (w > 0) return w;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Structure learning for Suppes-Bayes causal networks", "sbcn"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    GenerateFlags gen;
    auto* generate = app.add_subcommand("generate", "Sample a random generative model and a dataset from it");
    generate->add_option("--topology", gen.topology,
                         "tree|forest|dag_conj_single|dag_conj_multi|dag_disj_single|dag_disj_multi")
        ->required();
    generate->add_option("--nodes", gen.nodes, "Number of variables")->required();
    generate->add_option("--samples", gen.samples, "Number of samples")->required();
    generate->add_option("--noise", gen.noise, "Symmetric per-cell flip rate")->capture_default_str();
    generate->add_option("--fp-rate", gen.fp_rate, "0 -> 1 flip rate (overrides --noise)");
    generate->add_option("--fn-rate", gen.fn_rate, "1 -> 0 flip rate (overrides --noise)");
    generate->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
    generate->add_option("--out", gen.out, "Dataset file")->capture_default_str();
    generate->add_option("--truth", gen.truth, "Ground-truth graph document")->capture_default_str();

    InferFlags inf;
    auto* infer = app.add_subcommand("infer", "Learn a network from a dataset");
    infer->add_option("--data", inf.data, "Dataset file")->required();
    infer->add_option("--out", inf.out, "Inferred graph document")->capture_default_str();
    infer->add_option("--mask-out", inf.mask_out, "Also write the admissible arc set");
    infer->add_option("--search", inf.search, "hc|tabu|ga")->capture_default_str();
    infer->add_option("--score", inf.score, "loglik|aic|bic|bde|k2")->capture_default_str();
    infer->add_option("--bde-alpha", inf.bde_alpha, "BDeu equivalent sample size")->capture_default_str();
    infer->add_option("--suppes", inf.suppes, "on|off")->capture_default_str();
    infer->add_option("--pr-alpha", inf.pr_alpha, "Require significant probability raising at this level");
    infer->add_option("--seed", inf.seed, "Base seed")->capture_default_str();
    infer->add_option("--max-parents", inf.spec.max_parents)->capture_default_str();
    infer->add_option("--ga-pop", inf.spec.ga_population)->capture_default_str();
    infer->add_option("--ga-gens", inf.spec.ga_generations)->capture_default_str();
    infer->add_option("--ga-mut", inf.spec.ga_mutation_rate)->capture_default_str();
    infer->add_option("--tabu-tenure", inf.spec.tabu_tenure)->capture_default_str();
    infer->add_option("--tabu-max-iter", inf.spec.tabu_max_iterations)->capture_default_str();

    EvalFlags ev;
    auto* eval = app.add_subcommand("eval", "Compare an inferred graph with the ground truth");
    eval->add_option("--truth", ev.truth, "Ground-truth graph document")->required();
    eval->add_option("--inferred", ev.inferred, "Inferred graph document")->required();
    eval->add_flag("--skeleton", ev.skeleton, "Compare undirected skeletons");

    BenchmarkFlags bench;
    bench.workers = default_workers();
    auto* benchmark = app.add_subcommand("benchmark", "Run an experiment grid");
    benchmark->add_option("--config", bench.config, "Grid config document")->required();
    benchmark->add_option("--out", bench.out, "Results file")->required();
    benchmark->add_option("--summary", bench.summary, "Per-cell mean/sd file");
    benchmark->add_option("--workers", bench.workers, "Worker threads (default: $SBCN_WORKERS or 1)")
        ->capture_default_str();
    benchmark->add_flag("--fresh", bench.fresh, "Discard the completion journal");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* failed = &app;
        for (const auto* sub : app.get_subcommands()) failed = sub;
        err << failed->help();
        return kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen, out, err);
        if (infer->parsed()) return cmd_infer(inf, out, err);
        if (eval->parsed()) return cmd_eval(ev, out, err);
        return cmd_benchmark(bench, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace sbcn::cli
