#include "sbcn/eval.hpp"

#include "sbcn/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>
#include <unordered_map>

namespace sbcn {

MetricRecord MetricRecord::from_counts(const ConfusionCounts& c) {
    MetricRecord r;
    r.tp = c.tp;
    r.fp = c.fp;
    r.tn = c.tn;
    r.fn = c.fn;
    const auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    r.accuracy = ratio(c.tp + c.tn, c.total());
    r.sensitivity = ratio(c.tp, c.tp + c.fn);
    r.specificity = ratio(c.tn, c.fp + c.tn);
    return r;
}

MetricRecord metrics(const Dag& truth, const Dag& inferred, ComparisonMode mode) {
    return MetricRecord::from_counts(mode == ComparisonMode::directed ? structural_hamming_components(truth, inferred)
                                                                      : skeleton_components(truth, inferred));
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

std::string CellKey::id() const {
    return std::string(to_string(topology)) + "|" + std::to_string(n) + "|" + std::to_string(m) + "|" +
           format_number(noise) + "|" + std::string(to_string(search)) + "|" + std::string(to_string(score)) + "|" +
           (suppes ? "on" : "off") + "|" + std::to_string(replicate);
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t replicate) { return base_seed + replicate; }

CellResult run_cell(const CellKey& key, const RunSettings& settings) {
    const auto start = std::chrono::steady_clock::now();
    CellResult result;
    result.key = key;
    result.seed = cell_seed(settings.base_seed, key.replicate);
    try {
        Rng structure_rng = Rng::substream(result.seed, "structure");
        Rng sampling_rng = Rng::substream(result.seed, "sampling");
        Rng noise_rng = Rng::substream(result.seed, "noise");

        const GenerativeModel model = generate_structure(key.topology, key.n, structure_rng);
        const BinaryDataset clean = sample_dataset(model, key.m, sampling_rng);
        const BinaryDataset data = inject_noise(clean, key.noise, noise_rng);
        result.degenerate_columns = degenerate_variables(data).size();

        const ArcMask mask = key.suppes ? prima_facie_mask(data, settings.suppes) : full_mask(key.n);
        result.mask_size = mask.count();

        SearchSpec search = settings.search;
        search.strategy = key.search;
        search.rng_seed = Rng::substream(result.seed, "search").next();
        ScoreSpec spec;
        spec.kind = key.score;
        spec.equivalent_sample_size = settings.bde_alpha;
        spec.max_parents = search.max_parents;

        const SearchResult found = run_search(data, mask, spec, search);
        result.final_score = found.score;
        result.iterations = found.iterations;
        result.true_arcs = model.dag.arc_count();
        result.inferred_arcs = found.dag.arc_count();
        for (const auto& a : found.dag.arcs()) {
            if (!mask.allowed(a.parent, a.child)) ++result.arcs_outside_mask;
        }
        result.directed = metrics(model.dag, found.dag, ComparisonMode::directed);
        result.skeleton = metrics(model.dag, found.dag, ComparisonMode::skeleton);
    } catch (const std::exception& e) {
        result.error = e.what();
        result.directed.reset();
        result.skeleton.reset();
    }
    result.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

namespace {

nlohmann::json metric_json(const std::optional<MetricRecord>& r) {
    if (!r) return nullptr;
    return {{"tp", r->tp},
            {"fp", r->fp},
            {"tn", r->tn},
            {"fn", r->fn},
            {"accuracy", r->accuracy},
            {"sensitivity", r->sensitivity},
            {"specificity", r->specificity}};
}

std::optional<MetricRecord> metric_from_json(const nlohmann::json& doc) {
    if (doc.is_null()) return std::nullopt;
    MetricRecord r;
    r.tp = doc.at("tp").get<std::size_t>();
    r.fp = doc.at("fp").get<std::size_t>();
    r.tn = doc.at("tn").get<std::size_t>();
    r.fn = doc.at("fn").get<std::size_t>();
    r.accuracy = doc.at("accuracy").get<double>();
    r.sensitivity = doc.at("sensitivity").get<double>();
    r.specificity = doc.at("specificity").get<double>();
    return r;
}

}  // namespace

nlohmann::json CellResult::to_json() const {
    return {
        {"topology", to_string(key.topology)},
        {"n", key.n},
        {"m", key.m},
        {"noise", key.noise},
        {"search", to_string(key.search)},
        {"score", to_string(key.score)},
        {"suppes", key.suppes},
        {"replicate", key.replicate},
        {"seed", seed},
        {"directed", metric_json(directed)},
        {"skeleton", metric_json(skeleton)},
        {"true_arcs", true_arcs},
        {"inferred_arcs", inferred_arcs},
        {"mask_size", mask_size},
        {"arcs_outside_mask", arcs_outside_mask},
        {"degenerate_columns", degenerate_columns},
        {"iterations", iterations},
        {"final_score", final_score},
        {"wall_time_ms", wall_time_ms},
        {"error", error},
    };
}

CellResult CellResult::from_json(const nlohmann::json& doc) {
    CellResult r;
    r.key.topology = parse_topology(doc.at("topology").get<std::string>());
    r.key.n = doc.at("n").get<std::size_t>();
    r.key.m = doc.at("m").get<std::size_t>();
    r.key.noise = doc.at("noise").get<double>();
    r.key.search = parse_search_strategy(doc.at("search").get<std::string>());
    r.key.score = parse_score_kind(doc.at("score").get<std::string>());
    r.key.suppes = doc.at("suppes").get<bool>();
    r.key.replicate = doc.at("replicate").get<std::size_t>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.directed = metric_from_json(doc.at("directed"));
    r.skeleton = metric_from_json(doc.at("skeleton"));
    r.true_arcs = doc.at("true_arcs").get<std::size_t>();
    r.inferred_arcs = doc.at("inferred_arcs").get<std::size_t>();
    r.mask_size = doc.at("mask_size").get<std::size_t>();
    r.arcs_outside_mask = doc.at("arcs_outside_mask").get<std::size_t>();
    r.degenerate_columns = doc.at("degenerate_columns").get<std::size_t>();
    r.iterations = doc.at("iterations").get<std::size_t>();
    r.final_score = doc.at("final_score").get<double>();
    r.wall_time_ms = doc.at("wall_time_ms").get<double>();
    r.error = doc.at("error").get<std::string>();
    return r;
}

void ExperimentGrid::validate() const {
    if (topologies.empty() || node_counts.empty() || sample_sizes.empty() || noise_levels.empty() ||
        searches.empty() || scores.empty() || suppes.empty()) {
        throw InvalidInput("experiment grid has an empty axis");
    }
    if (replicates == 0) throw InvalidInput("experiment grid needs at least one replicate");
    for (auto n : node_counts) {
        if (n == 0) throw InvalidInput("node counts must be positive");
    }
    for (auto m : sample_sizes) {
        if (m == 0) throw InvalidInput("sample sizes must be positive");
    }
    for (auto nu : noise_levels) {
        if (!(nu >= 0.0 && nu <= 1.0)) throw InvalidInput("noise levels must lie in [0, 1]");
    }
    settings.search.validate();
    if (!(settings.bde_alpha > 0.0)) throw InvalidInput("bde alpha must be positive");
}

std::vector<CellKey> ExperimentGrid::cells() const {
    std::vector<CellKey> out;
    for (auto topology : topologies)
        for (auto n : node_counts)
            for (auto m : sample_sizes)
                for (auto noise : noise_levels)
                    for (auto search : searches)
                        for (auto score : scores)
                            for (bool s : suppes)
                                for (std::size_t r = 0; r < replicates; ++r)
                                    out.push_back({topology, n, m, noise, search, score, s, r});
    return out;
}

nlohmann::json ExperimentGrid::to_json() const {
    nlohmann::json doc;
    auto& t = doc["topologies"] = nlohmann::json::array();
    for (auto k : topologies) t.push_back(to_string(k));
    doc["node_counts"] = node_counts;
    doc["sample_sizes"] = sample_sizes;
    doc["noise_levels"] = noise_levels;
    auto& s = doc["searches"] = nlohmann::json::array();
    for (auto k : searches) s.push_back(to_string(k));
    auto& sc = doc["scores"] = nlohmann::json::array();
    for (auto k : scores) sc.push_back(to_string(k));
    auto& sp = doc["suppes"] = nlohmann::json::array();
    for (bool b : suppes) sp.push_back(b ? "on" : "off");
    doc["replicates"] = replicates;
    doc["base_seed"] = settings.base_seed;
    doc["max_parents"] = settings.search.max_parents;
    doc["tabu_tenure"] = settings.search.tabu_tenure;
    doc["tabu_max_iterations"] = settings.search.tabu_max_iterations;
    doc["ga_population"] = settings.search.ga_population;
    doc["ga_generations"] = settings.search.ga_generations;
    doc["ga_mutation_rate"] = settings.search.ga_mutation_rate;
    doc["bde_alpha"] = settings.bde_alpha;
    doc["pr_significance"] = settings.suppes.significance;
    doc["pr_alpha"] = settings.suppes.alpha;
    return doc;
}

ExperimentGrid ExperimentGrid::from_json(const nlohmann::json& doc) {
    ExperimentGrid g;
    try {
        if (doc.contains("topologies"))
            for (const auto& v : doc["topologies"]) g.topologies.push_back(parse_topology(v.get<std::string>()));
        if (doc.contains("node_counts")) g.node_counts = doc["node_counts"].get<std::vector<std::size_t>>();
        if (doc.contains("sample_sizes")) g.sample_sizes = doc["sample_sizes"].get<std::vector<std::size_t>>();
        if (doc.contains("noise_levels")) g.noise_levels = doc["noise_levels"].get<std::vector<double>>();
        if (doc.contains("searches"))
            for (const auto& v : doc["searches"]) g.searches.push_back(parse_search_strategy(v.get<std::string>()));
        if (doc.contains("scores"))
            for (const auto& v : doc["scores"]) g.scores.push_back(parse_score_kind(v.get<std::string>()));
        if (doc.contains("suppes")) {
            for (const auto& v : doc["suppes"]) {
                if (v.is_boolean()) g.suppes.push_back(v.get<bool>());
                else if (v == "on") g.suppes.push_back(true);
                else if (v == "off") g.suppes.push_back(false);
                else throw InvalidInput("suppes values must be \"on\" or \"off\"");
            }
        }
        auto& st = g.settings;
        g.replicates = doc.value("replicates", g.replicates);
        st.base_seed = doc.value("base_seed", st.base_seed);
        st.search.max_parents = doc.value("max_parents", st.search.max_parents);
        st.search.tabu_tenure = doc.value("tabu_tenure", st.search.tabu_tenure);
        st.search.tabu_max_iterations = doc.value("tabu_max_iterations", st.search.tabu_max_iterations);
        st.search.ga_population = doc.value("ga_population", st.search.ga_population);
        st.search.ga_generations = doc.value("ga_generations", st.search.ga_generations);
        st.search.ga_mutation_rate = doc.value("ga_mutation_rate", st.search.ga_mutation_rate);
        st.bde_alpha = doc.value("bde_alpha", st.bde_alpha);
        st.suppes.significance = doc.value("pr_significance", st.suppes.significance);
        st.suppes.alpha = doc.value("pr_alpha", st.suppes.alpha);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("grid config: ") + e.what());
    }
    g.validate();
    return g;
}

std::vector<CellResult> run_grid(const ExperimentGrid& grid, const GridRunOptions& options) {
    grid.validate();
    const std::vector<CellKey> keys = grid.cells();
    std::vector<std::optional<CellResult>> slots(keys.size());

    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < keys.size(); ++i) index_of.emplace(keys[i].id(), i);

    std::ofstream journal;
    if (!options.journal_path.empty()) {
        std::ifstream previous(options.journal_path);
        std::string line;
        bool torn = false;
        while (std::getline(previous, line)) {
            torn = previous.eof();
            if (line.empty()) continue;
            try {
                CellResult r = CellResult::from_json(nlohmann::json::parse(line));
                auto it = index_of.find(r.key.id());
                if (it != index_of.end() && cell_seed(grid.settings.base_seed, r.key.replicate) == r.seed) {
                    slots[it->second] = std::move(r);
                }
            } catch (const std::exception&) {
                // A torn final line from an interrupted run; the cell is recomputed.
            }
        }
        journal.open(options.journal_path, std::ios::app);
        if (!journal) throw IoError("cannot open journal '" + options.journal_path + "'");
        if (torn) journal << '\n';
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (!slots[i]) pending.push_back(i);
    }
    std::size_t done = keys.size() - pending.size();

    std::mutex mutex;
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t j = next++; j < pending.size(); j = next++) {
            const std::size_t i = pending[j];
            CellResult r = run_cell(keys[i], grid.settings);
            std::lock_guard lock(mutex);
            if (journal.is_open()) journal << r.to_json().dump() << '\n' << std::flush;
            ++done;
            if (options.on_cell) options.on_cell(r, done, keys.size());
            slots[i] = std::move(r);
        }
    };
    const std::size_t width = std::max<std::size_t>(1, std::min(options.workers, pending.size()));
    if (width == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
    }

    std::vector<CellResult> results;
    results.reserve(keys.size());
    for (auto& slot : slots) results.push_back(std::move(*slot));
    return results;
}

void write_results(std::ostream& out, std::span<const CellResult> results, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << "topology,n,m,noise,search,score,suppes,replicate,seed,tp,fp,tn,fn,accuracy,sensitivity,specificity,"
           "wall_time_ms\n";
    for (const auto& r : results) {
        out << to_string(r.key.topology) << ',' << r.key.n << ',' << r.key.m << ',' << format_number(r.key.noise) << ','
            << to_string(r.key.search) << ',' << to_string(r.key.score) << ',' << (r.key.suppes ? "on" : "off") << ','
            << r.key.replicate << ',' << r.seed << ',';
        if (r.directed) {
            const auto& d = *r.directed;
            out << d.tp << ',' << d.fp << ',' << d.tn << ',' << d.fn << ',' << format_number(d.accuracy) << ','
                << format_number(d.sensitivity) << ',' << format_number(d.specificity) << ',';
        } else {
            out << "NA,NA,NA,NA,NA,NA,NA,";
        }
        char wall[32];
        std::snprintf(wall, sizeof wall, "%.3f", r.wall_time_ms);
        out << wall << '\n';
    }
}

namespace {

using GroupKey = std::tuple<int, std::size_t, std::size_t, double, int, int, bool>;

GroupKey group_of(const CellKey& k) {
    return {static_cast<int>(k.topology), k.n, k.m, k.noise, static_cast<int>(k.search), static_cast<int>(k.score),
            k.suppes};
}

// Sorted before summing so the result does not depend on input order.
std::pair<double, double> mean_sd(std::vector<double> values) {
    if (values.empty()) return {std::nan(""), std::nan("")};
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

}  // namespace

std::vector<SummaryRow> aggregate(std::span<const CellResult> results) {
    struct Bucket {
        CellKey key;
        std::size_t failures = 0;
        std::vector<double> acc, sens, spec;
    };
    std::map<GroupKey, Bucket> buckets;
    for (const auto& r : results) {
        auto& b = buckets[group_of(r.key)];
        b.key = r.key;
        b.key.replicate = 0;
        if (!r.directed) {
            ++b.failures;
            continue;
        }
        b.acc.push_back(r.directed->accuracy);
        b.sens.push_back(r.directed->sensitivity);
        b.spec.push_back(r.directed->specificity);
    }
    std::vector<SummaryRow> rows;
    for (auto& [_, b] : buckets) {
        SummaryRow row;
        row.key = b.key;
        row.count = b.acc.size();
        row.failures = b.failures;
        std::tie(row.accuracy_mean, row.accuracy_sd) = mean_sd(b.acc);
        std::tie(row.sensitivity_mean, row.sensitivity_sd) = mean_sd(b.sens);
        std::tie(row.specificity_mean, row.specificity_sd) = mean_sd(b.spec);
        rows.push_back(row);
    }
    return rows;
}

void write_summary(std::ostream& out, std::span<const SummaryRow> rows, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    out << "topology,n,m,noise,search,score,suppes,count,failures,accuracy_mean,accuracy_sd,sensitivity_mean,"
           "sensitivity_sd,specificity_mean,specificity_sd\n";
    for (const auto& r : rows) {
        out << to_string(r.key.topology) << ',' << r.key.n << ',' << r.key.m << ',' << format_number(r.key.noise) << ','
            << to_string(r.key.search) << ',' << to_string(r.key.score) << ',' << (r.key.suppes ? "on" : "off") << ','
            << r.count << ',' << r.failures << ',' << format_number(r.accuracy_mean) << ','
            << format_number(r.accuracy_sd) << ',' << format_number(r.sensitivity_mean) << ','
            << format_number(r.sensitivity_sd) << ',' << format_number(r.specificity_mean) << ','
            << format_number(r.specificity_sd) << '\n';
    }
}

}  // namespace sbcn
