#pragma once

#include "sbcn/datagen.hpp"
#include "sbcn/model.hpp"
#include "sbcn/scoring.hpp"
#include "sbcn/search.hpp"
#include "sbcn/suppes.hpp"

#include <functional>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sbcn {

enum class ComparisonMode { directed, skeleton };

struct MetricRecord {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    double accuracy = 1.0;
    double sensitivity = 1.0;
    double specificity = 1.0;

    /// Empty positive or negative classes score 1.
    static MetricRecord from_counts(const ConfusionCounts& counts);
    friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

/// Throws InvalidComparison when node counts differ.
MetricRecord metrics(const Dag& truth, const Dag& inferred, ComparisonMode mode = ComparisonMode::directed);

/// One point of the experiment grid.
struct CellKey {
    TopologyKind topology = TopologyKind::tree;
    std::size_t n = 0;
    std::size_t m = 0;
    double noise = 0.0;
    SearchStrategy search = SearchStrategy::hc;
    ScoreKind score = ScoreKind::bic;
    bool suppes = true;
    std::size_t replicate = 0;

    /// Stable textual identity, used by the completion journal.
    std::string id() const;
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

/// Settings shared by every cell of a run.
struct RunSettings {
    SearchSpec search;
    double bde_alpha = 1.0;
    SuppesOptions suppes;
    std::uint64_t base_seed = 0;
};

struct CellResult {
    CellKey key;
    std::uint64_t seed = 0;
    std::optional<MetricRecord> directed;
    std::optional<MetricRecord> skeleton;
    std::size_t true_arcs = 0;
    std::size_t inferred_arcs = 0;
    std::size_t mask_size = 0;
    std::size_t arcs_outside_mask = 0;
    std::size_t degenerate_columns = 0;
    std::size_t iterations = 0;
    double final_score = 0.0;
    double wall_time_ms = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
    nlohmann::json to_json() const;
    static CellResult from_json(const nlohmann::json& doc);
};

/// Random streams of a cell: every stream derives from base_seed + replicate.
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t replicate);

/// Generate, sample, add noise, mask, search, compare. Errors are captured in
/// the result instead of thrown.
CellResult run_cell(const CellKey& key, const RunSettings& settings);

struct ExperimentGrid {
    std::vector<TopologyKind> topologies;
    std::vector<std::size_t> node_counts;
    std::vector<std::size_t> sample_sizes;
    std::vector<double> noise_levels;
    std::vector<SearchStrategy> searches;
    std::vector<ScoreKind> scores;
    std::vector<bool> suppes;
    std::size_t replicates = 1;
    RunSettings settings;

    /// Throws InvalidInput on empty axes or zero replicates.
    void validate() const;
    /// Cartesian expansion in axis order, replicate fastest.
    std::vector<CellKey> cells() const;

    nlohmann::json to_json() const;
    /// Missing keys keep their defaults; unknown axis values throw InvalidInput.
    static ExperimentGrid from_json(const nlohmann::json& doc);
};

struct GridRunOptions {
    std::size_t workers = 1;
    /// When non-empty, completed cells are appended here and reused on rerun.
    std::string journal_path;
    std::function<void(const CellResult&, std::size_t done, std::size_t total)> on_cell;
};

/// Runs every cell; results come back in grid order regardless of completion order.
std::vector<CellResult> run_grid(const ExperimentGrid& grid, const GridRunOptions& options = {});

/// Long-format results with the columns topology, n, m, noise, search, score,
/// suppes, replicate, seed, tp, fp, tn, fn, accuracy, sensitivity,
/// specificity, wall_time_ms. Failed cells have NA metrics.
void write_results(std::ostream& out, std::span<const CellResult> results,
                   const std::vector<std::string>& comments = {});

struct SummaryRow {
    CellKey key;  // replicate unused
    std::size_t count = 0;
    std::size_t failures = 0;
    double accuracy_mean = 0.0, accuracy_sd = 0.0;
    double sensitivity_mean = 0.0, sensitivity_sd = 0.0;
    double specificity_mean = 0.0, specificity_sd = 0.0;
};

/// Mean and sample standard deviation of each metric per grid cell, sorted by
/// key. Independent of input order.
std::vector<SummaryRow> aggregate(std::span<const CellResult> results);

void write_summary(std::ostream& out, std::span<const SummaryRow> rows,
                   const std::vector<std::string>& comments = {});

std::string format_number(double value);

}  // namespace sbcn
