#pragma once

#include "sbcn/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sbcn {

enum class ScoreKind { loglik, aic, bic, bde, k2 };

std::string_view to_string(ScoreKind kind);
/// Throws InvalidInput on unknown names.
ScoreKind parse_score_kind(std::string_view name);

struct ScoreSpec {
    ScoreKind kind = ScoreKind::bic;
    /// Dirichlet equivalent sample size, used by bde only.
    double equivalent_sample_size = 1.0;
    /// Largest parent set local_counts will tabulate.
    std::size_t max_parents = 3;

    void validate() const;
};

/// Child-value counts per parent configuration. Configuration index bit j
/// holds the value of parents[j].
struct LocalCounts {
    std::vector<NodeIndex> parents;
    std::vector<std::array<std::uint32_t, 2>> rows;
};

LocalCounts local_counts(const BinaryDataset& data, NodeIndex child, std::span<const NodeIndex> parents,
                         std::size_t max_parents = 3);

/// Local score of one family, computed from scratch.
double local_score(const BinaryDataset& data, NodeIndex child, std::span<const NodeIndex> parents,
                   const ScoreSpec& spec);

/// Memo of local scores keyed by (child, sorted parent set), bound to one
/// dataset and one score spec.
class ScoreCache {
public:
    ScoreCache(const BinaryDataset& data, ScoreSpec spec);

    const BinaryDataset& data() const { return *data_; }
    const ScoreSpec& spec() const { return spec_; }

    /// Cached local score; `parents` must be sorted.
    double local(NodeIndex child, std::span<const NodeIndex> parents);

    std::size_t size() const { return table_.size(); }
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    struct Key {
        NodeIndex child;
        std::vector<NodeIndex> parents;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    const BinaryDataset* data_;
    ScoreSpec spec_;
    std::unordered_map<Key, double, KeyHash> table_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

/// Maximum-likelihood log-likelihood of the data under g.
double log_likelihood(const BinaryDataset& data, const Dag& g);

/// Number of free parameters: sum over nodes of 2^|parents|.
std::size_t dimension(const Dag& g);

/// Sum of local scores over all nodes, in node order. `cache`, when given,
/// must be bound to the same dataset and spec.
double score(const BinaryDataset& data, const Dag& g, const ScoreSpec& spec, ScoreCache* cache = nullptr);

enum class MoveKind { add, remove, reverse };

std::string_view to_string(MoveKind kind);

/// Single-arc edit. For add/remove the arc is parent -> child; reverse turns
/// the existing arc parent -> child into child -> parent.
struct Move {
    MoveKind kind = MoveKind::add;
    NodeIndex parent = 0;
    NodeIndex child = 0;

    friend bool operator==(const Move&, const Move&) = default;
};

/// Graph after applying a move; throws InvalidMove when the move is illegal
/// (missing/present arc, cycle, mask or parent cap violated).
Dag apply_move(const Dag& g, const Move& move, const ArcMask* mask = nullptr, std::size_t max_parents = 3);

/// score(apply_move(g, move)) - score(g), computed from the affected families only.
double delta_score(const BinaryDataset& data, const Dag& g, const Move& move, const ScoreSpec& spec,
                   ScoreCache* cache = nullptr, const ArcMask* mask = nullptr);

}  // namespace sbcn
