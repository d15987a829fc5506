#pragma once

#include "sbcn/model.hpp"
#include "sbcn/random.hpp"

#include <json.hpp>
#include <string_view>
#include <vector>

namespace sbcn {

enum class TopologyKind { tree, forest, dag_conj_single, dag_conj_multi, dag_disj_single, dag_disj_multi };

std::string_view to_string(TopologyKind kind);
TopologyKind parse_topology(std::string_view name);
inline constexpr TopologyKind kAllTopologies[] = {
    TopologyKind::tree,           TopologyKind::forest,          TopologyKind::dag_conj_single,
    TopologyKind::dag_conj_multi, TopologyKind::dag_disj_single, TopologyKind::dag_disj_multi,
};

bool is_single_root(TopologyKind kind);
/// Largest parent count the kind allows (1 for trees and forests, w* otherwise).
std::size_t parent_bound(TopologyKind kind);

enum class ParentLogic { conjunction, disjunction };

std::string_view to_string(ParentLogic logic);

inline constexpr double kMinProbability = 0.05;
inline constexpr double kMaxProbability = 0.95;
inline constexpr std::size_t kMaxInDegree = 3;

/// Ground-truth cumulative model: a DAG whose non-root nodes fire with
/// probability theta once their parent condition holds, and never otherwise.
struct GenerativeModel {
    TopologyKind kind = TopologyKind::tree;
    Dag dag;
    ParentLogic logic = ParentLogic::conjunction;
    /// Per node: activation probability given the parent condition; unused for roots.
    std::vector<double> theta;
    /// Per node: marginal for parentless nodes; unused otherwise.
    std::vector<double> root_marginal;
    /// Per node depth, 1 for roots.
    std::vector<std::size_t> level;

    std::vector<NodeIndex> roots() const;
    nlohmann::json to_json() const;
};

/// Random model of the given kind over n nodes. Single-source kinds place the
/// root at level 1 and every other node on a level in [2, ceil(log2 n)];
/// parents come from the level immediately above. Multi-root kinds join
/// independent single-source components over a random node partition.
GenerativeModel generate_structure(TopologyKind kind, std::size_t n, Rng& rng);

/// m noiseless samples drawn in topological order.
BinaryDataset sample_dataset(const GenerativeModel& model, std::size_t m, Rng& rng);

/// Fresh copy with each cell flipped independently with probability nu.
BinaryDataset inject_noise(const BinaryDataset& data, double nu, Rng& rng);

/// Asymmetric variant: 0 -> 1 with probability false_positive, 1 -> 0 with
/// probability false_negative.
BinaryDataset inject_noise(const BinaryDataset& data, double false_positive, double false_negative, Rng& rng);

}  // namespace sbcn
