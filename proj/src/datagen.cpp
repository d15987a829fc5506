#include "sbcn/datagen.hpp"

#include "sbcn/error.hpp"

#include <algorithm>

namespace sbcn {

std::string_view to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::tree: return "tree";
        case TopologyKind::forest: return "forest";
        case TopologyKind::dag_conj_single: return "dag_conj_single";
        case TopologyKind::dag_conj_multi: return "dag_conj_multi";
        case TopologyKind::dag_disj_single: return "dag_disj_single";
        case TopologyKind::dag_disj_multi: return "dag_disj_multi";
    }
    return "?";
}

TopologyKind parse_topology(std::string_view name) {
    for (auto k : kAllTopologies) {
        if (to_string(k) == name) return k;
    }
    throw InvalidInput("unknown topology '" + std::string(name) + "'");
}

bool is_single_root(TopologyKind kind) {
    return kind == TopologyKind::tree || kind == TopologyKind::dag_conj_single ||
           kind == TopologyKind::dag_disj_single;
}

std::size_t parent_bound(TopologyKind kind) {
    return kind == TopologyKind::tree || kind == TopologyKind::forest ? 1 : kMaxInDegree;
}

std::string_view to_string(ParentLogic logic) {
    return logic == ParentLogic::conjunction ? "and" : "or";
}

std::vector<NodeIndex> GenerativeModel::roots() const {
    std::vector<NodeIndex> out;
    for (NodeIndex v = 0; v < level.size(); ++v) {
        if (level[v] == 1) out.push_back(v);
    }
    return out;
}

nlohmann::json GenerativeModel::to_json() const {
    nlohmann::json theta_json = nlohmann::json::array();
    nlohmann::json marginal_json = nlohmann::json::array();
    for (NodeIndex v = 0; v < level.size(); ++v) {
        const bool root = level[v] == 1;
        theta_json.push_back(root ? nlohmann::json(nullptr) : nlohmann::json(theta[v]));
        marginal_json.push_back(root ? nlohmann::json(root_marginal[v]) : nlohmann::json(nullptr));
    }
    return {
        {"topology", to_string(kind)},
        {"logic", to_string(logic)},
        {"level", level},
        {"theta", theta_json},
        {"root_marginal", marginal_json},
        {"p_min", kMinProbability},
        {"p_max", kMaxProbability},
        {"max_in_degree", parent_bound(kind)},
    };
}

namespace {

std::size_t ceil_log2(std::size_t x) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < x) ++bits;
    return bits;
}

// Lays out one single-source component over `nodes` (nodes[0] is the root).
void build_component(const std::vector<NodeIndex>& nodes, std::size_t max_parents, Rng& rng,
                     std::vector<std::size_t>& level, std::vector<Arc>& arcs) {
    level[nodes[0]] = 1;
    const std::size_t others = nodes.size() - 1;
    if (others == 0) return;
    const std::size_t depth = std::max<std::size_t>(2, ceil_log2(nodes.size()));
    const std::size_t levels = std::min(depth - 1, others);  // levels 2 .. levels + 1

    std::vector<std::vector<NodeIndex>> by_level(levels + 2);
    by_level[1].push_back(nodes[0]);
    for (std::size_t i = 0; i < others; ++i) {
        const NodeIndex v = nodes[i + 1];
        const std::size_t l = i < levels ? i + 2 : static_cast<std::size_t>(rng.uniform_int(2, levels + 1));
        level[v] = l;
        by_level[l].push_back(v);
    }
    for (auto& members : by_level) std::sort(members.begin(), members.end());

    for (std::size_t l = 2; l <= levels + 1; ++l) {
        for (NodeIndex v : by_level[l]) {
            std::vector<NodeIndex> pool = by_level[l - 1];
            std::size_t k = max_parents == 1 ? 1 : static_cast<std::size_t>(rng.uniform_int(1, max_parents));
            k = std::min(k, pool.size());
            for (std::size_t j = 0; j < k; ++j) {
                const auto pick = static_cast<std::size_t>(rng.uniform_int(j, pool.size() - 1));
                std::swap(pool[j], pool[pick]);
                arcs.push_back({pool[j], v});
            }
        }
    }
}

}  // namespace

GenerativeModel generate_structure(TopologyKind kind, std::size_t n, Rng& rng) {
    if (n == 0) throw InvalidInput("generative model needs at least one node");
    GenerativeModel model;
    model.kind = kind;
    model.logic = (kind == TopologyKind::dag_disj_single || kind == TopologyKind::dag_disj_multi)
                      ? ParentLogic::disjunction
                      : ParentLogic::conjunction;
    model.level.assign(n, 0);

    std::vector<NodeIndex> nodes(n);
    for (NodeIndex v = 0; v < n; ++v) nodes[v] = v;
    shuffle(nodes, rng);

    const std::size_t max_parents = parent_bound(kind);
    std::vector<Arc> arcs;
    if (is_single_root(kind)) {
        build_component(nodes, max_parents, rng, model.level, arcs);
    } else {
        const std::size_t max_roots = std::min(n, (n + 4) / 5);
        const auto root_count = static_cast<std::size_t>(rng.uniform_int(1, max_roots));
        std::vector<std::vector<NodeIndex>> components(root_count);
        for (std::size_t c = 0; c < root_count; ++c) components[c].push_back(nodes[c]);
        for (std::size_t i = root_count; i < n; ++i) {
            components[rng.uniform_int(0, root_count - 1)].push_back(nodes[i]);
        }
        for (const auto& component : components) build_component(component, max_parents, rng, model.level, arcs);
    }
    model.dag = Dag(n, std::move(arcs));

    model.theta.assign(n, 0.0);
    model.root_marginal.assign(n, 0.0);
    for (NodeIndex v = 0; v < n; ++v) {
        const double p = rng.uniform(kMinProbability, kMaxProbability);
        if (model.level[v] == 1) model.root_marginal[v] = p;
        else model.theta[v] = p;
    }
    return model;
}

BinaryDataset sample_dataset(const GenerativeModel& model, std::size_t m, Rng& rng) {
    if (m == 0) throw InvalidInput("sample count must be positive");
    const std::size_t n = model.dag.nodes();
    const auto order = model.dag.topological_order();
    std::vector<std::vector<NodeIndex>> parents(n);
    for (NodeIndex v = 0; v < n; ++v) parents[v] = model.dag.parents(v);

    std::vector<std::uint8_t> cells(n * m, 0);
    std::vector<std::uint8_t> row(n, 0);
    const bool conjunctive = model.logic == ParentLogic::conjunction;
    for (std::size_t r = 0; r < m; ++r) {
        for (NodeIndex v : order) {
            bool fires;
            if (parents[v].empty()) {
                fires = rng.bernoulli(model.root_marginal[v]);
            } else {
                const auto active = [&](NodeIndex p) { return row[p] == 1; };
                const bool condition = conjunctive ? std::all_of(parents[v].begin(), parents[v].end(), active)
                                                   : std::any_of(parents[v].begin(), parents[v].end(), active);
                fires = condition && rng.bernoulli(model.theta[v]);
            }
            row[v] = fires ? 1 : 0;
            cells[v * m + r] = row[v];
        }
    }
    return BinaryDataset(BinaryDataset::default_names(n), m, std::move(cells));
}

BinaryDataset inject_noise(const BinaryDataset& data, double nu, Rng& rng) {
    return inject_noise(data, nu, nu, rng);
}

BinaryDataset inject_noise(const BinaryDataset& data, double false_positive, double false_negative, Rng& rng) {
    for (double rate : {false_positive, false_negative}) {
        if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidInput("noise rate must lie in [0, 1]");
    }
    std::vector<std::uint8_t> cells = data.cells();
    for (auto& cell : cells) {
        const double u = rng.uniform();
        if (u < (cell ? false_negative : false_positive)) cell ^= 1;
    }
    return BinaryDataset(data.names(), data.samples(), std::move(cells));
}

}  // namespace sbcn
