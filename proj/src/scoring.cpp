#include "sbcn/scoring.hpp"

#include "sbcn/error.hpp"

#include <algorithm>
#include <cmath>

namespace sbcn {

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::loglik: return "loglik";
        case ScoreKind::aic: return "aic";
        case ScoreKind::bic: return "bic";
        case ScoreKind::bde: return "bde";
        case ScoreKind::k2: return "k2";
    }
    return "?";
}

ScoreKind parse_score_kind(std::string_view name) {
    for (auto k : {ScoreKind::loglik, ScoreKind::aic, ScoreKind::bic, ScoreKind::bde, ScoreKind::k2}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidInput("unknown score kind '" + std::string(name) + "'");
}

void ScoreSpec::validate() const {
    if (!(equivalent_sample_size > 0.0)) throw InvalidInput("equivalent sample size must be positive");
}

LocalCounts local_counts(const BinaryDataset& data, NodeIndex child, std::span<const NodeIndex> parents,
                         std::size_t max_parents) {
    if (parents.size() > max_parents) {
        throw ParentLimitExceeded("node " + std::to_string(child) + " has " + std::to_string(parents.size()) +
                                  " parents, limit is " + std::to_string(max_parents));
    }
    const std::size_t n = data.variables();
    if (child >= n) throw InvalidInput("child index out of range");
    for (NodeIndex p : parents) {
        if (p >= n) throw InvalidInput("parent index out of range");
        if (p == child) throw InvalidInput("node cannot be its own parent");
    }

    LocalCounts out;
    out.parents.assign(parents.begin(), parents.end());
    out.rows.assign(std::size_t{1} << parents.size(), {0, 0});
    const std::size_t m = data.samples();
    const auto child_col = data.column(child);
    std::vector<std::size_t> config(m, 0);
    for (std::size_t j = 0; j < parents.size(); ++j) {
        const auto col = data.column(parents[j]);
        for (std::size_t r = 0; r < m; ++r) config[r] |= std::size_t{col[r]} << j;
    }
    for (std::size_t r = 0; r < m; ++r) ++out.rows[config[r]][child_col[r]];
    return out;
}

namespace {

double family_loglik(const LocalCounts& counts) {
    double ll = 0.0;
    for (const auto& row : counts.rows) {
        const double total = static_cast<double>(row[0]) + static_cast<double>(row[1]);
        for (auto c : row) {
            if (c > 0) ll += c * std::log(c / total);
        }
    }
    return ll;
}

// Dirichlet marginal likelihood with `cell_prior` pseudo-counts per
// (configuration, value) cell.
double family_dirichlet(const LocalCounts& counts, double cell_prior) {
    const double config_prior = 2.0 * cell_prior;
    const double lg_config = std::lgamma(config_prior);
    const double lg_cell = std::lgamma(cell_prior);
    double s = 0.0;
    for (const auto& row : counts.rows) {
        const double total = static_cast<double>(row[0]) + static_cast<double>(row[1]);
        s += lg_config - std::lgamma(config_prior + total);
        for (auto c : row) s += std::lgamma(cell_prior + c) - lg_cell;
    }
    return s;
}

}  // namespace

double local_score(const BinaryDataset& data, NodeIndex child, std::span<const NodeIndex> parents,
                   const ScoreSpec& spec) {
    spec.validate();
    const LocalCounts counts = local_counts(data, child, parents, spec.max_parents);
    const auto params = static_cast<double>(counts.rows.size());
    switch (spec.kind) {
        case ScoreKind::loglik: return family_loglik(counts);
        case ScoreKind::aic: return family_loglik(counts) - params;
        case ScoreKind::bic:
            return family_loglik(counts) - 0.5 * std::log(static_cast<double>(data.samples())) * params;
        case ScoreKind::bde: return family_dirichlet(counts, spec.equivalent_sample_size / (2.0 * params));
        case ScoreKind::k2: return family_dirichlet(counts, 1.0);
    }
    return 0.0;
}

ScoreCache::ScoreCache(const BinaryDataset& data, ScoreSpec spec) : data_(&data), spec_(spec) { spec_.validate(); }

std::size_t ScoreCache::KeyHash::operator()(const Key& k) const noexcept {
    std::size_t h = k.child * 0x9e3779b97f4a7c15ULL;
    for (NodeIndex p : k.parents) h = (h ^ (p + 0x7f4a7c15ULL)) * 0x100000001b3ULL;
    return h;
}

double ScoreCache::local(NodeIndex child, std::span<const NodeIndex> parents) {
    Key key{child, std::vector<NodeIndex>(parents.begin(), parents.end())};
    if (auto it = table_.find(key); it != table_.end()) {
        ++hits_;
        return it->second;
    }
    ++misses_;
    const double value = local_score(*data_, child, parents, spec_);
    table_.emplace(std::move(key), value);
    return value;
}

namespace {

void check_sizes(const BinaryDataset& data, const Dag& g) {
    if (g.nodes() != data.variables()) {
        throw InvalidInput("graph has " + std::to_string(g.nodes()) + " nodes, dataset has " +
                           std::to_string(data.variables()) + " variables");
    }
}

void check_cache(const BinaryDataset& data, const ScoreSpec& spec, const ScoreCache* cache) {
    if (cache == nullptr) return;
    const auto& cs = cache->spec();
    if (&cache->data() != &data || cs.kind != spec.kind || cs.equivalent_sample_size != spec.equivalent_sample_size ||
        cs.max_parents != spec.max_parents) {
        throw InvalidInput("score cache is bound to a different dataset or score spec");
    }
}

double family(const BinaryDataset& data, NodeIndex child, std::span<const NodeIndex> parents, const ScoreSpec& spec,
              ScoreCache* cache) {
    return cache ? cache->local(child, parents) : local_score(data, child, parents, spec);
}

}  // namespace

double log_likelihood(const BinaryDataset& data, const Dag& g) {
    check_sizes(data, g);
    double ll = 0.0;
    for (NodeIndex v = 0; v < g.nodes(); ++v) {
        const auto parents = g.parents(v);
        ll += family_loglik(local_counts(data, v, parents, parents.size()));
    }
    return ll;
}

std::size_t dimension(const Dag& g) {
    std::vector<std::size_t> indegree(g.nodes(), 0);
    for (const auto& a : g.arcs()) ++indegree[a.child];
    std::size_t d = 0;
    for (auto k : indegree) d += std::size_t{1} << k;
    return d;
}

double score(const BinaryDataset& data, const Dag& g, const ScoreSpec& spec, ScoreCache* cache) {
    check_sizes(data, g);
    check_cache(data, spec, cache);
    double total = 0.0;
    for (NodeIndex v = 0; v < g.nodes(); ++v) total += family(data, v, g.parents(v), spec, cache);
    return total;
}

std::string_view to_string(MoveKind kind) {
    switch (kind) {
        case MoveKind::add: return "add";
        case MoveKind::remove: return "remove";
        case MoveKind::reverse: return "reverse";
    }
    return "?";
}

Dag apply_move(const Dag& g, const Move& move, const ArcMask* mask, std::size_t max_parents) {
    const std::size_t n = g.nodes();
    const auto describe = [&] {
        return std::string(to_string(move.kind)) + " " + std::to_string(move.parent) + "->" +
               std::to_string(move.child);
    };
    if (move.parent >= n || move.child >= n || move.parent == move.child) {
        throw InvalidMove(describe() + ": bad node indices");
    }
    std::vector<Arc> arcs = g.arcs();
    const Arc arc{move.parent, move.child};
    const bool present = g.has_arc(move.parent, move.child);
    switch (move.kind) {
        case MoveKind::add:
            if (present) throw InvalidMove(describe() + ": arc already present");
            if (mask && !mask->allowed(move.parent, move.child)) throw InvalidMove(describe() + ": not in mask");
            if (g.parents(move.child).size() >= max_parents) throw InvalidMove(describe() + ": parent cap");
            if (g.has_path(move.child, move.parent)) throw InvalidMove(describe() + ": creates a cycle");
            arcs.push_back(arc);
            break;
        case MoveKind::remove:
            if (!present) throw InvalidMove(describe() + ": arc not present");
            arcs.erase(std::find(arcs.begin(), arcs.end(), arc));
            break;
        case MoveKind::reverse: {
            if (!present) throw InvalidMove(describe() + ": arc not present");
            if (mask && !mask->allowed(move.child, move.parent)) throw InvalidMove(describe() + ": not in mask");
            if (g.parents(move.parent).size() >= max_parents) throw InvalidMove(describe() + ": parent cap");
            arcs.erase(std::find(arcs.begin(), arcs.end(), arc));
            arcs.push_back({move.child, move.parent});
            if (!is_acyclic(arcs, n)) throw InvalidMove(describe() + ": creates a cycle");
            break;
        }
    }
    return Dag(n, std::move(arcs));
}

double delta_score(const BinaryDataset& data, const Dag& g, const Move& move, const ScoreSpec& spec,
                   ScoreCache* cache, const ArcMask* mask) {
    check_sizes(data, g);
    check_cache(data, spec, cache);
    const Dag after = apply_move(g, move, mask, spec.max_parents);
    const auto change = [&](NodeIndex v) {
        return family(data, v, after.parents(v), spec, cache) - family(data, v, g.parents(v), spec, cache);
    };
    double delta = change(move.child);
    if (move.kind == MoveKind::reverse) delta += change(move.parent);
    return delta;
}

}  // namespace sbcn
