#include "sbcn/model.hpp"

#include "sbcn/error.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

namespace sbcn {

BinaryDataset::BinaryDataset(std::vector<std::string> names,
                             const std::vector<std::vector<std::uint8_t>>& rows)
    : names_(std::move(names)), m_(rows.size()) {
    const std::size_t n = names_.size();
    cells_.resize(m_ * n);
    for (std::size_t r = 0; r < m_; ++r) {
        if (rows[r].size() != n) {
            throw InvalidInput("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                               " cells, expected " + std::to_string(n));
        }
        for (std::size_t c = 0; c < n; ++c) cells_[c * m_ + r] = rows[r][c];
    }
    validate();
}

BinaryDataset::BinaryDataset(std::vector<std::string> names, std::size_t samples,
                             std::vector<std::uint8_t> columns)
    : names_(std::move(names)), m_(samples), cells_(std::move(columns)) {
    if (cells_.size() != m_ * names_.size()) throw InvalidInput("cell count does not match m * n");
    validate();
}

void BinaryDataset::validate() const {
    if (m_ == 0) throw InvalidInput("dataset needs at least one sample");
    if (names_.empty()) throw InvalidInput("dataset needs at least one variable");
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
        if (!seen.insert(name).second) throw InvalidInput("duplicate variable name '" + name + "'");
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] > 1) {
            throw InvalidInput("cell at row " + std::to_string(i % m_) + ", column " +
                               std::to_string(i / m_) + " is not 0/1");
        }
    }
}

std::vector<std::string> BinaryDataset::default_names(std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
    return names;
}

namespace {

void check_arc(const Arc& a, std::size_t n) {
    if (a.parent >= n || a.child >= n) {
        throw InvalidGraph("arc " + std::to_string(a.parent) + "->" + std::to_string(a.child) +
                           " out of range for " + std::to_string(n) + " nodes");
    }
    if (a.parent == a.child) throw InvalidGraph("self-loop on node " + std::to_string(a.parent));
}

// Kahn's algorithm; returns fewer than n nodes when a cycle exists.
std::vector<NodeIndex> kahn_order(std::span<const Arc> arcs, std::size_t n) {
    std::vector<std::vector<NodeIndex>> children(n);
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& a : arcs) {
        children[a.parent].push_back(a.child);
        ++indegree[a.child];
    }
    std::priority_queue<NodeIndex, std::vector<NodeIndex>, std::greater<>> ready;
    for (NodeIndex v = 0; v < n; ++v) {
        if (indegree[v] == 0) ready.push(v);
    }
    std::vector<NodeIndex> order;
    order.reserve(n);
    while (!ready.empty()) {
        const NodeIndex v = ready.top();
        ready.pop();
        order.push_back(v);
        for (NodeIndex c : children[v]) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    return order;
}

}  // namespace

bool is_acyclic(std::span<const Arc> arcs, std::size_t n) {
    for (const auto& a : arcs) check_arc(a, n);
    return kahn_order(arcs, n).size() == n;
}

Dag::Dag(std::size_t n, std::vector<Arc> arcs) : n_(n), arcs_(std::move(arcs)) {
    std::sort(arcs_.begin(), arcs_.end());
    if (std::adjacent_find(arcs_.begin(), arcs_.end()) != arcs_.end()) {
        throw InvalidGraph("duplicate arc");
    }
    if (!is_acyclic(arcs_, n_)) throw InvalidGraph("arc set contains a cycle");
}

bool Dag::has_arc(NodeIndex parent, NodeIndex child) const {
    return std::binary_search(arcs_.begin(), arcs_.end(), Arc{parent, child});
}

std::vector<NodeIndex> Dag::parents(NodeIndex child) const {
    std::vector<NodeIndex> out;
    for (const auto& a : arcs_) {
        if (a.child == child) out.push_back(a.parent);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<NodeIndex> Dag::topological_order() const { return kahn_order(arcs_, n_); }

bool Dag::has_path(NodeIndex from, NodeIndex to) const {
    std::vector<std::vector<NodeIndex>> children(n_);
    for (const auto& a : arcs_) children[a.parent].push_back(a.child);
    std::vector<std::uint8_t> seen(n_, 0);
    std::vector<NodeIndex> stack(children[from].begin(), children[from].end());
    while (!stack.empty()) {
        const NodeIndex v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        if (seen[v]) continue;
        seen[v] = 1;
        for (NodeIndex c : children[v]) stack.push_back(c);
    }
    return false;
}

void ArcMask::set(NodeIndex parent, NodeIndex child, bool value) {
    if (parent == child) return;
    allowed_[parent * n_ + child] = value ? 1 : 0;
}

std::size_t ArcMask::count() const {
    return static_cast<std::size_t>(std::count(allowed_.begin(), allowed_.end(), std::uint8_t{1}));
}

bool ArcMask::is_antisymmetric() const {
    for (NodeIndex u = 0; u < n_; ++u) {
        if (allowed(u, u)) return false;
        for (NodeIndex v = u + 1; v < n_; ++v) {
            if (allowed(u, v) && allowed(v, u)) return false;
        }
    }
    return true;
}

std::vector<Arc> ArcMask::arcs() const {
    std::vector<Arc> out;
    for (NodeIndex u = 0; u < n_; ++u) {
        for (NodeIndex v = 0; v < n_; ++v) {
            if (allowed(u, v)) out.push_back({u, v});
        }
    }
    return out;
}

ConfusionCounts structural_hamming_components(const Dag& truth, const Dag& inferred) {
    if (truth.nodes() != inferred.nodes()) {
        throw InvalidComparison("graphs have " + std::to_string(truth.nodes()) + " and " +
                                std::to_string(inferred.nodes()) + " nodes");
    }
    const std::size_t n = truth.nodes();
    ConfusionCounts c;
    for (NodeIndex u = 0; u < n; ++u) {
        for (NodeIndex v = 0; v < n; ++v) {
            if (u == v) continue;
            const bool t = truth.has_arc(u, v);
            const bool i = inferred.has_arc(u, v);
            if (t && i) ++c.tp;
            else if (i) ++c.fp;
            else if (t) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

ConfusionCounts skeleton_components(const Dag& truth, const Dag& inferred) {
    if (truth.nodes() != inferred.nodes()) {
        throw InvalidComparison("graphs have " + std::to_string(truth.nodes()) + " and " +
                                std::to_string(inferred.nodes()) + " nodes");
    }
    const std::size_t n = truth.nodes();
    ConfusionCounts c;
    for (NodeIndex u = 0; u < n; ++u) {
        for (NodeIndex v = u + 1; v < n; ++v) {
            const bool t = truth.has_arc(u, v) || truth.has_arc(v, u);
            const bool i = inferred.has_arc(u, v) || inferred.has_arc(v, u);
            if (t && i) ++c.tp;
            else if (i) ++c.fp;
            else if (t) ++c.fn;
            else ++c.tn;
        }
    }
    return c;
}

}  // namespace sbcn
