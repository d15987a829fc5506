#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sbcn {

using NodeIndex = std::size_t;

/// m x n matrix of 0/1 observations with one name per column.
///
/// Cells are stored column-major so that per-variable scans (marginals,
/// contingency counts) walk contiguous memory. Immutable after construction.
class BinaryDataset {
public:
    /// Builds a dataset from row-major rows. Throws InvalidInput when a row has
    /// the wrong width, a cell is not 0/1, names repeat, or m or n is zero.
    BinaryDataset(std::vector<std::string> names, const std::vector<std::vector<std::uint8_t>>& rows);

    /// Builds a dataset from column-major cells of size m * n.
    BinaryDataset(std::vector<std::string> names, std::size_t samples, std::vector<std::uint8_t> columns);

    std::size_t samples() const { return m_; }
    std::size_t variables() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    std::uint8_t at(std::size_t row, NodeIndex column) const { return cells_[column * m_ + row]; }
    std::span<const std::uint8_t> column(NodeIndex column) const {
        return {cells_.data() + column * m_, m_};
    }
    const std::vector<std::uint8_t>& cells() const { return cells_; }

    /// Default column names v0 .. v{n-1}.
    static std::vector<std::string> default_names(std::size_t n);

    friend bool operator==(const BinaryDataset&, const BinaryDataset&) = default;

private:
    void validate() const;

    std::vector<std::string> names_;
    std::size_t m_ = 0;
    std::vector<std::uint8_t> cells_;
};

struct Arc {
    NodeIndex parent = 0;
    NodeIndex child = 0;

    friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// True iff the arc relation admits a topological order. Throws InvalidGraph
/// on out-of-range indices or self-loops.
bool is_acyclic(std::span<const Arc> arcs, std::size_t n);

/// Directed acyclic graph over nodes 0..n-1 with arcs kept sorted.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::size_t n) : n_(n) {}
    /// Throws InvalidGraph on self-loops, duplicates, bad indices, or cycles.
    Dag(std::size_t n, std::vector<Arc> arcs);

    std::size_t nodes() const { return n_; }
    const std::vector<Arc>& arcs() const { return arcs_; }
    std::size_t arc_count() const { return arcs_.size(); }
    bool has_arc(NodeIndex parent, NodeIndex child) const;

    /// Sorted parent set of `child`.
    std::vector<NodeIndex> parents(NodeIndex child) const;

    /// Nodes in an order where each parent precedes its children.
    std::vector<NodeIndex> topological_order() const;

    /// True iff a directed path from `from` to `to` exists (length >= 1).
    bool has_path(NodeIndex from, NodeIndex to) const;

    friend bool operator==(const Dag&, const Dag&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Arc> arcs_;
};

/// n x n table of admissible arcs; allowed(u, v) admits u -> v.
class ArcMask {
public:
    ArcMask() = default;
    explicit ArcMask(std::size_t n) : n_(n), allowed_(n * n, 0) {}

    std::size_t nodes() const { return n_; }
    bool allowed(NodeIndex parent, NodeIndex child) const { return allowed_[parent * n_ + child] != 0; }
    /// Diagonal entries are ignored.
    void set(NodeIndex parent, NodeIndex child, bool value);

    std::size_t count() const;
    /// At most one orientation admitted per pair.
    bool is_antisymmetric() const;
    std::vector<Arc> arcs() const;

    friend bool operator==(const ArcMask&, const ArcMask&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> allowed_;
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Directed comparison over all n(n-1) ordered pairs. Throws
/// InvalidComparison when node counts differ.
ConfusionCounts structural_hamming_components(const Dag& truth, const Dag& inferred);

/// Undirected comparison over the n(n-1)/2 unordered pairs (skeletons).
ConfusionCounts skeleton_components(const Dag& truth, const Dag& inferred);

}  // namespace sbcn
