#pragma once

#include "sbcn/model.hpp"

#include <vector>

namespace sbcn {

/// Empirical marginals and pairwise co-occurrence frequencies.
struct MarginalTable {
    std::size_t samples = 0;
    std::vector<std::size_t> ones;                  // count(v = 1)
    std::vector<std::vector<std::size_t>> both;     // count(u = 1 and v = 1)
    std::vector<double> p;                          // ones / m
    std::vector<std::vector<double>> joint;         // both / m

    std::size_t variables() const { return p.size(); }
    bool degenerate(NodeIndex v) const { return ones[v] == 0 || ones[v] == samples; }
    /// P(v | u) and P(v | not u); require u non-degenerate.
    double conditional(NodeIndex v, NodeIndex u) const;
    double conditional_absent(NodeIndex v, NodeIndex u) const;
};

MarginalTable marginals(const BinaryDataset& data);

/// P(u) > P(v), strict. Throws DegenerateVariable when either marginal is 0 or 1.
bool temporal_priority(const MarginalTable& table, NodeIndex u, NodeIndex v);

/// P(v | u) > P(v | not u), strict, decided on exact integer counts.
/// Throws DegenerateVariable when either marginal is 0 or 1.
bool probability_raising(const MarginalTable& table, NodeIndex u, NodeIndex v);

/// One-sided two-proportion z-test of P(v | u) > P(v | not u); returns the
/// p-value. Requires non-degenerate u and v.
double probability_raising_pvalue(const MarginalTable& table, NodeIndex u, NodeIndex v);

struct SuppesOptions {
    /// When set, probability raising must also be significant at `alpha`.
    bool significance = false;
    double alpha = 0.05;
};

/// Arc set admitted by temporal priority and probability raising. Degenerate
/// variables get no incident arcs.
ArcMask prima_facie_mask(const BinaryDataset& data, const SuppesOptions& options = {});

/// Columns whose marginal is exactly 0 or 1.
std::vector<NodeIndex> degenerate_variables(const BinaryDataset& data);

/// Every off-diagonal arc admitted (the unconstrained baseline).
ArcMask full_mask(std::size_t n);

}  // namespace sbcn
