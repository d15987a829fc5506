#include "sbcn/suppes.hpp"

#include "sbcn/error.hpp"

#include <cmath>

namespace sbcn {

double MarginalTable::conditional(NodeIndex v, NodeIndex u) const {
    return static_cast<double>(both[u][v]) / static_cast<double>(ones[u]);
}

double MarginalTable::conditional_absent(NodeIndex v, NodeIndex u) const {
    return static_cast<double>(ones[v] - both[u][v]) / static_cast<double>(samples - ones[u]);
}

MarginalTable marginals(const BinaryDataset& data) {
    const std::size_t n = data.variables();
    const std::size_t m = data.samples();
    MarginalTable t;
    t.samples = m;
    t.ones.assign(n, 0);
    t.both.assign(n, std::vector<std::size_t>(n, 0));
    for (NodeIndex u = 0; u < n; ++u) {
        const auto cu = data.column(u);
        for (std::size_t r = 0; r < m; ++r) t.ones[u] += cu[r];
        for (NodeIndex v = u; v < n; ++v) {
            const auto cv = data.column(v);
            std::size_t count = 0;
            for (std::size_t r = 0; r < m; ++r) count += cu[r] & cv[r];
            t.both[u][v] = t.both[v][u] = count;
        }
    }
    const auto md = static_cast<double>(m);
    t.p.resize(n);
    t.joint.assign(n, std::vector<double>(n, 0.0));
    for (NodeIndex u = 0; u < n; ++u) {
        t.p[u] = static_cast<double>(t.ones[u]) / md;
        for (NodeIndex v = 0; v < n; ++v) t.joint[u][v] = static_cast<double>(t.both[u][v]) / md;
    }
    return t;
}

namespace {

void require_nondegenerate(const MarginalTable& t, NodeIndex u, NodeIndex v) {
    for (NodeIndex x : {u, v}) {
        if (x >= t.variables()) throw InvalidInput("node index out of range");
        if (t.degenerate(x)) {
            throw DegenerateVariable("variable " + std::to_string(x) + " has marginal " +
                                     (t.ones[x] == 0 ? "0" : "1"));
        }
    }
}

}  // namespace

bool temporal_priority(const MarginalTable& table, NodeIndex u, NodeIndex v) {
    require_nondegenerate(table, u, v);
    return table.ones[u] > table.ones[v];
}

bool probability_raising(const MarginalTable& table, NodeIndex u, NodeIndex v) {
    require_nondegenerate(table, u, v);
    // both/ones_u > (ones_v - both)/(m - ones_u), cross-multiplied.
    const std::size_t m = table.samples;
    const std::size_t both = table.both[u][v];
    const std::size_t ones_u = table.ones[u];
    const std::size_t ones_v = table.ones[v];
    return both * (m - ones_u) > (ones_v - both) * ones_u;
}

double probability_raising_pvalue(const MarginalTable& table, NodeIndex u, NodeIndex v) {
    require_nondegenerate(table, u, v);
    const auto m = static_cast<double>(table.samples);
    const auto n1 = static_cast<double>(table.ones[u]);
    const double n2 = m - n1;
    const double pooled = static_cast<double>(table.ones[v]) / m;
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
    const double diff = table.conditional(v, u) - table.conditional_absent(v, u);
    if (se == 0.0) return diff > 0.0 ? 0.0 : 1.0;
    const double z = diff / se;
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

ArcMask prima_facie_mask(const BinaryDataset& data, const SuppesOptions& options) {
    const std::size_t n = data.variables();
    const MarginalTable table = marginals(data);
    ArcMask mask(n);
    for (NodeIndex u = 0; u < n; ++u) {
        if (table.degenerate(u)) continue;
        for (NodeIndex v = 0; v < n; ++v) {
            if (u == v || table.degenerate(v)) continue;
            bool admitted = temporal_priority(table, u, v) && probability_raising(table, u, v);
            if (admitted && options.significance) {
                admitted = probability_raising_pvalue(table, u, v) < options.alpha;
            }
            mask.set(u, v, admitted);
        }
    }
    return mask;
}

std::vector<NodeIndex> degenerate_variables(const BinaryDataset& data) {
    std::vector<NodeIndex> out;
    for (NodeIndex v = 0; v < data.variables(); ++v) {
        const auto col = data.column(v);
        std::size_t ones = 0;
        for (auto c : col) ones += c;
        if (ones == 0 || ones == data.samples()) out.push_back(v);
    }
    return out;
}

ArcMask full_mask(std::size_t n) {
    ArcMask mask(n);
    for (NodeIndex u = 0; u < n; ++u) {
        for (NodeIndex v = 0; v < n; ++v) mask.set(u, v, u != v);
    }
    return mask;
}

}  // namespace sbcn
