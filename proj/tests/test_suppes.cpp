#include "sbcn/datagen.hpp"
#include "sbcn/error.hpp"
#include "sbcn/suppes.hpp"

#include <doctest.h>

using namespace sbcn;

namespace {

BinaryDataset from_columns(const std::vector<std::vector<std::uint8_t>>& cols) {
    std::vector<std::vector<std::uint8_t>> rows(cols[0].size(), std::vector<std::uint8_t>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < cols[c].size(); ++r) rows[r][c] = cols[c][r];
    return BinaryDataset(BinaryDataset::default_names(cols.size()), rows);
}

BinaryDataset random_dataset(Rng& rng, std::size_t n, std::size_t m) {
    std::vector<std::vector<std::uint8_t>> cols(n, std::vector<std::uint8_t>(m));
    for (auto& col : cols) {
        const double p = rng.uniform();
        for (auto& c : col) c = rng.bernoulli(p);
    }
    return from_columns(cols);
}

}  // namespace

TEST_CASE("marginals count frequencies") {
    const auto d = from_columns({{1, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}});
    const auto t = marginals(d);
    CHECK(t.p[0] == 0.5);
    CHECK(t.p[2] == 0.0);
    CHECK(t.joint[0][1] == 0.25);
    CHECK(t.joint[1][0] == 0.25);
    CHECK(t.conditional(1, 0) == 0.5);
    CHECK(t.conditional_absent(1, 0) == 0.0);
}

TEST_CASE("temporal priority is strict and rejects degenerate marginals") {
    const auto d = from_columns({{1, 1, 0, 0}, {1, 0, 0, 0}, {1, 1, 1, 1}, {0, 1, 1, 0}});
    const auto t = marginals(d);
    CHECK(temporal_priority(t, 0, 1));
    CHECK_FALSE(temporal_priority(t, 1, 0));
    CHECK_FALSE(temporal_priority(t, 0, 3));  // tie: 0.5 vs 0.5
    CHECK_FALSE(temporal_priority(t, 3, 0));
    CHECK_THROWS_AS(temporal_priority(t, 2, 0), DegenerateVariable);
    CHECK_THROWS_AS(probability_raising(t, 0, 2), DegenerateVariable);
}

TEST_CASE("probability raising worked examples") {
    const auto d = from_columns({{1, 1, 0, 0}, {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}});
    const auto t = marginals(d);
    CHECK(probability_raising(t, 0, 1));   // 0.5 > 0
    CHECK(probability_raising(t, 0, 2));   // identical columns: 1 > 0
    CHECK_FALSE(probability_raising(t, 0, 3));  // 0.5 == 0.5
}

TEST_CASE("mask for a sampled two-node chain orients cause before effect") {
    GenerativeModel model;
    model.kind = TopologyKind::tree;
    model.dag = Dag(2, {{0, 1}});
    model.level = {1, 2};
    model.root_marginal = {0.8, 0.0};
    model.theta = {0.0, 0.5};
    Rng rng(42);
    const auto data = sample_dataset(model, 1000, rng);
    const auto t = marginals(data);
    REQUIRE(t.p[0] > t.p[1]);
    const auto mask = prima_facie_mask(data);
    CHECK(mask.allowed(0, 1));
    CHECK_FALSE(mask.allowed(1, 0));
}

TEST_CASE("degenerate and trivial datasets give empty masks") {
    CHECK(prima_facie_mask(from_columns({{0, 0, 0}, {1, 1, 1}, {0, 0, 0}})).count() == 0);
    CHECK(prima_facie_mask(from_columns({{0, 1, 1}})).count() == 0);
    const auto d = from_columns({{1, 1, 0, 0}, {1, 0, 0, 0}, {1, 1, 1, 1}});
    const auto mask = prima_facie_mask(d);
    CHECK(mask.allowed(0, 1));
    CHECK_FALSE(mask.allowed(2, 0));
    CHECK_FALSE(mask.allowed(0, 2));
    CHECK(degenerate_variables(d) == std::vector<NodeIndex>{2});
}

TEST_CASE("full mask admits every off-diagonal arc") {
    CHECK(full_mask(1).count() == 0);
    const auto two = full_mask(2);
    CHECK(two.allowed(0, 1));
    CHECK(two.allowed(1, 0));
    CHECK(full_mask(3).count() == 6);
}

TEST_CASE("mask entries match a brute-force recount on small datasets") {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(0, 2);
        const std::size_t m = 1 + rng.uniform_int(0, 30);
        const auto d = random_dataset(rng, n, m);
        const auto mask = prima_facie_mask(d);
        for (NodeIndex u = 0; u < n; ++u) {
            for (NodeIndex v = 0; v < n; ++v) {
                if (u == v) continue;
                double cu = 0, cv = 0, cuv = 0;
                for (std::size_t r = 0; r < m; ++r) {
                    cu += d.at(r, u);
                    cv += d.at(r, v);
                    cuv += d.at(r, u) & d.at(r, v);
                }
                const double pu = cu / m, pv = cv / m;
                bool expected = false;
                if (pu > 0 && pu < 1 && pv > 0 && pv < 1) {
                    const double given = cuv / cu;
                    const double given_not = (cv - cuv) / (m - cu);
                    expected = pu > pv && given > given_not;
                }
                CHECK(mask.allowed(u, v) == expected);
            }
        }
    }
}

TEST_CASE("mask antisymmetry and size bound on random datasets") {
    Rng rng(9);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.uniform_int(0, 7);
        const auto mask = prima_facie_mask(random_dataset(rng, n, 1 + rng.uniform_int(0, 60)));
        CHECK(mask.is_antisymmetric());
        CHECK(mask.count() <= n * (n - 1) / 2);
    }
}

TEST_CASE("permuting columns permutes the mask") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(0, 4);
        const auto d = random_dataset(rng, n, 40);
        std::vector<NodeIndex> perm(n);
        for (NodeIndex i = 0; i < n; ++i) perm[i] = i;
        shuffle(perm, rng);
        std::vector<std::vector<std::uint8_t>> cols(n);
        for (NodeIndex i = 0; i < n; ++i) {
            const auto src = d.column(perm[i]);
            cols[i].assign(src.begin(), src.end());
        }
        const auto base = prima_facie_mask(d);
        const auto permuted = prima_facie_mask(from_columns(cols));
        for (NodeIndex i = 0; i < n; ++i)
            for (NodeIndex j = 0; j < n; ++j) CHECK(permuted.allowed(i, j) == base.allowed(perm[i], perm[j]));
    }
}

TEST_CASE("significance mode only removes arcs") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = random_dataset(rng, 5, 50);
        const auto plain = prima_facie_mask(d);
        const auto strict = prima_facie_mask(d, {true, 0.05});
        for (const auto& a : strict.arcs()) CHECK(plain.allowed(a.parent, a.child));
    }
    // v only ever occurs with u; z is about 5.2 over 80 samples.
    std::vector<std::uint8_t> u(80), v(80);
    for (std::size_t r = 0; r < 80; ++r) {
        u[r] = r < 40;
        v[r] = r < 20;
    }
    const auto d = from_columns({u, v});
    CHECK(probability_raising_pvalue(marginals(d), 0, 1) < 1e-4);
    CHECK(prima_facie_mask(d, {true, 0.01}).allowed(0, 1));
}
