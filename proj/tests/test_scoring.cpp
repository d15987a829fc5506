#include "oracles.hpp"
#include "sbcn/error.hpp"
#include "sbcn/random.hpp"
#include "sbcn/scoring.hpp"

#include <doctest.h>

#include <cmath>

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
    for (std::size_t c = 0; c < n; ++c) {
        const double p = rng.uniform(0.1, 0.9);
        for (std::size_t r = 0; r < m; ++r) {
            // Correlate with the previous column so parent sets matter.
            cols[c][r] = (c > 0 && rng.bernoulli(0.5)) ? cols[c - 1][r] : rng.bernoulli(p);
        }
    }
    return from_columns(cols);
}

Dag random_dag(Rng& rng, std::size_t n, std::size_t max_parents) {
    std::vector<NodeIndex> order(n);
    for (NodeIndex i = 0; i < n; ++i) order[i] = i;
    shuffle(order, rng);
    std::vector<Arc> arcs;
    for (std::size_t j = 1; j < n; ++j) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < j && k < max_parents; ++i) {
            if (rng.bernoulli(0.35)) {
                arcs.push_back({order[i], order[j]});
                ++k;
            }
        }
    }
    return Dag(n, arcs);
}

constexpr ScoreKind kAllKinds[] = {ScoreKind::loglik, ScoreKind::aic, ScoreKind::bic, ScoreKind::bde, ScoreKind::k2};

}  // namespace

TEST_CASE("local counts tabulate child values per parent configuration") {
    const auto d = from_columns({{1, 1, 1, 0}});
    auto c = local_counts(d, 0, {});
    REQUIRE(c.rows.size() == 1);
    CHECK(c.rows[0] == std::array<std::uint32_t, 2>{1, 3});

    const auto pc = from_columns({{1, 1, 0, 0}, {1, 1, 0, 0}});
    const std::vector<NodeIndex> parent{0};
    c = local_counts(pc, 1, parent);
    REQUIRE(c.rows.size() == 2);
    CHECK(c.rows[0] == std::array<std::uint32_t, 2>{2, 0});
    CHECK(c.rows[1] == std::array<std::uint32_t, 2>{0, 2});

    const auto zeros = from_columns({{0, 0, 0, 0, 0}});
    CHECK(local_counts(zeros, 0, {}).rows[0] == std::array<std::uint32_t, 2>{5, 0});
}

TEST_CASE("local counts enforce the parent cap and index checks") {
    Rng rng(1);
    const auto d = random_dataset(rng, 5, 20);
    const std::vector<NodeIndex> four{0, 1, 2, 3};
    CHECK_THROWS_AS(local_counts(d, 4, four), ParentLimitExceeded);
    CHECK_NOTHROW(local_counts(d, 4, four, 4));
    const std::vector<NodeIndex> self{4};
    CHECK_THROWS_AS(local_counts(d, 4, self), InvalidInput);
    const auto c = local_counts(d, 4, std::vector<NodeIndex>{0, 1, 2});
    CHECK(c.rows.size() == 8);
    std::size_t total = 0;
    for (const auto& row : c.rows) total += row[0] + row[1];
    CHECK(total == 20);
}

TEST_CASE("log-likelihood worked examples") {
    const auto d = from_columns({{1, 1, 1, 0}});
    CHECK(log_likelihood(d, Dag(1)) == doctest::Approx(-2.24934).epsilon(1e-6));
    CHECK(std::abs(log_likelihood(d, Dag(1)) - (3 * std::log(0.75) + std::log(0.25))) < 1e-12);
    CHECK(log_likelihood(from_columns({{1, 1, 1}}), Dag(1)) == 0.0);

    const auto pc = from_columns({{1, 1, 0, 1}, {1, 1, 0, 1}});
    const double parent_only = 3 * std::log(0.75) + std::log(0.25);
    CHECK(std::abs(log_likelihood(pc, Dag(2, {{0, 1}})) - parent_only) < 1e-12);
    CHECK(log_likelihood(pc, Dag(2, {{0, 1}})) >= log_likelihood(pc, Dag(2)));
    CHECK_THROWS_AS(log_likelihood(pc, Dag(3)), InvalidInput);
}

TEST_CASE("log-likelihood matches a row-by-row oracle") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.uniform_int(0, 4);
        const auto d = random_dataset(rng, n, 5 + rng.uniform_int(0, 60));
        const auto g = random_dag(rng, n, 3);
        CHECK(std::abs(log_likelihood(d, g) - oracle::rowwise_loglik(d, g.arcs())) < 1e-9);
        CHECK(log_likelihood(d, g) <= 0.0);
    }
}

TEST_CASE("dimension counts one free parameter per parent configuration") {
    CHECK(dimension(Dag(3)) == 3);
    CHECK(dimension(Dag(2, {{0, 1}})) == 3);
    CHECK(dimension(Dag(4, {{0, 3}, {1, 3}, {2, 3}})) == 1 + 1 + 1 + 8);
}

TEST_CASE("score kinds follow their closed forms") {
    Rng rng(3);
    std::vector<std::vector<std::uint8_t>> cols(2, std::vector<std::uint8_t>(100));
    for (auto& col : cols)
        for (auto& c : col) c = rng.bernoulli(0.4);
    const auto d = from_columns(cols);
    const Dag empty(2);
    const double ll = log_likelihood(d, empty);
    const double bic = score(d, empty, {ScoreKind::bic});
    CHECK(std::abs((ll - bic) - 4.60517) < 1e-5);
    CHECK(std::abs((ll - bic) - std::log(100.0)) < 1e-12);
    CHECK(std::abs(score(d, empty, {ScoreKind::aic}) - (ll - 2.0)) < 1e-12);
    CHECK(std::abs(score(d, empty, {ScoreKind::loglik}) - ll) < 1e-12);

    const auto single = from_columns({{1, 1, 1, 0}});
    CHECK(std::abs(score(single, Dag(1), {ScoreKind::k2}) - std::log(1.0 / 20.0)) < 1e-12);
    CHECK(score(single, Dag(1), {ScoreKind::k2}) == doctest::Approx(-2.99573).epsilon(1e-6));
}

TEST_CASE("Dirichlet scores match explicit Gamma-ratio evaluation") {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.uniform_int(0, 3);
        const auto d = random_dataset(rng, n, 5 + rng.uniform_int(0, 40));
        const auto g = random_dag(rng, n, 3);
        const double alpha = rng.uniform(0.5, 10.0);
        double k2 = 0.0, bde = 0.0;
        for (NodeIndex v = 0; v < n; ++v) {
            const auto ps = oracle::parents_of(g.arcs(), v);
            k2 += oracle::dirichlet_family(d, v, ps, 1.0);
            bde += oracle::dirichlet_family(d, v, ps, alpha / (2.0 * std::pow(2.0, static_cast<double>(ps.size()))));
        }
        CHECK(std::abs(score(d, g, {ScoreKind::k2}) - k2) < 1e-8);
        CHECK(std::abs(score(d, g, {ScoreKind::bde, alpha}) - bde) < 1e-8);
    }
}

TEST_CASE("BDeu with a matching prior reproduces K2 on a parentless node") {
    // K2 puts pseudo-count 1 on each cell; BDeu with alpha = 2 does the same at |parents| = 0.
    Rng rng(6);
    const auto d = random_dataset(rng, 1, 30);
    CHECK(std::abs(score(d, Dag(1), {ScoreKind::bde, 2.0}) - score(d, Dag(1), {ScoreKind::k2})) < 1e-12);
}

TEST_CASE("every score decomposes into local scores exactly") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.uniform_int(0, 5);
        const auto d = random_dataset(rng, n, 30);
        const auto g = random_dag(rng, n, 3);
        for (auto kind : kAllKinds) {
            const ScoreSpec spec{kind, 1.5};
            double sum = 0.0;
            for (NodeIndex v = 0; v < n; ++v) sum += local_score(d, v, g.parents(v), spec);
            CHECK(score(d, g, spec) == sum);
        }
    }
}

TEST_CASE("cache is transparent and bound to its inputs") {
    Rng rng(8);
    const auto d = random_dataset(rng, 5, 40);
    for (auto kind : kAllKinds) {
        const ScoreSpec spec{kind};
        ScoreCache cache(d, spec);
        for (int trial = 0; trial < 30; ++trial) {
            const auto g = random_dag(rng, 5, 3);
            CHECK(score(d, g, spec, &cache) == score(d, g, spec));
            CHECK(score(d, g, spec, &cache) == score(d, g, spec));
        }
        CHECK(cache.hits() > 0);
    }
    ScoreCache cache(d, {ScoreKind::bic});
    CHECK_THROWS_AS(score(d, Dag(5), {ScoreKind::aic}, &cache), InvalidInput);
    const auto other = random_dataset(rng, 5, 40);
    CHECK_THROWS_AS(score(other, Dag(5), {ScoreKind::bic}, &cache), InvalidInput);
}

TEST_CASE("log-likelihood never decreases when an arc is added") {
    Rng rng(9);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.uniform_int(0, 4);
        const auto d = random_dataset(rng, n, 10 + rng.uniform_int(0, 50));
        const auto g = random_dag(rng, n, 2);
        const NodeIndex u = rng.uniform_int(0, n - 1);
        NodeIndex v = rng.uniform_int(0, n - 2);
        if (v >= u) ++v;
        if (g.has_arc(u, v) || g.has_path(v, u) || g.parents(v).size() >= 3) continue;
        auto arcs = g.arcs();
        arcs.push_back({u, v});
        CHECK(log_likelihood(d, Dag(n, arcs)) >= log_likelihood(d, g) - 1e-9);
    }
}

TEST_CASE("penalties are non-negative") {
    Rng rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.uniform_int(0, 30);
        const auto d = random_dataset(rng, 3, m);
        const auto g = random_dag(rng, 3, 2);
        const double ll = log_likelihood(d, g);
        CHECK(ll <= 0.0);
        CHECK(ll - score(d, g, {ScoreKind::aic}) > 0.0);
        const double bic_penalty = ll - score(d, g, {ScoreKind::bic});
        if (m == 1) CHECK(bic_penalty == 0.0);
        else CHECK(bic_penalty > 0.0);
    }
}

TEST_CASE("delta score equals full rescoring") {
    Rng rng(11);
    std::size_t checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto d = random_dataset(rng, 5, 50);
        const auto g = random_dag(rng, 5, 3);
        const ScoreSpec spec{kAllKinds[rng.uniform_int(0, 4)], 2.0};
        ScoreCache cache(d, spec);
        const NodeIndex u = rng.uniform_int(0, 4);
        NodeIndex v = rng.uniform_int(0, 3);
        if (v >= u) ++v;
        Move move{g.has_arc(u, v) ? (rng.bernoulli(0.5) ? MoveKind::remove : MoveKind::reverse) : MoveKind::add, u, v};
        Dag after;
        try {
            after = apply_move(g, move);
        } catch (const InvalidMove&) {
            CHECK_THROWS_AS(delta_score(d, g, move, spec, &cache), InvalidMove);
            continue;
        }
        const double delta = delta_score(d, g, move, spec, &cache);
        CHECK(std::abs(delta - (score(d, after, spec) - score(d, g, spec))) < 1e-9);
        ++checked;
    }
    CHECK(checked > 200);
}

TEST_CASE("delta score of a move and its inverse cancel; reverse is two local changes") {
    Rng rng(12);
    const auto d = random_dataset(rng, 4, 60);
    const Dag g(4, {{0, 1}, {1, 2}});
    const ScoreSpec spec{ScoreKind::bic};
    const double del = delta_score(d, g, {MoveKind::remove, 0, 1}, spec);
    const Dag without = apply_move(g, {MoveKind::remove, 0, 1});
    const double add = delta_score(d, without, {MoveKind::add, 0, 1}, spec);
    CHECK(del + add == 0.0);

    const double rev = delta_score(d, g, {MoveKind::reverse, 1, 2}, spec);
    const double child_change = local_score(d, 2, {}, spec) - local_score(d, 2, std::vector<NodeIndex>{1}, spec);
    const double parent_change =
        local_score(d, 1, std::vector<NodeIndex>{0, 2}, spec) - local_score(d, 1, std::vector<NodeIndex>{0}, spec);
    CHECK(rev == child_change + parent_change);
}

TEST_CASE("illegal moves are rejected") {
    Rng rng(13);
    const auto d = random_dataset(rng, 3, 20);
    const Dag g(3, {{0, 1}, {1, 2}});
    const ScoreSpec spec;
    CHECK_THROWS_AS(delta_score(d, g, {MoveKind::add, 2, 0}, spec), InvalidMove);    // cycle
    CHECK_THROWS_AS(delta_score(d, g, {MoveKind::add, 0, 1}, spec), InvalidMove);    // present
    CHECK_THROWS_AS(delta_score(d, g, {MoveKind::remove, 0, 2}, spec), InvalidMove); // absent
    CHECK_THROWS_AS(delta_score(d, g, {MoveKind::add, 1, 1}, spec), InvalidMove);
    ArcMask mask(3);
    mask.set(0, 1, true);
    mask.set(1, 2, true);
    CHECK_THROWS_AS(delta_score(d, g, {MoveKind::add, 0, 2}, spec, nullptr, &mask), InvalidMove);
    CHECK_THROWS_AS(delta_score(d, g, {MoveKind::reverse, 0, 1}, spec, nullptr, &mask), InvalidMove);
    const Dag chain(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK_THROWS_AS(delta_score(d, chain, {MoveKind::reverse, 0, 2}, spec), InvalidMove);
}

TEST_CASE("score kind names parse") {
    for (auto kind : kAllKinds) CHECK(parse_score_kind(to_string(kind)) == kind);
    CHECK_THROWS_AS(parse_score_kind("mdl"), InvalidInput);
    CHECK_THROWS_AS(ScoreSpec({ScoreKind::bde, 0.0}).validate(), InvalidInput);
}
