#include "sbcn/search.hpp"

#include "sbcn/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

namespace sbcn {

std::string_view to_string(SearchStrategy strategy) {
    switch (strategy) {
        case SearchStrategy::hc: return "hc";
        case SearchStrategy::tabu: return "tabu";
        case SearchStrategy::ga: return "ga";
    }
    return "?";
}

SearchStrategy parse_search_strategy(std::string_view name) {
    for (auto s : {SearchStrategy::hc, SearchStrategy::tabu, SearchStrategy::ga}) {
        if (to_string(s) == name) return s;
    }
    throw InvalidInput("unknown search strategy '" + std::string(name) + "'");
}

void SearchSpec::validate() const {
    if (ga_population < 2 || ga_population % 2 != 0) {
        throw InvalidInput("GA population must be even and at least 2");
    }
    if (!(ga_mutation_rate >= 0.0 && ga_mutation_rate <= 1.0)) {
        throw InvalidInput("GA mutation rate must lie in [0, 1]");
    }
}

namespace {

constexpr std::size_t kMaxLocalIterations = 100000;

// Mutable graph with per-node parent sets and cached family scores, used by
// the local searches.
class WorkingGraph {
public:
    WorkingGraph(std::size_t n, ScoreCache& cache) : n_(n), parents_(n), adj_(n * n, 0), local_(n, 0.0), cache_(&cache) {
        for (NodeIndex v = 0; v < n_; ++v) local_[v] = cache_->local(v, parents_[v]);
    }

    WorkingGraph(const Dag& g, ScoreCache& cache) : WorkingGraph(g.nodes(), cache) {
        for (const auto& a : g.arcs()) {
            parents_[a.child].push_back(a.parent);
            adj_[a.parent * n_ + a.child] = 1;
        }
        for (NodeIndex v = 0; v < n_; ++v) local_[v] = cache_->local(v, parents_[v]);
    }

    std::size_t nodes() const { return n_; }
    bool has_arc(NodeIndex u, NodeIndex v) const { return adj_[u * n_ + v] != 0; }
    const std::vector<NodeIndex>& parents(NodeIndex v) const { return parents_[v]; }

    // Directed path from -> to, optionally ignoring the single arc skip_u -> skip_v.
    bool has_path(NodeIndex from, NodeIndex to, NodeIndex skip_u = SIZE_MAX, NodeIndex skip_v = SIZE_MAX) const {
        std::vector<std::uint8_t> seen(n_, 0);
        std::vector<NodeIndex> stack{from};
        seen[from] = 1;
        while (!stack.empty()) {
            const NodeIndex x = stack.back();
            stack.pop_back();
            for (NodeIndex y = 0; y < n_; ++y) {
                if (!adj_[x * n_ + y] || (x == skip_u && y == skip_v)) continue;
                if (y == to) return true;
                if (!seen[y]) {
                    seen[y] = 1;
                    stack.push_back(y);
                }
            }
        }
        return false;
    }

    double local_with(NodeIndex v, NodeIndex extra) const {
        auto ps = parents_[v];
        ps.insert(std::upper_bound(ps.begin(), ps.end(), extra), extra);
        return cache_->local(v, ps);
    }

    double local_without(NodeIndex v, NodeIndex drop) const {
        auto ps = parents_[v];
        ps.erase(std::find(ps.begin(), ps.end(), drop));
        return cache_->local(v, ps);
    }

    double local(NodeIndex v) const { return local_[v]; }

    double total() const { return std::accumulate(local_.begin(), local_.end(), 0.0); }

    std::vector<ScoredMove> moves(const ArcMask& mask, std::size_t max_parents) const {
        std::vector<ScoredMove> out;
        for (NodeIndex v = 0; v < n_; ++v) {
            for (NodeIndex u = 0; u < n_; ++u) {
                if (u == v) continue;
                if (has_arc(u, v)) {
                    const double removed = local_without(v, u) - local_[v];
                    out.push_back({{MoveKind::remove, u, v}, removed});
                    if (mask.allowed(v, u) && parents_[u].size() < max_parents && !has_path(u, v, u, v)) {
                        out.push_back({{MoveKind::reverse, u, v}, removed + (local_with(u, v) - local_[u])});
                    }
                } else if (mask.allowed(u, v) && parents_[v].size() < max_parents && !has_path(v, u)) {
                    out.push_back({{MoveKind::add, u, v}, local_with(v, u) - local_[v]});
                }
            }
        }
        return out;
    }

    void apply(const Move& m) {
        const auto add = [&](NodeIndex u, NodeIndex v) {
            auto& ps = parents_[v];
            ps.insert(std::upper_bound(ps.begin(), ps.end(), u), u);
            adj_[u * n_ + v] = 1;
            local_[v] = cache_->local(v, ps);
        };
        const auto drop = [&](NodeIndex u, NodeIndex v) {
            auto& ps = parents_[v];
            ps.erase(std::find(ps.begin(), ps.end(), u));
            adj_[u * n_ + v] = 0;
            local_[v] = cache_->local(v, ps);
        };
        switch (m.kind) {
            case MoveKind::add: add(m.parent, m.child); break;
            case MoveKind::remove: drop(m.parent, m.child); break;
            case MoveKind::reverse:
                drop(m.parent, m.child);
                add(m.child, m.parent);
                break;
        }
    }

    Dag to_dag() const {
        std::vector<Arc> arcs;
        for (NodeIndex v = 0; v < n_; ++v) {
            for (NodeIndex u : parents_[v]) arcs.push_back({u, v});
        }
        return Dag(n_, std::move(arcs));
    }

private:
    std::size_t n_;
    std::vector<std::vector<NodeIndex>> parents_;
    std::vector<std::uint8_t> adj_;
    std::vector<double> local_;
    ScoreCache* cache_;
};

ScoreSpec with_cap(ScoreSpec spec, const SearchSpec& search) {
    spec.max_parents = std::max(spec.max_parents, search.max_parents);
    return spec;
}

void check_inputs(const BinaryDataset& data, const ArcMask& mask) {
    if (mask.nodes() != data.variables()) throw InvalidInput("mask and dataset disagree on node count");
}

Move inverse(const Move& m) {
    switch (m.kind) {
        case MoveKind::add: return {MoveKind::remove, m.parent, m.child};
        case MoveKind::remove: return {MoveKind::add, m.parent, m.child};
        case MoveKind::reverse: return {MoveKind::reverse, m.child, m.parent};
    }
    return m;
}

SearchResult finish(const BinaryDataset& data, Dag dag, ScoreCache& cache, std::size_t iterations) {
    SearchResult r;
    r.score = score(data, dag, cache.spec(), &cache);
    r.dag = std::move(dag);
    r.iterations = iterations;
    return r;
}

}  // namespace

std::vector<ScoredMove> legal_moves(const Dag& g, const ArcMask& mask, std::size_t max_parents, ScoreCache& cache) {
    if (mask.nodes() != g.nodes()) throw InvalidInput("mask and graph disagree on node count");
    return WorkingGraph(g, cache).moves(mask, max_parents);
}

SearchResult hill_climb(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                        const SearchSpec& search) {
    check_inputs(data, mask);
    ScoreCache cache(data, with_cap(spec, search));
    WorkingGraph g(data.variables(), cache);
    std::size_t iterations = 0;
    while (iterations < kMaxLocalIterations) {
        const auto moves = g.moves(mask, search.max_parents);
        const ScoredMove* best = nullptr;
        for (const auto& m : moves) {
            if (m.delta > 0.0 && (best == nullptr || m.delta > best->delta)) best = &m;
        }
        if (best == nullptr) break;
        g.apply(best->move);
        ++iterations;
    }
    return finish(data, g.to_dag(), cache, iterations);
}

SearchResult tabu_search(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                         const SearchSpec& search) {
    check_inputs(data, mask);
    ScoreCache cache(data, with_cap(spec, search));
    WorkingGraph g(data.variables(), cache);
    double current = g.total();
    double best_score = current;
    bool at_best = true;
    Dag best = g.to_dag();
    std::deque<Move> tabu;
    std::size_t stale = 0;
    std::size_t iterations = 0;
    // Compared on the delta while sitting on the best graph, so that rounding
    // in current + delta cannot hide a positive move.
    const auto beats_best = [&](double delta) { return at_best ? delta > 0.0 : current + delta > best_score; };
    while (iterations < kMaxLocalIterations) {
        const auto moves = g.moves(mask, search.max_parents);
        const ScoredMove* chosen = nullptr;
        for (const auto& m : moves) {
            const bool is_tabu = std::find(tabu.begin(), tabu.end(), m.move) != tabu.end();
            if (is_tabu && !beats_best(m.delta)) continue;
            if (chosen == nullptr || m.delta > chosen->delta) chosen = &m;
        }
        if (chosen == nullptr) break;
        const bool improves = beats_best(chosen->delta);
        if (improves) {
            stale = 0;
        } else if (++stale > search.tabu_max_iterations) {
            break;
        }
        g.apply(chosen->move);
        ++iterations;
        current = g.total();
        if (search.tabu_tenure > 0) {
            tabu.push_back(inverse(chosen->move));
            while (tabu.size() > search.tabu_tenure) tabu.pop_front();
        }
        at_best = improves;
        if (improves) {
            best_score = current;
            best = g.to_dag();
        }
    }
    return finish(data, std::move(best), cache, iterations);
}

std::size_t genome_index(NodeIndex parent, NodeIndex child, std::size_t n) {
    return parent * (n - 1) + (child < parent ? child : child - 1);
}

Genome encode_genome(const Dag& g) {
    const std::size_t n = g.nodes();
    Genome genome(n * (n > 0 ? n - 1 : 0), 0);
    for (const auto& a : g.arcs()) genome[genome_index(a.parent, a.child, n)] = 1;
    return genome;
}

std::vector<Arc> genome_arcs(const Genome& genome, std::size_t n) {
    if (genome.size() != n * (n > 0 ? n - 1 : 0)) throw InvalidInput("genome length must be n(n-1)");
    std::vector<Arc> arcs;
    for (NodeIndex u = 0; u < n; ++u) {
        for (NodeIndex v = 0; v < n; ++v) {
            if (u != v && genome[genome_index(u, v, n)]) arcs.push_back({u, v});
        }
    }
    return arcs;
}

Dag decode_genome(const Genome& genome, std::size_t n) { return Dag(n, genome_arcs(genome, n)); }

namespace {

// Arcs of some directed cycle, or empty when the genome is acyclic.
std::vector<Arc> find_cycle(const Genome& genome, std::size_t n) {
    std::vector<std::uint8_t> color(n, 0);  // 0 white, 1 on stack, 2 done
    std::vector<NodeIndex> stack;
    std::vector<Arc> cycle;
    std::function<bool(NodeIndex)> visit = [&](NodeIndex u) {
        color[u] = 1;
        stack.push_back(u);
        for (NodeIndex v = 0; v < n; ++v) {
            if (v == u || !genome[genome_index(u, v, n)]) continue;
            if (color[v] == 1) {
                const auto start = std::find(stack.begin(), stack.end(), v);
                for (auto it = start; it + 1 != stack.end(); ++it) cycle.push_back({*it, *(it + 1)});
                cycle.push_back({u, v});
                return true;
            }
            if (color[v] == 0 && visit(v)) return true;
        }
        stack.pop_back();
        color[u] = 2;
        return false;
    };
    for (NodeIndex s = 0; s < n; ++s) {
        if (color[s] == 0 && visit(s)) break;
    }
    return cycle;
}

}  // namespace

Genome repair(Genome genome, std::size_t n, const ArcMask& mask, std::size_t max_parents, Rng& rng) {
    if (genome.size() != n * (n > 0 ? n - 1 : 0)) throw InvalidInput("genome length must be n(n-1)");
    if (mask.nodes() != n) throw InvalidInput("mask and genome disagree on node count");
    for (NodeIndex u = 0; u < n; ++u) {
        for (NodeIndex v = 0; v < n; ++v) {
            if (u != v && !mask.allowed(u, v)) genome[genome_index(u, v, n)] = 0;
        }
    }
    for (auto cycle = find_cycle(genome, n); !cycle.empty(); cycle = find_cycle(genome, n)) {
        const auto& a = cycle[rng.uniform_int(0, cycle.size() - 1)];
        genome[genome_index(a.parent, a.child, n)] = 0;
    }
    for (NodeIndex v = 0; v < n; ++v) {
        std::vector<NodeIndex> ps;
        for (NodeIndex u = 0; u < n; ++u) {
            if (u != v && genome[genome_index(u, v, n)]) ps.push_back(u);
        }
        while (ps.size() > max_parents) {
            const auto k = static_cast<std::size_t>(rng.uniform_int(0, ps.size() - 1));
            genome[genome_index(ps[k], v, n)] = 0;
            ps.erase(ps.begin() + static_cast<std::ptrdiff_t>(k));
        }
    }
    return genome;
}

SearchResult ga_search(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                       const SearchSpec& search, std::vector<Genome> initial_population) {
    check_inputs(data, mask);
    search.validate();
    const std::size_t n = data.variables();
    const std::size_t length = n * (n - 1);
    ScoreCache cache(data, with_cap(spec, search));
    Rng rng = Rng::substream(search.rng_seed, "ga");

    const auto fitness_of = [&](const Genome& genome) {
        double total = 0.0;
        std::vector<std::vector<NodeIndex>> ps(n);
        for (const auto& a : genome_arcs(genome, n)) ps[a.child].push_back(a.parent);
        for (NodeIndex v = 0; v < n; ++v) total += cache.local(v, ps[v]);
        return total;
    };

    std::vector<Genome> population = std::move(initial_population);
    if (population.empty()) {
        const double density = n > 1 ? std::min(1.0, 2.0 / static_cast<double>(n)) : 0.0;
        population.resize(search.ga_population);
        for (auto& genome : population) {
            genome.assign(length, 0);
            for (auto& bit : genome) bit = rng.bernoulli(density) ? 1 : 0;
            genome = repair(std::move(genome), n, mask, search.max_parents, rng);
        }
    } else {
        if (population.size() < 2 || population.size() % 2 != 0) {
            throw InvalidInput("GA population must be even and at least 2");
        }
        for (auto& genome : population) genome = repair(std::move(genome), n, mask, search.max_parents, rng);
    }
    const std::size_t q = population.size();

    std::vector<double> fitness(q);
    for (std::size_t i = 0; i < q; ++i) fitness[i] = fitness_of(population[i]);

    const auto best_index = [&] {
        std::size_t b = 0;
        for (std::size_t i = 1; i < q; ++i) {
            if (fitness[i] > fitness[b]) b = i;
        }
        return b;
    };

    SearchResult result;
    result.best_history.push_back(fitness[best_index()]);

    std::vector<std::size_t> order(q);
    std::vector<Genome> offspring(q);
    std::vector<double> offspring_fitness(q);
    for (std::size_t gen = 0; gen < search.ga_generations; ++gen) {
        // Rank selection: the i-th worst individual (1-based) has weight i.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
        const std::uint64_t total_weight = q * (q + 1) / 2;
        const auto select = [&]() -> const Genome& {
            std::uint64_t ticket = rng.uniform_int(1, total_weight);
            std::size_t rank = 1;
            while (ticket > rank) ticket -= rank++;
            return population[order[rank - 1]];
        };

        for (std::size_t i = 0; i < q; i += 2) {
            const Genome& a = select();
            const Genome& b = select();
            offspring[i] = a;
            offspring[i + 1] = b;
            if (length >= 2) {
                const auto cut = static_cast<std::size_t>(rng.uniform_int(1, length - 1));
                std::copy(b.begin() + static_cast<std::ptrdiff_t>(cut), b.end(),
                          offspring[i].begin() + static_cast<std::ptrdiff_t>(cut));
                std::copy(a.begin() + static_cast<std::ptrdiff_t>(cut), a.end(),
                          offspring[i + 1].begin() + static_cast<std::ptrdiff_t>(cut));
            }
        }
        for (auto& genome : offspring) {
            for (auto& bit : genome) {
                if (rng.bernoulli(search.ga_mutation_rate)) bit ^= 1;
            }
            genome = repair(std::move(genome), n, mask, search.max_parents, rng);
        }
        for (std::size_t i = 0; i < q; ++i) offspring_fitness[i] = fitness_of(offspring[i]);

        const std::size_t elite = best_index();
        std::size_t worst = 0;
        for (std::size_t i = 1; i < q; ++i) {
            if (offspring_fitness[i] < offspring_fitness[worst]) worst = i;
        }
        offspring[worst] = population[elite];
        offspring_fitness[worst] = fitness[elite];

        population.swap(offspring);
        fitness.swap(offspring_fitness);
        result.best_history.push_back(fitness[best_index()]);
    }

    const Genome& winner = population[best_index()];
    SearchResult finished = finish(data, decode_genome(winner, n), cache, search.ga_generations);
    finished.best_history = std::move(result.best_history);
    return finished;
}

SearchResult run_search(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                        const SearchSpec& search) {
    switch (search.strategy) {
        case SearchStrategy::hc: return hill_climb(data, mask, spec, search);
        case SearchStrategy::tabu: return tabu_search(data, mask, spec, search);
        case SearchStrategy::ga: return ga_search(data, mask, spec, search);
    }
    throw InvalidInput("unknown search strategy");
}

SearchResult exhaustive_search(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                               std::size_t max_parents) {
    check_inputs(data, mask);
    const std::size_t n = data.variables();
    if (n > kExhaustiveMaxNodes) {
        throw OracleTooLarge("exhaustive search supports at most " + std::to_string(kExhaustiveMaxNodes) +
                             " nodes, got " + std::to_string(n));
    }
    ScoreSpec capped = spec;
    capped.max_parents = std::max(spec.max_parents, max_parents);
    ScoreCache cache(data, capped);
    const std::vector<Arc> candidates = mask.arcs();
    const std::size_t k = candidates.size();

    bool have_best = false;
    double best_score = 0.0;
    std::vector<Arc> best_arcs;
    std::vector<Arc> arcs;
    std::vector<std::vector<NodeIndex>> ps(n);
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << k); ++subset) {
        arcs.clear();
        for (auto& p : ps) p.clear();
        bool within_cap = true;
        for (std::size_t i = 0; i < k && within_cap; ++i) {
            if (!(subset >> i & 1)) continue;
            arcs.push_back(candidates[i]);
            ps[candidates[i].child].push_back(candidates[i].parent);
            within_cap = ps[candidates[i].child].size() <= max_parents;
        }
        if (!within_cap || !is_acyclic(arcs, n)) continue;
        double total = 0.0;
        for (NodeIndex v = 0; v < n; ++v) {
            std::sort(ps[v].begin(), ps[v].end());
            total += cache.local(v, ps[v]);
        }
        std::sort(arcs.begin(), arcs.end());
        const bool better = !have_best || total > best_score ||
                            (total == best_score && (arcs.size() < best_arcs.size() ||
                                                     (arcs.size() == best_arcs.size() && arcs < best_arcs)));
        if (better) {
            have_best = true;
            best_score = total;
            best_arcs = arcs;
        }
    }
    return finish(data, Dag(n, best_arcs), cache, std::uint64_t{1} << k);
}

}  // namespace sbcn
