#pragma once

#include "sbcn/model.hpp"
#include "sbcn/random.hpp"
#include "sbcn/scoring.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sbcn {

enum class SearchStrategy { hc, tabu, ga };

std::string_view to_string(SearchStrategy strategy);
SearchStrategy parse_search_strategy(std::string_view name);

struct SearchSpec {
    SearchStrategy strategy = SearchStrategy::hc;
    std::size_t max_parents = 3;
    std::size_t tabu_tenure = 10;
    /// Consecutive iterations without a new best before tabu search stops.
    std::size_t tabu_max_iterations = 100;
    std::size_t ga_population = 32;
    std::size_t ga_generations = 100;
    double ga_mutation_rate = 0.01;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct SearchResult {
    Dag dag;
    double score = 0.0;
    /// Moves applied (hc, tabu) or generations run (ga).
    std::size_t iterations = 0;
    /// GA only: best fitness after each generation, starting with the initial population.
    std::vector<double> best_history;
};

struct ScoredMove {
    Move move;
    double delta = 0.0;
};

/// Every legal single-arc move on `g` within `mask` and the parent cap,
/// scored, in (child, parent, kind) order.
std::vector<ScoredMove> legal_moves(const Dag& g, const ArcMask& mask, std::size_t max_parents, ScoreCache& cache);

/// Greedy best-improvement search from the empty graph over add, remove and
/// reverse moves. Ties go to the lowest (child, parent).
SearchResult hill_climb(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                        const SearchSpec& search);

/// Best-so-far graph of a tabu search. Recently applied moves' inverses are
/// tabu unless they would beat the best score found.
SearchResult tabu_search(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                         const SearchSpec& search);

using Genome = std::vector<std::uint8_t>;

/// Off-diagonal adjacency entries in row-major order: bit for u -> v lives at
/// u * (n - 1) + (v < u ? v : v - 1).
std::size_t genome_index(NodeIndex parent, NodeIndex child, std::size_t n);
Genome encode_genome(const Dag& g);
/// Arcs of a genome; the result may contain cycles.
std::vector<Arc> genome_arcs(const Genome& genome, std::size_t n);
/// Throws InvalidGraph when the genome is cyclic.
Dag decode_genome(const Genome& genome, std::size_t n);

/// Projects a genome onto the mask, breaks cycles by deleting a random arc
/// on a detected cycle, then trims random excess parents.
Genome repair(Genome genome, std::size_t n, const ArcMask& mask, std::size_t max_parents, Rng& rng);

/// Genetic algorithm over adjacency genomes: rank selection, single-point
/// crossover, per-bit mutation, repair, and elitism of one. When
/// `initial_population` is empty a random sparse population is drawn.
SearchResult ga_search(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                       const SearchSpec& search, std::vector<Genome> initial_population = {});

/// Dispatches on search.strategy.
SearchResult run_search(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                        const SearchSpec& search);

inline constexpr std::size_t kExhaustiveMaxNodes = 5;

/// Highest-scoring acyclic, mask-legal graph within the parent cap. Ties go to
/// fewer arcs, then the lexicographically smallest arc list. Throws
/// OracleTooLarge above kExhaustiveMaxNodes nodes.
SearchResult exhaustive_search(const BinaryDataset& data, const ArcMask& mask, const ScoreSpec& spec,
                               std::size_t max_parents = 3);

}  // namespace sbcn
