#ifndef HSBM_HYPERGRAPH_HPP
#define HSBM_HYPERGRAPH_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "hsbm/model.hpp"
#include "hsbm/sparse.hpp"

namespace hsbm {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

// Community labels, one of {+1, -1} per vertex.
class SpinAssignment {
public:
    SpinAssignment() = default;
    explicit SpinAssignment(std::vector<std::int8_t> spins);

    std::size_t size() const { return spins_.size(); }
    int operator[](std::size_t i) const { return spins_[i]; }
    std::span<const std::int8_t> values() const { return spins_; }
    std::size_t count_plus() const;
    std::size_t count_minus() const { return size() - count_plus(); }
    SpinAssignment negated() const;

    friend bool operator==(const SpinAssignment&, const SpinAssignment&) = default;

private:
    std::vector<std::int8_t> spins_;
};

// d-uniform hypergraph on {0, ..., n-1}. Edges are canonical (sorted vertex
// tuples), the edge list is sorted lexicographically and duplicate-free, and
// incidence lists are sorted by edge index. Immutable after construction.
class Hypergraph {
public:
    Hypergraph() = default;
    // Canonicalizes the input; throws std::invalid_argument on malformed or
    // duplicate edges.
    Hypergraph(std::uint32_t n, std::uint32_t d, const std::vector<std::vector<Vertex>>& edges);

    std::uint32_t n() const { return n_; }
    std::uint32_t d() const { return d_; }
    std::size_t num_edges() const { return d_ == 0 ? 0 : flat_.size() / d_; }

    std::span<const Vertex> edge(EdgeId e) const { return {flat_.data() + std::size_t{e} * d_, d_}; }
    std::span<const EdgeId> incidence(Vertex v) const {
        return {incident_.data() + inc_ptr_[v], inc_ptr_[v + 1] - inc_ptr_[v]};
    }
    std::vector<std::vector<Vertex>> edge_list() const;

    // Adjacency-tensor entry for a d-subset given in any order; throws on a
    // malformed subset (wrong size, repeated or out-of-range vertex).
    bool contains(std::span<const Vertex> subset) const;
    // Index of a canonical edge, or -1.
    std::int64_t find(std::span<const Vertex> sorted_subset) const;

    friend bool operator==(const Hypergraph& x, const Hypergraph& y) {
        return x.n_ == y.n_ && x.d_ == y.d_ && x.flat_ == y.flat_;
    }

private:
    std::uint32_t n_ = 0;
    std::uint32_t d_ = 0;
    std::vector<Vertex> flat_;
    std::vector<std::size_t> inc_ptr_{0};
    std::vector<EdgeId> incident_;
};

struct LabeledHypergraph {
    Hypergraph graph;
    SpinAssignment spins;
};

// Draws (H, sigma) from the model. Never enumerates all C(n, d) subsets
// unless a class is small: edge counts per class are binomial, and the
// subsets themselves are drawn uniformly without replacement.
LabeledHypergraph sample_hsbm(const ModelParams& params);

// A_ij = number of hyperedges containing both i and j, zero diagonal.
CountMatrix adjacency_matrix(const Hypergraph& h);

// Number of circuits (i_0, e_1, i_1, ..., e_k, i_0), counted by a walk DP
// over incidence lists. Throws for k == 0.
std::int64_t circuit_count(const Hypergraph& h, unsigned k);

// Mean number of hyperedges incident to a vertex of spin class size
// n_same (including itself), given n and the model rates.
double expected_incident_edges(const ModelParams& params, std::uint32_t n_same);

// Exact expected edge count given the realized class sizes.
double expected_edge_count(const ModelParams& params, std::uint32_t n_plus);

}  // namespace hsbm

#endif  // HSBM_HYPERGRAPH_HPP
