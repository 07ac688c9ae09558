#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hsbm/gwtree.hpp"
#include "hsbm/hypergraph.hpp"
#include "hsbm/stats.hpp"
#include "oracles.hpp"

using namespace hsbm;
using doctest::Approx;

namespace {

GWConfig config(double a, double b, std::uint32_t d, unsigned depth, std::uint64_t seed, int root = 1) {
    GWConfig c;
    c.a = a;
    c.b = b;
    c.d = d;
    c.depth = depth;
    c.seed = seed;
    c.root_spin = root;
    return c;
}

void check_type_identity(const GenerationCounts& g, std::uint32_t d) {
    for (std::size_t t = 1; t < g.W_plus.size(); ++t) {
        std::int64_t plus = 0, minus = 0;
        for (std::uint32_t r = 0; r < d; ++r) {
            plus += static_cast<std::int64_t>(r) * g.W_r[t][r];
            minus += static_cast<std::int64_t>(d - 1 - r) * g.W_r[t][r];
        }
        CHECK(g.W_plus[t] == plus);
        CHECK(g.W_minus[t] == minus);
    }
}

// Relabels non-root nodes and hyperedges and shuffles every child list.
RootedSpinTree scramble(const RootedSpinTree& tree, std::mt19937_64& rng) {
    std::vector<std::uint32_t> node_map(tree.nodes.size()), edge_map(tree.edges.size());
    std::iota(node_map.begin(), node_map.end(), 0u);
    std::iota(edge_map.begin(), edge_map.end(), 0u);
    std::shuffle(node_map.begin() + 1, node_map.end(), rng);
    std::shuffle(edge_map.begin(), edge_map.end(), rng);
    RootedSpinTree out;
    out.nodes.resize(tree.nodes.size());
    out.edges.resize(tree.edges.size());
    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
        auto& node = out.nodes[node_map[v]];
        node.spin = tree.nodes[v].spin;
        for (auto e : tree.nodes[v].child_edges) node.child_edges.push_back(edge_map[e]);
        std::shuffle(node.child_edges.begin(), node.child_edges.end(), rng);
    }
    for (std::size_t e = 0; e < tree.edges.size(); ++e) {
        auto& edge = out.edges[edge_map[e]];
        edge.parent = node_map[tree.edges[e].parent];
        for (auto c : tree.edges[e].children) edge.children.push_back(node_map[c]);
        std::shuffle(edge.children.begin(), edge.children.end(), rng);
    }
    return out;
}

RootedSpinTree single_edge(int root, std::vector<int> children) {
    RootedSpinTree t;
    t.nodes.push_back({root, {0}});
    RootedSpinTree::HyperEdge e;
    for (int s : children) {
        e.children.push_back(static_cast<std::uint32_t>(t.nodes.size()));
        t.nodes.push_back({s, {}});
    }
    t.edges.push_back(e);
    return t;
}

}  // namespace

TEST_CASE("configuration validation") {
    CHECK_NOTHROW(config(10, 2, 3, 2, 0).validate());
    CHECK_THROWS_AS(config(10, 0, 3, 2, 0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(2, 10, 3, 2, 0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(10, 2, 1, 2, 0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(config(10, 2, 3, 2, 0, 0).validate(), std::invalid_argument);
}

TEST_CASE("counts sampler basics") {
    const auto g0 = sample_counts(config(10, 2, 3, 0, 1));
    REQUIRE(g0.W_plus.size() == 1);
    CHECK(g0.W_plus[0] == 1);
    CHECK(g0.W_minus[0] == 0);
    CHECK(g0.M[0] == 1.0);
    CHECK(g0.Delta[0] == 1.0);
    const auto neg = sample_counts(config(10, 2, 3, 0, 1, -1));
    CHECK(neg.W_plus[0] == 0);
    CHECK(neg.W_minus[0] == 1);

    for (std::uint32_t d = 2; d <= 4; ++d) {
        for (std::uint64_t s = 0; s < 200; ++s) {
            check_type_identity(sample_counts(config(10, 2, d, 4, s, s % 2 ? 1 : -1)), d);
        }
    }
    CHECK(sample_counts(config(10, 2, 3, 5, 9)).W_plus == sample_counts(config(10, 2, 3, 5, 9)).W_plus);
}

TEST_CASE("equal rates grow by alpha per generation") {
    const auto c = config(4, 4, 3, 2, 5);
    const double alpha = alpha_of(3, 4, 4);
    const int samples = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < samples; ++s) {
        const auto g = sample_counts(c, static_cast<std::uint64_t>(s));
        const double x = static_cast<double>(g.W_plus[2] + g.W_minus[2]);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum_sq / samples - mean * mean) / samples);
    CHECK(std::abs(mean - alpha * alpha) <= 3.0 * se);
}

TEST_CASE("tree sampler structure") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto c = config(10, 2, 3, 3, s, s % 2 ? 1 : -1);
        const auto tree = sample_tree(c);
        CHECK(tree.nodes[0].spin == c.root_spin);
        std::vector<int> parents(tree.nodes.size(), 0);
        for (const auto& e : tree.edges) {
            REQUIRE(e.children.size() == 2);
            for (auto ch : e.children) ++parents[ch];
        }
        CHECK(parents[0] == 0);
        CHECK(std::all_of(parents.begin() + 1, parents.end(), [](int p) { return p == 1; }));
        check_type_identity(tree_generation_counts(tree, c), 3);
    }
    CHECK_THROWS_AS(sample_tree(config(10, 2, 3, 8, 0)), std::invalid_argument);
}

TEST_CASE("tree hyperedge types follow the type law") {
    const auto probs = type_probabilities(3, 10, 2);
    std::vector<std::int64_t> types(3, 0);
    for (std::uint64_t s = 0; s < 3000; ++s) {
        const auto tree = sample_tree(config(10, 2, 3, 2, s));
        for (const auto& e : tree.edges) {
            int same = 0;
            for (auto ch : e.children) same += tree.nodes[ch].spin == tree.nodes[e.parent].spin ? 1 : 0;
            ++types[same];
        }
    }
    const auto res = chi_square_gof(types, [&](std::int64_t r) { return r < 3 ? probs[r] : 0.0; });
    CHECK(res.p_value > 0.001);
}

TEST_CASE("tree and counts samplers agree on the first generation") {
    const auto c = config(10, 2, 3, 1, 0);
    const int draws = 100000;
    // Category index W+ * 64 + W- (both are far below 64 at these rates).
    std::vector<std::int64_t> x(64 * 64, 0), y(64 * 64, 0);
    for (int s = 0; s < draws; ++s) {
        const auto stream = static_cast<std::uint64_t>(s);
        const auto gc = sample_counts(c, stream);
        const auto gt = tree_generation_counts(sample_tree(c, stream + 7919u * 1000003u), c);
        ++x[static_cast<std::size_t>(std::min<std::int64_t>(gc.W_plus[1], 63) * 64 + std::min<std::int64_t>(gc.W_minus[1], 63))];
        ++y[static_cast<std::size_t>(std::min<std::int64_t>(gt.W_plus[1], 63) * 64 + std::min<std::int64_t>(gt.W_minus[1], 63))];
    }
    const auto res = chi_square_two_sample(x, y);
    MESSAGE("two-sample chi-square p = " << res.p_value << " over " << res.bins << " bins");
    CHECK(res.p_value > 0.001);
}

TEST_CASE("martingale moments") {
    struct Case {
        std::uint32_t d;
        double a, b;
    };
    for (const Case cs : {Case{2, 10, 2}, Case{3, 10, 2}, Case{4, 10, 1}}) {
        const auto rates = derive_rates({1000, cs.d, cs.a, cs.b, 0});
        REQUIRE(rates.beta * rates.beta > rates.alpha);
        const auto st = martingale_stats(config(cs.a, cs.b, cs.d, 10, 100 + cs.d), 100000);
        REQUIRE(st.rows.size() == 11);
        for (const auto& row : st.rows) {
            if (row.t == 0) {
                CHECK(row.mean_M == 1.0);
                CHECK(row.mean_Delta == 1.0);
                continue;
            }
            CHECK(std::abs(row.mean_M - 1.0) <= 3.0 * row.se_M);
            CHECK(std::abs(row.mean_Delta - 1.0) <= 3.0 * row.se_Delta);
            CHECK(row.var_M_exact == Approx(var_M_closed_form(cs.d, rates.alpha, row.t)));
            CHECK(row.var_M == Approx(row.var_M_exact).epsilon(0.05));
            REQUIRE(row.var_Delta_exact.has_value());
            CHECK(row.var_Delta == Approx(*row.var_Delta_exact).epsilon(0.05));
        }
        const double target = 1.0 + var_delta_closed_form(rates.kappa, rates.alpha, rates.beta, 10);
        CHECK(std::abs(st.est_E_delta_inf_sq - target) <= 3.0 * st.se_E_delta_inf_sq);
    }
    CHECK(var_M_closed_form(3, 8.0, 1) == Approx(0.25));
    CHECK(var_delta_closed_form(1.5, 8.0, 4.0, 1) == Approx(0.75));
    CHECK_THROWS_AS(martingale_stats(config(10, 2, 3, 2, 0), 999), std::invalid_argument);
    const auto again = martingale_stats(config(10, 2, 3, 3, 4), 2000);
    CHECK(again.rows[3].mean_Delta == martingale_stats(config(10, 2, 3, 3, 4), 2000).rows[3].mean_Delta);
}

TEST_CASE("canonical forms") {
    CHECK(canonical_form(single_edge(1, {1, -1})) == canonical_form(single_edge(1, {-1, 1})));
    CHECK(canonical_form(single_edge(1, {1, 1})) != canonical_form(single_edge(1, {1, -1})));
    CHECK(canonical_form(single_edge(1, {1, 1})) != canonical_form(single_edge(-1, {1, 1})));

    std::mt19937_64 rng(99);
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto tree = sample_tree(config(10, 2, 3, 2, s));
        CHECK(canonical_form(scramble(tree, rng)) == canonical_form(tree));
    }
    // Distinct generation profiles never share a form.
    std::map<std::string, std::vector<std::int64_t>> seen;
    for (std::uint64_t s = 0; s < 500; ++s) {
        const auto c = config(10, 2, 3, 2, s);
        const auto tree = sample_tree(c);
        const auto g = tree_generation_counts(tree, c);
        std::vector<std::int64_t> key(g.W_plus.begin(), g.W_plus.end());
        key.insert(key.end(), g.W_minus.begin(), g.W_minus.end());
        const auto [it, fresh] = seen.emplace(canonical_form(tree), key);
        if (!fresh) CHECK(it->second == key);
    }

    RootedSpinTree cyclic = single_edge(1, {1, 1});
    RootedSpinTree::HyperEdge back;
    back.parent = 1;
    back.children = {2};
    cyclic.nodes[1].child_edges.push_back(1);
    cyclic.edges.push_back(back);
    CHECK_THROWS_AS(canonical_form(cyclic), std::invalid_argument);
    RootedSpinTree loop = single_edge(1, {1, 1});
    loop.edges[0].children[1] = 0;
    CHECK_THROWS_AS(canonical_form(loop), std::invalid_argument);
}

TEST_CASE("neighborhood trees") {
    const Hypergraph h(5, 3, {{0, 1, 2}, {2, 3, 4}});
    const SpinAssignment s({-1, 1, -1, 1, 1});
    const auto t = neighborhood_tree(h, s, 0, 2);
    REQUIRE(t.has_value());
    CHECK(t->nodes.size() == 5);
    CHECK(t->nodes[0].spin == -1);
    const auto norm = neighborhood_tree(h, s, 0, 2, true);
    REQUIRE(norm.has_value());
    CHECK(norm->nodes[0].spin == 1);
    CHECK(canonical_form(*neighborhood_tree(h, s, 0, 1)) == canonical_form(single_edge(-1, {1, -1})));
    const Hypergraph cyc(4, 3, {{0, 1, 2}, {0, 1, 3}});
    CHECK_FALSE(neighborhood_tree(cyc, SpinAssignment({1, 1, 1, 1}), 0, 1).has_value());
}

TEST_CASE("overlap constant estimate") {
    const auto c = config(10, 2, 3, 12, 17);
    const auto low = estimate_r(c, -1e9, 20000, 12);
    const auto high = estimate_r(c, 1e9, 20000, 12);
    CHECK(low.r_hat == 0.0);
    CHECK(high.r_hat == 0.0);
    const auto mid = estimate_r(c, 0.0, 100000, 12);
    MESSAGE("r_hat(0) = " << mid.r_hat << " +- " << mid.se << " [" << mid.r_hat_tau_minus << ", "
                          << mid.r_hat_tau_plus << "]");
    CHECK(mid.r_hat > 3.0 * mid.se);
    CHECK_THROWS_AS(estimate_r(config(4, 4, 3, 4, 0), 0.0, 1000, 4), std::invalid_argument);
    CHECK_THROWS_AS(estimate_r(config(3, 2, 3, 4, 0), 0.0, 1000, 4), std::invalid_argument);
}

TEST_CASE("binomial-Poisson total variation") {
    for (std::int64_t n : {10, 57, 400, 3000}) {
        for (double c : {0.3, 1.0, 4.0, 9.5}) {
            if (c > static_cast<double>(n)) continue;
            for (std::int64_t m : {n / 2, n, 2 * n}) {
                const double ref = static_cast<double>(oracle::binom_pois_tv(m, n, c));
                CHECK(std::abs(binom_pois_tv(m, n, c) - ref) <= 1e-12);
            }
        }
    }
    CHECK(binom_pois_tv(1000, 1000, 1.0) < 5.0 / 1000);
    CHECK(binom_pois_tv(100, 100, 2.0) > binom_pois_tv(1000, 1000, 2.0));
    CHECK(binom_pois_tv(1000, 1000, 2.0) > binom_pois_tv(10000, 10000, 2.0));
    CHECK(binom_pois_tv(50, 100, 0.0) == 0.0);
    CHECK_THROWS_AS(binom_pois_tv(10, 10, 11.0), std::invalid_argument);
}

TEST_CASE("root offspring follow Poisson laws") {
    const auto rates = offspring_rates(3, 10, 2);
    REQUIRE(rates.size() == 3);
    CHECK(rates[2] == Approx(2.5));
    CHECK(rates[1] == Approx(1.0));
    CHECK(rates[0] == Approx(0.5));
    std::vector<std::vector<std::int64_t>> hist(3);
    for (std::uint64_t g = 0; g < 100; ++g) {
        const auto lh = sample_hsbm({5000, 3, 10.0, 2.0, 500 + g});
        for (Vertex i = 0; i < 5000; i += 50) {
            const auto oc = offspring_counts(lh.graph, lh.spins, i, 0);
            REQUIRE(oc.per_vertex.size() == 1);
            for (std::size_t r = 0; r < 3; ++r) {
                const auto k = static_cast<std::size_t>(oc.per_vertex[0][r]);
                if (hist[r].size() <= k) hist[r].resize(k + 1, 0);
                ++hist[r][k];
            }
        }
    }
    for (std::size_t r = 0; r < 3; ++r) {
        const auto res = chi_square_gof(hist[r], [&](std::int64_t k) { return poisson_pmf(k, rates[r]); });
        MESSAGE("r=" << r << " chi-square p = " << res.p_value);
        CHECK(res.p_value > 0.001);
    }
    const auto iso = offspring_counts(Hypergraph(4, 3, {{1, 2, 3}}), SpinAssignment({1, 1, -1, 1}), 0, 0);
    REQUIRE(iso.per_vertex.size() == 1);
    CHECK(iso.per_vertex[0] == std::vector<std::int64_t>{0, 0, 0});
    CHECK(iso.histogram[2] == std::vector<std::int64_t>{1});
    CHECK(offspring_counts(Hypergraph(4, 3, {{1, 2, 3}}), SpinAssignment({1, 1, -1, 1}), 0, 1).per_vertex.empty());
    CHECK(offspring_rates(3, 0.1, 0.1)[0] == Approx(0.025));
}
