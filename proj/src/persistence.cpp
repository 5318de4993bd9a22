#include "latpath/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "latpath/errors.hpp"

namespace latpath {

namespace {

// Prim over the complete graph; O(n^2) and no edge list needed.
std::vector<double> mst_edge_weights(const DistanceMatrix& dm) {
    const std::size_t n = dm.size();
    if (n <= 1) return {};

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<char> in_tree(n, 0);
    std::vector<double> best(n, kInf);
    std::vector<double> weights;
    weights.reserve(n - 1);

    best[0] = 0.0;
    for (std::size_t round = 0; round < n; ++round) {
        std::size_t next = n;
        double next_w = kInf;
        for (std::size_t v = 0; v < n; ++v) {
            if (!in_tree[v] && best[v] < next_w) {
                next = v;
                next_w = best[v];
            }
        }
        in_tree[next] = 1;
        if (round > 0) weights.push_back(next_w);
        for (std::size_t v = 0; v < n; ++v) {
            if (!in_tree[v]) best[v] = std::min(best[v], dm(next, v));
        }
    }
    std::sort(weights.begin(), weights.end());
    return weights;
}

struct UnionFind {
    std::vector<std::uint32_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

// Z/2 column addition: symmetric difference of sorted index vectors.
std::vector<std::uint32_t> add_columns(const std::vector<std::uint32_t>& a,
                                       const std::vector<std::uint32_t>& b) {
    std::vector<std::uint32_t> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else if (b[j] < a[i]) {
            out.push_back(b[j++]);
        } else {
            ++i;
            ++j;
        }
    }
    out.insert(out.end(), a.begin() + i, a.end());
    out.insert(out.end(), b.begin() + j, b.end());
    return out;
}

void sort_pairs(std::vector<PersistencePair>& pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
}

}  // namespace

PersistenceDiagram h0_persistence(const DistanceMatrix& dm) {
    PersistenceDiagram diagram;
    diagram.dim = 0;
    diagram.max_eps = std::numeric_limits<double>::infinity();
    diagram.dropped_infinite = 1;  // the surviving component

    for (double w : mst_edge_weights(dm)) {
        diagram.pairs.push_back({0.0, w});
    }
    return diagram;
}

namespace detail {

Filtration build_filtration(const DistanceMatrix& dm, double max_eps,
                            std::size_t triangle_budget) {
    if (!(max_eps > 0.0)) {
        throw DataError("max_eps must be positive");
    }
    const std::size_t n = dm.size();
    Filtration f;
    f.n = n;

    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double d = dm(i, j);
            if (d <= max_eps) f.edges.push_back({d, i, j});
        }
    }
    std::sort(f.edges.begin(), f.edges.end(), [](const auto& a, const auto& b) {
        if (a.diameter != b.diameter) return a.diameter < b.diameter;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });

    // Neighbor lists restricted to pairs within the ceiling.
    std::vector<std::vector<std::uint32_t>> nbr(n);
    for (const auto& e : f.edges) {
        nbr[e.u].push_back(e.v);
        nbr[e.v].push_back(e.u);
    }
    for (auto& list : nbr) std::sort(list.begin(), list.end());

    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j : nbr[i]) {
            if (j <= i) continue;
            // common neighbors k > j of i and j
            const auto& a = nbr[i];
            const auto& b = nbr[j];
            std::size_t p = std::upper_bound(a.begin(), a.end(), j) - a.begin();
            std::size_t r = std::upper_bound(b.begin(), b.end(), j) - b.begin();
            while (p < a.size() && r < b.size()) {
                if (a[p] < b[r]) {
                    ++p;
                } else if (b[r] < a[p]) {
                    ++r;
                } else {
                    const std::uint32_t k = a[p];
                    const double diam =
                        std::max({dm(i, j), dm(i, k), dm(j, k)});
                    if (diam <= max_eps) {
                        if (f.triangles.size() >= triangle_budget) {
                            throw ResourceError(
                                "triangle count exceeds the budget of " +
                                std::to_string(triangle_budget) +
                                "; lower max_eps, subsample the cloud, or raise "
                                "LATPATH_SIMPLEX_BUDGET");
                        }
                        f.triangles.push_back({diam, i, j, k});
                    }
                    ++p;
                    ++r;
                }
            }
        }
    }
    std::sort(f.triangles.begin(), f.triangles.end(),
              [](const auto& a, const auto& b) {
                  if (a.diameter != b.diameter) return a.diameter < b.diameter;
                  if (a.a != b.a) return a.a < b.a;
                  if (a.b != b.b) return a.b < b.b;
                  return a.c < b.c;
              });
    return f;
}

std::vector<PersistencePair> reduce_h1(const Filtration& f,
                                       std::size_t* dropped_infinite) {
    const std::size_t n_edges = f.edges.size();

    // Edge rank lookup in the given row order.
    std::unordered_map<std::uint64_t, std::uint32_t> rank;
    rank.reserve(n_edges * 2);
    for (std::uint32_t r = 0; r < n_edges; ++r) {
        const auto& e = f.edges[r];
        rank[static_cast<std::uint64_t>(e.u) * f.n + e.v] = r;
    }
    const auto edge_rank = [&](std::uint32_t u, std::uint32_t v) {
        if (u > v) std::swap(u, v);
        return rank.at(static_cast<std::uint64_t>(u) * f.n + v);
    };

    // Edges that fail to merge two components create cycles; only those can
    // be paired by the reduction below.
    UnionFind uf(f.n);
    std::size_t positive_edges = 0;
    for (const auto& e : f.edges) {
        if (!uf.unite(e.u, e.v)) ++positive_edges;
    }

    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> pivot_owner;
    pivot_owner.reserve(f.triangles.size());
    std::vector<PersistencePair> pairs;
    std::size_t paired = 0;

    for (const auto& t : f.triangles) {
        std::vector<std::uint32_t> col = {edge_rank(t.a, t.b),
                                          edge_rank(t.a, t.c),
                                          edge_rank(t.b, t.c)};
        std::sort(col.begin(), col.end());
        while (!col.empty()) {
            const std::uint32_t pivot = col.back();
            auto it = pivot_owner.find(pivot);
            if (it == pivot_owner.end()) {
                const double birth = f.edges[pivot].diameter;
                if (birth < t.diameter) {
                    pairs.push_back({birth, t.diameter});
                }
                ++paired;
                pivot_owner.emplace(pivot, std::move(col));
                break;
            }
            col = add_columns(col, it->second);
        }
    }

    if (dropped_infinite) *dropped_infinite = positive_edges - paired;
    sort_pairs(pairs);
    return pairs;
}

}  // namespace detail

PersistenceDiagram h1_persistence(const DistanceMatrix& dm, double max_eps,
                                  std::size_t triangle_budget) {
    const detail::Filtration f =
        detail::build_filtration(dm, max_eps, triangle_budget);

    PersistenceDiagram diagram;
    diagram.dim = 1;
    diagram.max_eps = max_eps;
    diagram.pairs = detail::reduce_h1(f, &diagram.dropped_infinite);
    return diagram;
}

PersistenceDiagram augment_h0(const PersistenceDiagram& diagram, double delta) {
    if (diagram.dim != 0) {
        throw DataError("augmentation applies to degree-0 diagrams only");
    }
    for (const auto& p : diagram.pairs) {
        if (p.birth != 0.0) {
            throw DataError("augmentation expects all births at 0");
        }
    }
    const std::size_t q = diagram.q();
    if (q == 0) return diagram;

    std::vector<double> deaths;
    deaths.reserve(q);
    for (const auto& p : diagram.pairs) deaths.push_back(p.death);
    std::sort(deaths.begin(), deaths.end());

    const double max_birth = static_cast<double>(q - 1) * delta;
    if (!(delta > 0.0) || !(max_birth < deaths.front())) {
        throw DataError("invalid augmentation delta " + std::to_string(delta) +
                        ": need delta > 0 and (q-1)*delta = " +
                        std::to_string(max_birth) + " below the smallest death " +
                        std::to_string(deaths.front()));
    }

    PersistenceDiagram out;
    out.dim = 0;
    out.max_eps = diagram.max_eps;
    out.dropped_infinite = diagram.dropped_infinite;
    for (std::size_t i = 0; i < q; ++i) {
        out.pairs.push_back({static_cast<double>(i) * delta, deaths[i]});
    }
    sort_pairs(out.pairs);
    return out;
}

double default_augment_delta(const PersistenceDiagram& diagram) {
    if (diagram.pairs.empty()) {
        throw DataError("cannot derive an augmentation delta for an empty diagram");
    }
    double min_death = std::numeric_limits<double>::infinity();
    for (const auto& p : diagram.pairs) min_death = std::min(min_death, p.death);
    return 1e-3 * min_death;
}

}  // namespace latpath
