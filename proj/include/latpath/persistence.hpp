#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "latpath/distance_matrix.hpp"

namespace latpath {

struct PersistencePair {
    double birth = 0.0;
    double death = 0.0;
};

struct PersistenceDiagram {
    int dim = 0;
    std::vector<PersistencePair> pairs;  // sorted by (birth, death), birth < death
    std::size_t dropped_infinite = 0;    // classes alive at the ceiling
    double max_eps = 0.0;                // filtration ceiling; +inf for unbounded H0

    std::size_t q() const { return pairs.size(); }
};

inline constexpr std::size_t kDefaultTriangleBudget = 50'000'000;

// Degree-0 persistence of the Vietoris-Rips filtration. Every point is born
// at 0; deaths are the minimum-spanning-tree edge weights in ascending
// order. The one component that never dies is counted in dropped_infinite.
PersistenceDiagram h0_persistence(const DistanceMatrix& dm);

// Degree-1 persistence up to the ceiling max_eps over Z/2, by column
// reduction of the triangle boundary matrix in filtration order (ties broken
// lexicographically on vertices). Cycles unpaired at the ceiling go to
// dropped_infinite. Exceeding triangle_budget raises ResourceError.
PersistenceDiagram h1_persistence(const DistanceMatrix& dm, double max_eps,
                                  std::size_t triangle_budget = kDefaultTriangleBudget);

// Replaces the i-th zero birth (pairs ordered by death) with (i-1)*delta so
// degree-0 diagrams gain strictly increasing births. Requires delta > 0 and
// (q-1)*delta < smallest death.
PersistenceDiagram augment_h0(const PersistenceDiagram& diagram, double delta);

// 1e-3 times the smallest death; a safe default for augment_h0.
double default_augment_delta(const PersistenceDiagram& diagram);

namespace detail {

struct FiltEdge {
    double diameter;
    std::uint32_t u, v;  // u < v
};

struct FiltTriangle {
    double diameter;
    std::uint32_t a, b, c;  // a < b < c
};

struct Filtration {
    std::size_t n = 0;
    std::vector<FiltEdge> edges;          // filtration order
    std::vector<FiltTriangle> triangles;  // filtration order
};

Filtration build_filtration(const DistanceMatrix& dm, double max_eps,
                            std::size_t triangle_budget);

// Reduces the triangle-over-edge boundary matrix of an already ordered
// filtration. Row order is the given edge order, column order the given
// triangle order; both may be any tie-consistent refinement.
std::vector<PersistencePair> reduce_h1(const Filtration& f,
                                       std::size_t* dropped_infinite);

}  // namespace detail

}  // namespace latpath
