#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "latpath/persistence.hpp"

namespace latpath {

enum class EventKind : std::uint8_t { Birth, Death };

struct BirthDeathEvent {
    double value = 0.0;
    EventKind kind = EventKind::Birth;
};

// The 2q order statistics of a diagram's births and deaths, tagged. Every
// prefix holds at least as many births as deaths (a Dyck prefix), because
// each death is preceded by its own birth.
struct BirthDeathProcess {
    std::vector<BirthDeathEvent> events;  // strictly increasing values

    std::size_t q() const { return events.size() / 2; }
};

enum class Step : std::uint8_t { Right, Up };

struct LatticePath {
    std::vector<Step> steps;  // births map to Right, deaths to Up

    bool operator==(const LatticePath&) const = default;
};

struct WeightedLatticePath {
    std::vector<double> births;  // strictly increasing
    std::vector<double> deaths;  // strictly increasing
    LatticePath word;

    std::size_t q() const { return births.size(); }
};

// Box areas traversed along the weighted path: h[0] = 0 and
// h[i] = (b(i+1) - b(i)) * (d(i+1) - d(i)) in sorted-order statistics.
// The raw sequence is kept in traversal order; h holds the nondecreasing
// version (stably sorted when the raw sequence is not already monotone,
// which is recorded as a provenance warning).
struct BoxAreaSequence {
    std::vector<double> h;                  // nondecreasing, h[0] == 0
    std::vector<double> h_strict;           // strictly increasing after strictify
    double delta = 0.0;                     // increment used by strictify
    std::vector<double> h_raw;              // traversal order
    std::vector<std::uint32_t> sort_perm;   // h[k] == h_raw[sort_perm[k]]; empty = identity
    std::vector<std::uint32_t> run_lengths; // maximal equal runs of h
    bool sorted_to_monotone = false;

    std::size_t q() const { return h.size(); }
};

// Normalized staircase: q breakpoints t1 <= t2 < ... < tq inside [0, 1],
// phi(t) = #{j : tj <= t}. Right continuous, phi(1) = q. The first
// breakpoint is 0 exactly when the smallest strictified box area is 0 (the
// usual case), in which case phi jumps immediately at t = 0.
struct StepFunction {
    std::vector<double> breakpoints;

    std::size_t q() const { return breakpoints.size(); }
    int value_at(double t) const;
};

// Rejects q = 0 and any tie among the 2q values (TieError advising jitter or
// augmentation).
BirthDeathProcess to_birth_death_process(const PersistenceDiagram& diagram);

LatticePath dyck_word(const BirthDeathProcess& process);

WeightedLatticePath to_weighted_lattice_path(const BirthDeathProcess& process);

// Exact q-th Catalan number; DataError once the value exceeds 64 bits
// (first at q = 37). Intermediate arithmetic is 128-bit.
std::uint64_t catalan(unsigned q);

BoxAreaSequence box_areas(const WeightedLatticePath& path);

// Builds a BoxAreaSequence from a bare nondecreasing h (h[0] must be 0) and
// strictifies it; convenient for callers that do not start from a path.
BoxAreaSequence strictify(std::vector<double> h, std::optional<double> delta = {});

// Adds delta * (0, 1, ..., r-1) to every maximal run of r equal values.
// Without an explicit delta a single global increment is chosen as the
// minimum over runs of min(1/r, gap/r, 1e-6 * h.back()), which respects the
// per-run 1/r bound and cannot collide with the next distinct value. An
// explicit delta must satisfy delta <= 1/r for every run and leave the
// result strictly increasing, else DataError.
void apply_strictify(BoxAreaSequence& bas, std::optional<double> delta = {});

// Breakpoints h_strict / h_strict.back() (scale 1 when the sequence is the
// single value 0, i.e. q = 1).
StepFunction step_function(const BoxAreaSequence& bas);

// Same, but normalized by a caller-provided scale >= h_strict.back(), so two
// diagrams can share one scale and keep their cross-diagram ordering.
StepFunction step_function_with_scale(const BoxAreaSequence& bas, double scale);

// Everything needed to invert the construction. Breakpoints only carry the
// strictified areas; the interleaving word, the births, the first death and
// the run/sort bookkeeping cannot be derived from them (q numbers cannot
// determine 2q), so the encoding records them explicitly. Decoding rebuilds
// the deaths from the areas: d(i+1) - d(i) = h_raw[i+1] / (b(i+1) - b(i)).
struct PathEncoding {
    StepFunction phi;
    double scale = 1.0;
    double delta = 0.0;
    LatticePath word;
    std::vector<double> births;
    double first_death = 0.0;
    std::vector<std::uint32_t> sort_perm;    // empty = identity
    std::vector<std::uint32_t> run_lengths;
};

PathEncoding encode_birth_death(const BirthDeathProcess& process);
BirthDeathProcess decode_birth_death(const PathEncoding& enc);

}  // namespace latpath
