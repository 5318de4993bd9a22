#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "latpath/lattice.hpp"

namespace latpath {

// Largest q1 + q2 for which the path-counting recursion runs in exact
// arbitrary-width integers; beyond it a scaled floating-point recursion with
// an exactly tracked power-of-two renormalization takes over.
inline constexpr std::size_t kExactCountCutover = 2000;

struct PermutationResult {
    double p = 1.0;
    std::uint64_t n_perm = 0;
    std::uint64_t seed = 0;
    std::uint64_t hits = 0;  // permutations with statistic >= observed
};

struct InferenceResult {
    std::size_t q1 = 0;
    std::size_t q2 = 0;
    double d_stat = 0.0;
    double d_scaled = 0.0;
    std::optional<double> p_exact;
    std::optional<double> p_asymptotic;
    std::optional<PermutationResult> p_permutation;
};

// sup_t |phi1(t)/q1 - phi2(t)/q2| over the union of breakpoints, checking
// both the attained value and the limit from the left. The two functions
// must share one normalization scale.
double topo_distance(const StepFunction& f1, const StepFunction& f2);

// Exact integral of |phi1/q1 - phi2/q2| over [0, 1] as a finite sum over
// breakpoint intervals. Always <= topo_distance of the pair.
double area_between(const StepFunction& f1, const StepFunction& f2);

// The band edge d*q1*q2, backed off by one part in 1e9. The rejection region
// P(D >= d) must contain the observed statistic itself, and d reaches this
// point carrying upstream rounding of order 1e-13 relative; the back-off
// swallows that noise while staying far below the relative gap between
// adjacent integer deviations at any supported size, so a statistic equal to
// an attainable path deviation always rejects inclusively no matter which way
// the products round.
double band_bound(std::uint64_t q1, std::uint64_t q2, double d);

// Strict band test shared by every path-counting route:
// |u/q1 - v/q2| < d, evaluated as |u*q2 - v*q1| < band_bound(q1, q2, d) with
// the left side exact in integers.
bool band_admits(std::uint64_t u, std::uint64_t v, std::uint64_t q1,
                 std::uint64_t q2, double d);

// Number of monotone lattice paths from (0,0) to (q1,q2) whose every visited
// cell stays strictly inside the band. Exact; requires q1 + q2 <= cutover.
boost::multiprecision::cpp_int banded_path_count(std::size_t q1, std::size_t q2,
                                                 double d);

// Exact binomial coefficient, used as the path total C(q1+q2, q1).
boost::multiprecision::cpp_int binomial(std::size_t n, std::size_t k);

// P(D >= d) under the uniform-interleaving null: 1 - A/C with A the banded
// path count. d <= 0 gives 1, d > 1 gives 0.
double exact_pvalue(std::size_t q1, std::size_t q2, double d);

enum class TailSeries {
    Kolmogorov,             // 2 sum_j (-1)^(j-1) exp(-2 j^2 x^2)
    LegacyFirstTerm,        // first term exp(-x^2), remainder as above
};

// Alternating tail series evaluated at the scaled statistic; terms below
// 1e-16 are dropped and the sum is clamped to [0, 1].
double kolmogorov_tail(double d_scaled, TailSeries series = TailSeries::Kolmogorov);

double scaled_statistic(std::size_t q1, std::size_t q2, double d_stat);

double asymptotic_pvalue(std::size_t q1, std::size_t q2, double d_stat,
                         TailSeries series = TailSeries::Kolmogorov);

// Pools the two strictly increasing sequences, relabels group membership
// n_perm times and counts statistics >= the observed one; returns
// (1 + hits) / (1 + n_perm). Ties across the pooled values raise TieError.
PermutationResult permutation_pvalue(std::span<const double> s1,
                                     std::span<const double> s2,
                                     std::uint64_t n_perm, std::uint64_t seed);

// Oracle: walks every monotone path (next_permutation over the step
// multiset) and tests each visited cell with band_admits. Intentionally
// independent of the recursion; capped at q1 + q2 <= 24 (ResourceError).
std::uint64_t enumerate_paths_bruteforce(std::size_t q1, std::size_t q2, double d);

}  // namespace latpath
