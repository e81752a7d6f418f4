// The observables of the theory on concrete configurations: first occurrence
// tau_A, occurrence counts N_k, first repetition R_n, waiting time W_n,
// badly-self-repeating pattern detection, the lambda parameter estimate, and
// the factorization diagnostic.
//
// All scans use the definition's conventions: placements at nonnegative x
// with max_i x_i <= k, the origin excluded (|x| > 0) unless a count is asked
// to include it. Scan order is increasing shells, lexicographic within a
// shell; only the minimum is observable but the order is fixed for
// reproducibility.
#pragma once

#include <optional>
#include <vector>

#include "gibbslab/exact.hpp"
#include "gibbslab/model.hpp"

namespace gibbslab {

struct HittingRecord {
    std::uint64_t pattern_hash = 0;
    long long value = 0;  // >= 1 when not censored
    bool censored = false;
    int cap = 0;
    std::uint64_t replica = 0;
};

// Minimal k <= cap with a match of A at some x, 0 <= x_i <= k, |x| > 0;
// nullopt when censored at the cap. The configuration must cover C_{cap+n}.
std::optional<long long> first_occurrence(const Pattern& a, const Configuration& sigma, long long cap);

// N_k^A: matching placements with 0 <= x_i <= k; x = 0 skipped unless
// include_origin.
long long count_occurrences(const Pattern& a, const Configuration& sigma, long long k, bool include_origin);

// R_n(sigma) = first occurrence of sigma's own initial n-pattern.
std::optional<long long> first_repetition(const Configuration& sigma, int n, long long cap);

// W_n(xi, sigma) = first occurrence of xi's initial n-pattern in sigma.
std::optional<long long> waiting_time(const Configuration& xi, const Configuration& sigma, int n, long long cap);

// True when some translate at 0 < |x| <= n/2 (all integer vectors, both
// signs) is consistent with the pattern on the overlap of C_n and C_n - x.
bool is_badly_self_repeating(const Pattern& a);

// Exact probability mass of the badly-self-repeating n-patterns by full
// pattern enumeration (budget-guarded).
double bad_pattern_mass(const Model& m, int n);

struct LambdaEstimate {
    double lambda = 0.0;
    long long t = 0;             // the integer scale used, t * Pr(A) <= 1/2
    double survival = 0.0;       // S(t^{1/d}) fed into the estimate
    double pattern_prob = 0.0;
};

// lambda_{A,t} = -log S / (t Pr(A)) from a survival value at threshold
// floor(t^{1/d}). Throws when the survival is 0 or 1 (uninformative at
// this t) or when t Pr(A) > 1/2.
LambdaEstimate lambda_from_survival(double survival_at_t, long long t, double pattern_prob, int dim);

// The default scale of the theory: f_A = floor(Pr(A)^{-gamma}).
long long lambda_default_scale(double pattern_prob, double gamma = 0.5);
// The largest integer scale inside the validity window t Pr(A) <= 1/2,
// where the finite-size placement-count distortion is smallest.
long long lambda_max_scale(double pattern_prob);

// lambda from an exact hitting-law table at the given integer scale.
LambdaEstimate lambda_from_table(const HittingLawTable& table, long long t, int dim);

struct FactorizationDiagnostic {
    double lhs = 0.0;  // empirical Pr(A absent from all k cubes)
    double rhs = 0.0;  // empirical Pr(A absent from one cube)^k
    double gap = 0.0;
    double ci = 0.0;   // 1.96-sigma propagated half width
    int cubes = 0;
    int separation = 0;
};

// Monte Carlo check of the factorization property: k disjoint cubes of side
// t_side at pairwise distance >= separation, all placed along the first axis.
// burn_in overrides the Gibbs sampler's default sweep count.
FactorizationDiagnostic factorization_diagnostic(const Model& m, const Pattern& a, int t_side, int separation,
                                                 int cubes, int replicas, std::uint64_t seed, int burn_in = -1);

}  // namespace gibbslab
