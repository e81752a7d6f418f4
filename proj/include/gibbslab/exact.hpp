// Exact computations on small systems: partition functions, pressure by
// enumeration and by transfer-matrix strips, exact pattern probabilities,
// mixing probes, entropy and relative entropy, and brute-force hitting laws
// with their moment tables. Everything here is an oracle: budget-guarded,
// deterministic, and independent of the Monte Carlo paths it checks.
#pragma once

#include <string>
#include <vector>

#include "gibbslab/model.hpp"

namespace gibbslab {

double log_partition_function(const Interaction& u, const Box& volume, const BoundaryCondition& zeta);

struct PressureEstimate {
    double value = 0.0;  // extrapolated P(U)
    std::string method;  // "enumeration-sequence" or "transfer-matrix-strip"
    // (size parameter, per-site value) pairs; for the enumeration sequence the
    // size is the box side n and the per-site value is log Z_{C_n}/(n+1)^d.
    std::vector<std::pair<int, double>> sequence;
    double residual = 0.0;  // |extrapolated - last raw value|
    bool converged = true;
    bool exact = false;  // single-site interactions evaluate in closed form
};

PressureEstimate pressure_enumeration(const Interaction& u, const std::vector<int>& sides);
PressureEstimate pressure_transfer_matrix(const Interaction& u, const std::vector<int>& widths);
// Picks the best available method for the interaction.
PressureEstimate pressure_auto(const Interaction& u);

struct ProbabilityBracket {
    double point = 0.0;  // torus value for Gibbs models, the closed form otherwise
    double lo = 0.0;
    double hi = 0.0;
    std::string method;
};

// Probability of the cylinder C(A). Gibbs models are evaluated exactly on a
// torus of side L >= n + 2R (default smallest within budget), bracketed by
// the finite-volume values under the constant and free boundary conditions.
ProbabilityBracket exact_pattern_probability(const Model& m, const Pattern& a, int torus_side = 0);

// Lower-bound probe of the mixing function phi(m): the maximum of
// |Pr(E1|E2) - Pr(E1)| / |A1| over full-cylinder events on the two boxes.
// The distance m is d(A1, A2); events with Pr(E2) = 0 are skipped.
double mixing_phi_probe(const Model& m, const Box& a1, const Box& a2, int torus_side = 0);

double box_l1_distance(const Box& a, const Box& b);

// Entropy per site. Closed form for product models; s = P(U) + E[f_U] with a
// torus-exact energy expectation for Gibbs models.
double model_entropy(const Model& m);
// s(Q|P) via the pressure identity P(U_P) + E_Q[f_{U_P}] - s(Q).
double relative_entropy(const Model& q, const Model& p);

// log sum over all n-patterns of Pr(A)^(1-q); the pattern-sum side of the
// cumulant identity.
double log_sum_pattern_prob_power(const Model& m, int n, double q);

struct HittingLawTable {
    Pattern pattern;
    int cap = 0;                            // K
    double log_prob_pattern = 0.0;          // log Pr(A)
    std::vector<double> prob;               // Pr(tau_A <= k), k = 0..K, |x| > 0
    std::vector<double> prob_with_origin;   // Pr(N_k >= 1), x = 0 included
    std::vector<double> mean_count;         // E N_k
    std::vector<double> second_moment;      // E (N_k)^2
    long long states_enumerated = 0;
};

// Exact law of the first occurrence within the window C_{K+n}, by full
// enumeration (product models weight window states directly; Gibbs models
// enumerate a surrounding torus).
HittingLawTable brute_force_hitting_law(const Model& m, const Pattern& a, int cap);

std::string hitting_law_csv(const HittingLawTable& t);
std::string hitting_law_json(const HittingLawTable& t, const Model& m);

// Min/max single-site conditional probability over all R-ball contexts;
// the surprisal constants of the Gibbs sandwich e^{-c'(n+1)^d} <= Pr(A)
// <= e^{-c(n+1)^d} are c = -log(max), c' = -log(min).
std::pair<double, double> conditional_probability_range(const Interaction& u);

}  // namespace gibbslab
