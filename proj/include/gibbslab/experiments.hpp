// Experiment drivers reproducing the limit laws at desk scale: the
// exponential law for occurrences and repetitions, entropy via repetition,
// waiting-time relative entropy, the CLT for pattern surprisals, the
// cumulant generating function of waiting times, and the Legendre-transform
// rate function.
//
// Every target value is produced by the exact engine or a closed form and
// carries a provenance string. Finite-n values are reported under two
// normalizations: the limit statement's 1/n^d and the per-site 1/(n+1)^d
// (the box C_n has (n+1)^d sites); headline comparisons use the per-site
// form, the raw form is always alongside.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/pattern_stats.hpp"
#include "gibbslab/samplers.hpp"

namespace gibbslab {

inline constexpr long long kMaxDomainSites = 1ll << 26;

struct SurvivalCurve {
    std::vector<double> t;
    std::vector<double> survival;
    std::vector<double> ci;  // 1.96-sigma binomial half widths
    double lambda = 1.0;
    double pattern_prob = 0.0;
    double censor_fraction = 0.0;
};

std::string survival_curve_csv(const SurvivalCurve& c);

// ---- exponential law (occurrence) ----------------------------------------

struct ExpLawParams {
    int n = 1;
    int replicas = 1000;
    double t_max = 4.0;
    std::uint64_t seed = 1;
    bool lambda_one = false;   // substitute lambda = 1 in the rescaling
    double lambda_gamma = 0.5; // scale exponent: t = floor(Pr^-gamma), clamped to t Pr <= 1/2
    unsigned workers = 1;
};

struct ExpLawResult {
    SurvivalCurve curve;
    double sup_gap = 0.0;  // sup_t |S(t) - e^{-t}| on the curve's grid
    LambdaEstimate lambda;
    long long cap = 0;
    std::uint64_t pattern_hash = 0;
    std::string target_provenance;
    std::vector<HittingRecord> records;
};

ExpLawResult exponential_law_experiment(const Model& m, const Pattern& a, const ExpLawParams& p);

// ---- exponential law (repetition, conditioned on good patterns) ----------

struct RepetitionLawParams {
    int n = 2;
    int replicas = 2000;
    double t_max = 4.0;
    std::uint64_t seed = 1;
    bool lambda_one = false;
    int lambda_aux_replicas = 400;  // per-pattern auxiliary draws for lambda
    unsigned workers = 1;
};

struct RepetitionLawResult {
    SurvivalCurve curve;  // pooled rescaled repetition times, good patterns
    double sup_gap = 0.0;
    double bad_fraction = 0.0;          // empirical share of bad initial patterns
    double bad_mass_exact = -1.0;       // exact mass when enumerable, else -1
    long long good_replicas = 0;
    long long cap = 0;
};

RepetitionLawResult repetition_law_experiment(const Model& m, const RepetitionLawParams& p);

// ---- entropy and waiting-time estimators ----------------------------------

struct EstimatorRow {
    int n = 0;
    double estimate = 0.0;       // per-site normalization d log T / (n+1)^d
    double estimate_raw = 0.0;   // the limit statement's d log T / n^d
    double ci = 0.0;             // 1.96-sigma half width of the mean
    double censor_fraction = 0.0;
    long long cap = 0;
    double target = 0.0;
    std::string target_provenance;
};

struct EntropyViaRepetitionParams {
    std::vector<int> n_range = {1, 2, 3};
    int replicas = 400;
    std::uint64_t seed = 1;
    double max_censor = 0.01;
    unsigned workers = 1;
};

struct EntropyViaRepetitionResult {
    std::vector<EstimatorRow> rows;
    double target = 0.0;
    std::string target_provenance;
};

EntropyViaRepetitionResult entropy_via_repetition(const Model& m, const EntropyViaRepetitionParams& p);

struct WaitingTimeParams {
    std::vector<int> n_range = {1, 2, 3};
    int replicas = 400;
    std::uint64_t seed = 1;
    double max_censor = 0.01;
    unsigned workers = 1;
};

struct WaitingTimeResult {
    std::vector<EstimatorRow> rows;
    double target = 0.0;  // s(Q) + s(Q|P)
    std::string target_provenance;
};

WaitingTimeResult waiting_time_experiment(const Model& q, const Model& p, const WaitingTimeParams& prm);

// ---- CLT -------------------------------------------------------------------

struct CltParams {
    int n = 12;
    int replicas = 2000;
    std::uint64_t seed = 1;
    double fd_step = 0.05;  // finite-difference step in q for the theta^2 oracle
    unsigned workers = 1;
};

struct CltResult {
    double sample_variance = 0.0;      // of (X - mean)/(n+1)^{d/2}
    double sample_variance_raw = 0.0;  // of (X - mean)/n^{d/2}
    double theta2_target = 0.0;
    double theta2_residual = 0.0;  // finite-difference refinement residual
    double ks_statistic = 0.0;     // vs Normal(0, theta2_target)
    double ks_pvalue = 1.0;
    std::string target_provenance;
};

// CLT for the pattern surprisal -log Pr(C(sigma_{C_n})), the strong-
// approximation proxy for d log W_n; theta^2 comes from the pressure by
// Richardson-refined central differences, never typed in.
CltResult clt_experiment(const Model& m, const CltParams& p);

// Kolmogorov asymptotic tail Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_tail(double x);

// ---- LDP: cumulants and rate function --------------------------------------

struct LdpParams {
    std::vector<double> q_grid = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
    std::vector<int> n_range = {4, 5, 6};
    int replicas = 2000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct CumulantPoint {
    double q = 0.0;
    double empirical = 0.0;      // (1/(n+1)^d) log mean W^{qd}
    double empirical_raw = 0.0;  // (1/n^d) log mean W^{qd}
    double predicted = 0.0;
    double gap = 0.0;
    double pattern_sum_check = 0.0;  // per-site log sum Pr^{1-q} minus its prediction
};

struct CumulantCurve {
    int n = 0;
    std::vector<CumulantPoint> points;
    double censor_fraction = 0.0;
    long long cap = 0;
};

struct LdpResult {
    std::vector<CumulantCurve> curves;  // one per n
    double pressure_u = 0.0;
    double pressure_2u = 0.0;
    double continuity_gap_at_minus1 = 0.0;
    std::string target_provenance;
};

LdpResult ldp_cumulant(const Model& q_model, const Model& p_model, const LdpParams& p);

// The waiting-time cumulant's pressure formula W(q).
double cumulant_prediction(const Model& q_model, const Model& p_model, double q);

struct RateFunctionParams {
    std::vector<double> u_grid;
    double q_lo = -6.0;
    double q_hi = 6.0;
    bool restrict_above_minus1 = false;  // the waiting-time tail variant
};

struct RatePoint {
    double u = 0.0;
    double value = 0.0;
    double maximizer_q = 0.0;
};

struct RateFunctionResult {
    std::vector<RatePoint> points;
    bool convex_on_grid = true;
    double entropy = 0.0;               // s(Pr), where I vanishes
    double value_at_entropy = 0.0;
    std::string target_provenance;
};

RateFunctionResult rate_function(const Model& m, const RateFunctionParams& p);

// Independent scalar oracle: the Cramer rate of the single-site surprisal
// of an iid model, computed from the probability vector alone.
double cramer_rate_iid_surprisal(const std::vector<double>& probs, double u);

// ---- strong approximation window ------------------------------------------

struct StrongApproxRow {
    int n = 0;
    double fraction_inside = 0.0;  // of log(R_n^d Pr) in [-eps log n, log log n^eps]
};
std::vector<StrongApproxRow> strong_approximation_window(const Model& m, const std::vector<int>& n_range,
                                                         int replicas, double eps, std::uint64_t seed,
                                                         unsigned workers);

}  // namespace gibbslab
