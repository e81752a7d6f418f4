#include "gibbslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace gibbslab {

namespace {

constexpr double kLambdaGuard = 0.25;  // conservative lower bound when sizing caps
constexpr int kPrePassReplicas = 200;
constexpr std::uint64_t kTagPattern = 0x70617401;
constexpr std::uint64_t kTagScan = 0x7363616e;
constexpr std::uint64_t kTagLambdaAux = 0x6c616d62;

bool product_model(const Model& m) { return m.has_closed_form_marginals(); }

SamplerSpec scan_spec(const Model& m, int extent, std::uint64_t seed, std::uint64_t replica,
                      std::uint64_t tag_salt = 0) {
    SamplerSpec s;
    s.domain_extent = extent;
    s.torus = !product_model(m);
    s.seed = mix64(seed ^ kTagScan ^ tag_salt);
    s.replica = replica;
    return s;
}

Pattern draw_pattern(const Model& m, int n, std::uint64_t seed, std::uint64_t replica) {
    if (product_model(m)) {
        SamplerSpec s;
        s.domain_extent = n + 1;
        s.torus = false;
        s.seed = mix64(seed ^ kTagPattern);
        s.replica = replica;
        return restrict_pattern(sample(m, s), n);
    }
    SamplerSpec s;
    s.domain_extent = n + 1 + 2 * std::max(m.interaction().range(), 1);
    s.torus = true;
    s.seed = mix64(seed ^ kTagPattern);
    s.replica = replica;
    return restrict_pattern(sample(m, s), n);
}

double pattern_log_prob_any(const Model& m, const Pattern& a) {
    if (product_model(m)) return m.pattern_log_prob(a);
    const auto br = exact_pattern_probability(m, a);
    return std::log(br.point);
}

struct CapPlan {
    long long cap = 0;
    int extent = 0;
    double log_pr_min_pre = 0.0;
};

// Sizes the scan window so a pattern drawn from q_source is found in a
// p_search sample before the cap except with probability ~exp(-tail_log),
// even for the rarest pattern seen in a pre-pass.
CapPlan plan_cap(const Model& q_source, const Model& p_search, int n, double tail_log, std::uint64_t seed) {
    const int d = p_search.dim();
    double lp_min = 0.0;
    for (int r = 0; r < kPrePassReplicas; ++r) {
        const Pattern a = draw_pattern(q_source, n, mix64(seed ^ 0xca9), static_cast<std::uint64_t>(r));
        lp_min = std::min(lp_min, pattern_log_prob_any(p_search, a));
    }
    CapPlan plan;
    plan.log_pr_min_pre = lp_min;
    const double kd = tail_log / (kLambdaGuard * std::exp(lp_min));
    plan.cap = static_cast<long long>(std::ceil(std::pow(kd, 1.0 / d)));
    const int margin = product_model(p_search) ? 0 : 2 * std::max(p_search.interaction().range(), 1);
    plan.extent = static_cast<int>(plan.cap) + n + 1 + margin;
    double sites = 1.0;
    for (int i = 0; i < d; ++i) sites *= static_cast<double>(plan.extent);
    if (sites > static_cast<double>(kMaxDomainSites)) {
        throw ValidationError("scan window infeasible: needs " + std::to_string(plan.extent) + "^" +
                              std::to_string(d) + " sites, budget " + std::to_string(kMaxDomainSites) +
                              "; largest feasible cap is ~" +
                              std::to_string(static_cast<long long>(
                                  std::floor(std::pow(static_cast<double>(kMaxDomainSites), 1.0 / d)))) );
    }
    return plan;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

std::string survival_curve_csv(const SurvivalCurve& c) {
    std::ostringstream os;
    os << "t,S,ci\n";
    os.precision(17);
    for (std::size_t i = 0; i < c.t.size(); ++i) os << c.t[i] << ',' << c.survival[i] << ',' << c.ci[i] << '\n';
    return os.str();
}

// ---- exponential law (occurrence) ------------------------------------------

ExpLawResult exponential_law_experiment(const Model& m, const Pattern& a, const ExpLawParams& p) {
    const int d = m.dim();
    const auto br = exact_pattern_probability(m, a);
    const double pr = br.point;
    if (!(pr > 0.0)) throw ValidationError("exponential law: pattern has zero probability");

    ExpLawResult out;
    out.pattern_hash = a.hash();
    out.target_provenance = "Pr(A) " + br.method + "; target exp(-t)";
    out.cap = static_cast<long long>(std::ceil(std::pow(p.t_max / (kLambdaGuard * pr), 1.0 / d)));
    const int margin = product_model(m) ? 0 : 2 * std::max(m.interaction().range(), 1);
    const int extent = static_cast<int>(out.cap) + a.side() + 1 + margin;
    double sites = 1.0;
    for (int i = 0; i < d; ++i) sites *= extent;
    if (sites > static_cast<double>(kMaxDomainSites))
        throw ValidationError("exponential law: scan window infeasible at this n and t_max");

    std::vector<long long> tau(static_cast<std::size_t>(p.replicas), -1);
    parallel_for(p.replicas, p.workers, [&](long long r) {
        const Configuration sigma = sample(m, scan_spec(m, extent, p.seed, static_cast<std::uint64_t>(r)));
        const auto v = first_occurrence(a, sigma, out.cap);
        tau[static_cast<std::size_t>(r)] = v ? *v : -1;
    });

    long long censored = 0;
    for (long long v : tau)
        if (v < 0) ++censored;
    const double mrep = static_cast<double>(p.replicas);
    const double censor_fraction = static_cast<double>(censored) / mrep;
    if (censor_fraction > 0.01)
        throw ValidationError("exponential law: censoring " + std::to_string(censor_fraction) + " exceeds 1%");

    auto survival_after = [&](long long k) {
        long long alive = 0;
        for (long long v : tau)
            if (v < 0 || v > k) ++alive;
        return static_cast<double>(alive) / mrep;
    };

    // lambda at the scale f_A = floor(Pr^-gamma), clamped into the validity window
    const long long f = std::min(lambda_default_scale(pr, p.lambda_gamma), lambda_max_scale(pr));
    const long long sf = static_cast<long long>(std::floor(std::pow(static_cast<double>(f), 1.0 / d)));
    if (p.lambda_one) {
        out.lambda.lambda = 1.0;
        out.lambda.t = f;
        out.lambda.pattern_prob = pr;
        out.lambda.survival = survival_after(sf);
    } else {
        out.lambda = lambda_from_survival(survival_after(sf), f, pr, d);
    }

    SurvivalCurve& curve = out.curve;
    curve.lambda = out.lambda.lambda;
    curve.pattern_prob = pr;
    curve.censor_fraction = censor_fraction;
    curve.t.push_back(0.0);
    curve.survival.push_back(1.0);
    curve.ci.push_back(0.0);
    out.sup_gap = 0.0;
    for (long long k = 1; k <= out.cap; ++k) {
        const double t = curve.lambda * pr * std::pow(static_cast<double>(k), d);
        if (t > p.t_max) break;
        const double s = survival_after(k);
        curve.t.push_back(t);
        curve.survival.push_back(s);
        curve.ci.push_back(1.96 * std::sqrt(std::max(s * (1.0 - s), 0.0) / mrep));
        out.sup_gap = std::max(out.sup_gap, std::abs(s - std::exp(-t)));
    }

    out.records.reserve(static_cast<std::size_t>(p.replicas));
    for (std::size_t r = 0; r < tau.size(); ++r) {
        HittingRecord rec;
        rec.pattern_hash = out.pattern_hash;
        rec.replica = r;
        rec.cap = static_cast<int>(out.cap);
        rec.censored = tau[r] < 0;
        rec.value = rec.censored ? out.cap : tau[r];
        out.records.push_back(rec);
    }
    return out;
}

// ---- repetition law ---------------------------------------------------------

namespace {

// Per-pattern lambda estimated from auxiliary occurrence draws; pure
// function of (model, pattern, seed, aux), cached under a lock.
class LambdaCache {
public:
    LambdaCache(const Model& m, std::uint64_t seed, int aux) : m_(m), seed_(seed), aux_(aux) {}

    double get(const Pattern& a, double log_pr) {
        const std::uint64_t h = a.hash();
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(h);
            if (it != cache_.end()) return it->second;
        }
        const double v = compute(a, log_pr);
        std::lock_guard<std::mutex> lock(mu_);
        cache_.emplace(h, v);
        return v;
    }

private:
    double compute(const Pattern& a, double log_pr) const {
        const int d = m_.dim();
        const double pr = std::exp(log_pr);
        const long long f = std::max<long long>(lambda_default_scale(pr), 1);
        const long long sf = std::max<long long>(
            static_cast<long long>(std::floor(std::pow(static_cast<double>(f), 1.0 / d))), 1);
        const int margin = product_model(m_) ? 0 : 2 * std::max(m_.interaction().range(), 1);
        const int extent = static_cast<int>(sf) + a.side() + 1 + margin;
        long long alive = 0;
        for (int r = 0; r < aux_; ++r) {
            const Configuration sigma =
                sample(m_, scan_spec(m_, extent, seed_ ^ kTagLambdaAux ^ a.hash(), static_cast<std::uint64_t>(r)));
            const auto v = first_occurrence(a, sigma, sf);
            if (!v) ++alive;
        }
        const double s = static_cast<double>(alive) / static_cast<double>(aux_);
        if (s <= 0.0 || s >= 1.0) return 1.0;  // uninformative at this scale
        return -std::log(s) / (static_cast<double>(f) * pr);
    }

    const Model& m_;
    std::uint64_t seed_;
    int aux_;
    mutable std::mutex mu_;
    std::map<std::uint64_t, double> cache_;
};

}  // namespace

RepetitionLawResult repetition_law_experiment(const Model& m, const RepetitionLawParams& p) {
    const int d = m.dim();
    const auto plan = plan_cap(m, m, p.n, p.t_max / kLambdaGuard + 9.0, p.seed);

    RepetitionLawResult out;
    out.cap = plan.cap;

    struct Row {
        double u = -1.0;        // rescaled repetition time, <0 = not usable
        double coverage = 0.0;  // rescaled cap
        bool bad = false;
        bool censored = false;
    };
    std::vector<Row> rows(static_cast<std::size_t>(p.replicas));
    LambdaCache lambdas(m, p.seed, p.lambda_aux_replicas);

    parallel_for(p.replicas, p.workers, [&](long long r) {
        Row& row = rows[static_cast<std::size_t>(r)];
        const Configuration sigma = sample(m, scan_spec(m, plan.extent, p.seed, static_cast<std::uint64_t>(r), 0x5e));
        const Pattern a = restrict_pattern(sigma, p.n);
        row.bad = is_badly_self_repeating(a);
        if (row.bad) return;
        const double lp = pattern_log_prob_any(m, a);
        const double pr = std::exp(lp);
        const double lambda = p.lambda_one ? 1.0 : lambdas.get(a, lp);
        row.coverage = lambda * pr * std::pow(static_cast<double>(plan.cap), d);
        const auto v = first_occurrence(a, sigma, plan.cap);
        if (!v) {
            row.censored = true;
            return;
        }
        row.u = lambda * pr * std::pow(static_cast<double>(*v), d);
    });

    long long bad = 0, censored = 0, good = 0;
    for (const auto& row : rows) {
        if (row.bad) {
            ++bad;
            continue;
        }
        ++good;
        if (row.censored) ++censored;
    }
    if (good == 0) throw ValidationError("repetition law: every sampled pattern was badly self-repeating");
    out.bad_fraction = static_cast<double>(bad) / static_cast<double>(p.replicas);
    out.good_replicas = good;

    const double pat_bits =
        std::pow(static_cast<double>(p.n) + 1.0, d) * std::log2(static_cast<double>(m.alphabet()));
    if (product_model(m) && pat_bits <= kEnumBudgetBits) out.bad_mass_exact = bad_pattern_mass(m, p.n);

    SurvivalCurve& curve = out.curve;
    curve.lambda = 1.0;
    curve.pattern_prob = std::exp(plan.log_pr_min_pre);
    curve.censor_fraction = static_cast<double>(censored) / static_cast<double>(good);
    if (curve.censor_fraction > 0.01)
        throw ValidationError("repetition law: censoring " + std::to_string(curve.censor_fraction) + " exceeds 1%");

    curve.t.push_back(0.0);
    curve.survival.push_back(1.0);
    curve.ci.push_back(0.0);
    out.sup_gap = 0.0;
    const int grid_points = 20;
    for (int g = 1; g <= grid_points; ++g) {
        const double t = p.t_max * static_cast<double>(g) / grid_points;
        long long alive = 0, usable = 0;
        for (const auto& row : rows) {
            if (row.bad || row.coverage < t) continue;
            ++usable;
            if (row.censored || row.u > t) ++alive;
        }
        if (usable == 0) break;
        const double s = static_cast<double>(alive) / static_cast<double>(usable);
        curve.t.push_back(t);
        curve.survival.push_back(s);
        curve.ci.push_back(1.96 * std::sqrt(std::max(s * (1.0 - s), 0.0) / static_cast<double>(usable)));
        out.sup_gap = std::max(out.sup_gap, std::abs(s - std::exp(-t)));
    }
    return out;
}

// ---- entropy via repetition -------------------------------------------------

namespace {

EstimatorRow estimator_row_from_logs(int n, int d, const std::vector<double>& dlogs, long long censored,
                                     long long cap) {
    EstimatorRow row;
    row.n = n;
    row.cap = cap;
    const double mrep = static_cast<double>(dlogs.size());
    CompensatedSum sum;
    for (double v : dlogs) sum.add(v);
    const double mean = sum.value() / mrep;
    double var = 0.0;
    for (double v : dlogs) var += (v - mean) * (v - mean);
    var /= std::max(1.0, mrep - 1.0);
    const double sites = std::pow(static_cast<double>(n) + 1.0, d);
    const double raw_cells = std::pow(static_cast<double>(n), d);
    row.estimate = mean / sites;
    row.estimate_raw = mean / raw_cells;
    row.ci = 1.96 * std::sqrt(var / mrep) / sites;
    row.censor_fraction = static_cast<double>(censored) / mrep;
    return row;
}

}  // namespace

EntropyViaRepetitionResult entropy_via_repetition(const Model& m, const EntropyViaRepetitionParams& p) {
    const int d = m.dim();
    EntropyViaRepetitionResult out;
    out.target = model_entropy(m);
    out.target_provenance = m.has_closed_form_entropy() ? "closed-form entropy" : "pressure + torus energy expectation";

    for (int n : p.n_range) {
        if (m.alphabet() == 1) {
            // degenerate single-symbol field repeats immediately
            EstimatorRow row;
            row.n = n;
            row.estimate = row.estimate_raw = 0.0;
            row.target = 0.0;
            row.target_provenance = "degenerate alphabet";
            out.rows.push_back(row);
            continue;
        }
        const auto plan = plan_cap(m, m, n, std::log(20.0 / p.max_censor), p.seed + static_cast<std::uint64_t>(n));
        std::vector<double> dlogs(static_cast<std::size_t>(p.replicas));
        std::vector<char> cens(static_cast<std::size_t>(p.replicas), 0);
        parallel_for(p.replicas, p.workers, [&](long long r) {
            const Configuration sigma =
                sample(m, scan_spec(m, plan.extent, p.seed + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)));
            const auto v = first_repetition(sigma, n, plan.cap);
            const long long rep = v ? *v : plan.cap;  // censored values take the cap (underestimates)
            cens[static_cast<std::size_t>(r)] = v ? 0 : 1;
            dlogs[static_cast<std::size_t>(r)] = d * std::log(static_cast<double>(rep));
        });
        long long censored = 0;
        for (char c : cens) censored += c;
        EstimatorRow row = estimator_row_from_logs(n, d, dlogs, censored, plan.cap);
        row.target = out.target;
        row.target_provenance = out.target_provenance;
        out.rows.push_back(row);
    }
    return out;
}

WaitingTimeResult waiting_time_experiment(const Model& q, const Model& p, const WaitingTimeParams& prm) {
    if (q.dim() != p.dim() || q.alphabet() != p.alphabet())
        throw ValidationError("waiting time experiment: models must share dimension and alphabet");
    const int d = p.dim();
    WaitingTimeResult out;
    const double sq = model_entropy(q);
    const double rel = relative_entropy(q, p);
    out.target = sq + rel;
    out.target_provenance = "s(Q) + s(Q|P) from the exact engine";

    for (int n : prm.n_range) {
        const auto plan = plan_cap(q, p, n, std::log(20.0 / prm.max_censor), prm.seed + static_cast<std::uint64_t>(n));
        std::vector<double> dlogs(static_cast<std::size_t>(prm.replicas));
        std::vector<char> cens(static_cast<std::size_t>(prm.replicas), 0);
        parallel_for(prm.replicas, prm.workers, [&](long long r) {
            const Pattern xi = draw_pattern(q, n, prm.seed + static_cast<std::uint64_t>(n) + 0x9111, static_cast<std::uint64_t>(r));
            const Configuration sigma = sample(
                p, scan_spec(p, plan.extent, prm.seed + static_cast<std::uint64_t>(n) + 0x7222, static_cast<std::uint64_t>(r)));
            const auto v = first_occurrence(xi, sigma, plan.cap);
            const long long w = v ? *v : plan.cap;
            cens[static_cast<std::size_t>(r)] = v ? 0 : 1;
            dlogs[static_cast<std::size_t>(r)] = d * std::log(static_cast<double>(w));
        });
        long long censored = 0;
        for (char c : cens) censored += c;
        EstimatorRow row = estimator_row_from_logs(n, d, dlogs, censored, plan.cap);
        row.target = out.target;
        row.target_provenance = out.target_provenance;
        out.rows.push_back(row);
    }
    return out;
}

// ---- CLT ---------------------------------------------------------------------

double kolmogorov_tail(double x) {
    if (x <= 0.0) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * s));
}

CltResult clt_experiment(const Model& m, const CltParams& p) {
    const int d = m.dim();
    CltResult out;

    // theta^2 from the pressure: second derivative of q -> P((1-q)U) at 0,
    // central differences with one Richardson refinement
    const auto g = [&](double q) { return pressure_auto(m.interaction().scaled(1.0 - q)).value; };
    const double h = p.fd_step;
    const double g0 = g(0.0);
    const double dh = (g(h) - 2.0 * g0 + g(-h)) / (h * h);
    const double dh2 = (g(h / 2) - 2.0 * g0 + g(-h / 2)) / (h * h / 4.0);
    out.theta2_target = (4.0 * dh2 - dh) / 3.0;
    out.theta2_residual = std::abs(out.theta2_target - dh2);
    out.target_provenance = "theta^2 by Richardson-refined central differences of the pressure";
    if (out.theta2_residual > 0.05 * std::max(std::abs(out.theta2_target), 1e-9) + 1e-9)
        throw ValidationError("clt: finite-difference theta^2 oracle did not stabilize");
    if (out.theta2_target < -1e-10) throw ValidationError("clt: negative theta^2 from the pressure oracle");

    std::vector<double> x(static_cast<std::size_t>(p.replicas));
    parallel_for(p.replicas, p.workers, [&](long long r) {
        const Pattern a = draw_pattern(m, p.n, p.seed, static_cast<std::uint64_t>(r));
        x[static_cast<std::size_t>(r)] = -pattern_log_prob_any(m, a);
    });
    CompensatedSum sum;
    for (double v : x) sum.add(v);
    const double mean = sum.value() / static_cast<double>(p.replicas);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(p.replicas - 1);
    const double sites = std::pow(static_cast<double>(p.n) + 1.0, d);
    const double cells = std::pow(static_cast<double>(p.n), d);
    out.sample_variance = var / sites;
    out.sample_variance_raw = var / cells;

    if (out.theta2_target > 1e-12) {
        const double theta = std::sqrt(out.theta2_target * sites);
        std::vector<double> sorted = x;
        std::sort(sorted.begin(), sorted.end());
        const double mrep = static_cast<double>(p.replicas);
        double dmax = 0.0;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            const double f = normal_cdf((sorted[i] - mean) / theta);
            dmax = std::max(dmax, std::abs(f - static_cast<double>(i + 1) / mrep));
            dmax = std::max(dmax, std::abs(f - static_cast<double>(i) / mrep));
        }
        out.ks_statistic = dmax;
        out.ks_pvalue = kolmogorov_tail(std::sqrt(mrep) * dmax);
    } else {
        out.ks_statistic = 0.0;
        out.ks_pvalue = 1.0;
    }
    return out;
}

// ---- LDP ----------------------------------------------------------------------

double cumulant_prediction(const Model& q_model, const Model& p_model, double q) {
    const Interaction& u = p_model.interaction();
    const double pu = pressure_auto(u).value;
    const bool same = q_model.content_hash() == p_model.content_hash();
    if (q < -1.0) {
        if (!same)
            throw ValidationError("cumulant prediction: the q < -1 plateau is only available for Q = P");
        return pressure_auto(u.scaled(2.0)).value - 2.0 * pu;
    }
    if (same) return pressure_auto(u.scaled(1.0 - q)).value + (q - 1.0) * pu;
    const Interaction& v = q_model.interaction();
    const double pv = pressure_auto(v).value;
    return pressure_auto(v.plus(u, -q)).value + (q - 1.0) * pv;
}

LdpResult ldp_cumulant(const Model& q_model, const Model& p_model, const LdpParams& p) {
    if (q_model.dim() != p_model.dim() || q_model.alphabet() != p_model.alphabet())
        throw ValidationError("ldp: models must share dimension and alphabet");
    const int d = p_model.dim();
    LdpResult out;
    out.pressure_u = pressure_auto(p_model.interaction()).value;
    out.pressure_2u = pressure_auto(p_model.interaction().scaled(2.0)).value;
    out.target_provenance = "pressures from the exact engine";
    {
        const double left = out.pressure_2u - 2.0 * out.pressure_u;  // q < -1 branch at -1
        const double right = pressure_auto(p_model.interaction().scaled(2.0)).value - 2.0 * out.pressure_u;
        out.continuity_gap_at_minus1 = std::abs(left - right);
    }

    double qd_max = 0.0;
    for (double q : p.q_grid) qd_max = std::max(qd_max, q);

    for (int n : p.n_range) {
        // tail heavy moments need extra headroom beyond censoring
        const double tail_log = 25.0 + 4.0 * std::max(0.0, qd_max) * d;
        const auto plan = plan_cap(q_model, p_model, n, tail_log, p.seed + static_cast<std::uint64_t>(n));
        std::vector<double> logw(static_cast<std::size_t>(p.replicas));
        std::vector<char> cens(static_cast<std::size_t>(p.replicas), 0);
        parallel_for(p.replicas, p.workers, [&](long long r) {
            const Pattern xi =
                draw_pattern(q_model, n, p.seed + static_cast<std::uint64_t>(n) + 0x1d01, static_cast<std::uint64_t>(r));
            const Configuration sigma = sample(
                p_model, scan_spec(p_model, plan.extent, p.seed + static_cast<std::uint64_t>(n) + 0x2d02,
                                   static_cast<std::uint64_t>(r)));
            const auto v = first_occurrence(xi, sigma, plan.cap);
            cens[static_cast<std::size_t>(r)] = v ? 0 : 1;
            logw[static_cast<std::size_t>(r)] = std::log(static_cast<double>(v ? *v : plan.cap));
        });
        CumulantCurve curve;
        curve.n = n;
        curve.cap = plan.cap;
        long long censored = 0;
        for (char c : cens) censored += c;
        curve.censor_fraction = static_cast<double>(censored) / static_cast<double>(p.replicas);

        const double sites = std::pow(static_cast<double>(n) + 1.0, d);
        const double cells = std::pow(static_cast<double>(n), d);
        for (double q : p.q_grid) {
            CumulantPoint pt;
            pt.q = q;
            LogSumExp acc;
            for (double lw : logw) acc.add(q * d * lw);
            const double log_mean = acc.value() - std::log(static_cast<double>(p.replicas));
            pt.empirical = log_mean / sites;
            pt.empirical_raw = log_mean / cells;
            pt.predicted = cumulant_prediction(q_model, p_model, q);
            pt.gap = std::abs(pt.empirical - pt.predicted);
            // the pattern-sum identity behind the q >= -1 branch
            if (q >= -1.0) {
                const double lhs = log_sum_pattern_prob_power(p_model, n, q) / sites;
                const double rhs = pressure_auto(p_model.interaction().scaled(1.0 - q)).value -
                                   (1.0 - q) * out.pressure_u;
                pt.pattern_sum_check = std::abs(lhs - rhs);
            }
            curve.points.push_back(pt);
        }
        out.curves.push_back(std::move(curve));
    }
    return out;
}

// ---- rate function --------------------------------------------------------------

namespace {

// Golden-section maximizer of a concave function on [lo, hi].
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol = 1e-11) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), e = a + gr * (b - a);
    double fc = f(c), fe = f(e);
    while (b - a > tol) {
        if (fc > fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + gr * (b - a);
            fe = f(e);
        }
    }
    const double q = (a + b) / 2;
    return {q, f(q)};
}

}  // namespace

RateFunctionResult rate_function(const Model& m, const RateFunctionParams& p) {
    RateFunctionResult out;
    out.entropy = model_entropy(m);
    out.target_provenance = "pressures from the exact engine; entropy " +
                            std::string(m.has_closed_form_entropy() ? "closed form" : "pressure identity");
    const double pu = pressure_auto(m.interaction()).value;
    auto w_of = [&](double q) { return pressure_auto(m.interaction().scaled(1.0 - q)).value + (q - 1.0) * pu; };
    const double q_lo = p.restrict_above_minus1 ? -1.0 + 1e-9 : p.q_lo;

    auto rate_at = [&](double u) {
        auto objective = [&](double q) { return u * q - w_of(q); };
        // coarse bracket, then golden section
        double best_q = q_lo, best_v = objective(q_lo);
        int rises_after_fall = 0;
        double prev = best_v;
        bool falling = false;
        const int steps = 160;
        for (int i = 1; i <= steps; ++i) {
            const double q = q_lo + (p.q_hi - q_lo) * i / steps;
            const double v = objective(q);
            if (v > best_v) {
                best_v = v;
                best_q = q;
            }
            if (v < prev - 1e-9) falling = true;
            if (falling && v > prev + 1e-9) {
                ++rises_after_fall;
                falling = false;
            }
            prev = v;
        }
        if (rises_after_fall > 0)
            throw ValidationError("rate function: objective not concave; refine the pressure grid");
        const double span = (p.q_hi - q_lo) / steps;
        const auto [qstar, vstar] = golden_max(objective, std::max(q_lo, best_q - span), std::min(p.q_hi, best_q + span));
        return std::make_pair(qstar, vstar);
    };

    std::vector<double> grid = p.u_grid;
    if (grid.empty()) {
        for (int i = -4; i <= 4; ++i) grid.push_back(out.entropy + 0.05 * i);
    }
    for (double u : grid) {
        const auto [qs, v] = rate_at(u);
        out.points.push_back({u, v, qs});
    }
    {
        const auto [qs, v] = rate_at(out.entropy);
        (void)qs;
        out.value_at_entropy = v;
    }
    // convexity in u on the grid
    for (std::size_t i = 1; i + 1 < out.points.size(); ++i) {
        const double second =
            out.points[i + 1].value - 2.0 * out.points[i].value + out.points[i - 1].value;
        if (second < -1e-9) out.convex_on_grid = false;
    }
    return out;
}

double cramer_rate_iid_surprisal(const std::vector<double>& probs, double u) {
    // sup_theta { theta u - log sum_a p_a^{1-theta} }, written directly from
    // the probability vector; independent of the pressure machinery
    auto objective = [&](double theta) {
        double s = 0.0;
        for (double p : probs) s += std::pow(p, 1.0 - theta);
        return theta * u - std::log(s);
    };
    double best_q = 0.0, best_v = objective(0.0);
    for (int i = -800; i <= 800; ++i) {
        const double theta = i * 0.05;
        const double v = objective(theta);
        if (v > best_v) {
            best_v = v;
            best_q = theta;
        }
    }
    const auto [qs, vs] = golden_max(objective, best_q - 0.05, best_q + 0.05);
    (void)qs;
    return vs;
}

std::vector<StrongApproxRow> strong_approximation_window(const Model& m, const std::vector<int>& n_range,
                                                         int replicas, double eps, std::uint64_t seed,
                                                         unsigned workers) {
    const int d = m.dim();
    std::vector<StrongApproxRow> out;
    for (int n : n_range) {
        if (n < 2) throw ValidationError("strong approximation window: n must be >= 2");
        const double lo = -eps * std::log(static_cast<double>(n));
        const double hi = std::log(eps * std::log(static_cast<double>(n)));
        // Classification needs no tail coverage: a repetition beyond
        // (e^hi / Pr)^(1/d) already certifies "outside the window", so the
        // cap is the upper edge for the rarest pre-pass pattern.
        double lp_min = 0.0;
        for (int r = 0; r < kPrePassReplicas; ++r) {
            const Pattern a = draw_pattern(m, n, mix64(seed ^ 0x5a0), static_cast<std::uint64_t>(r));
            lp_min = std::min(lp_min, pattern_log_prob_any(m, a));
        }
        const long long cap =
            static_cast<long long>(std::ceil(std::exp((hi - lp_min) / d))) + 1;
        const int margin = product_model(m) ? 0 : 2 * std::max(m.interaction().range(), 1);
        const int extent = static_cast<int>(cap) + n + 1 + margin;
        double sites = 1.0;
        for (int i = 0; i < d; ++i) sites *= static_cast<double>(extent);
        if (sites > 4.0 * static_cast<double>(kMaxDomainSites))
            throw ValidationError("strong approximation window: domain infeasible at n = " + std::to_string(n));
        std::vector<char> inside(static_cast<std::size_t>(replicas), 0);
        parallel_for(replicas, workers, [&](long long r) {
            const Configuration sigma =
                sample(m, scan_spec(m, extent, seed + static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)));
            const double lp = pattern_log_prob_any(m, restrict_pattern(sigma, n));
            const auto v = first_repetition(sigma, n, cap);
            if (!v) return;  // beyond the cap means above the upper edge
            const double x = d * std::log(static_cast<double>(*v)) + lp;
            inside[static_cast<std::size_t>(r)] = (x >= lo && x <= hi) ? 1 : 0;
        });
        long long count = 0;
        for (char c : inside) count += c;
        out.push_back({n, static_cast<double>(count) / static_cast<double>(replicas)});
    }
    return out;
}

}  // namespace gibbslab
