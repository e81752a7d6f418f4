#include "gibbslab/pattern_stats.hpp"

#include <algorithm>
#include <cmath>

#include "gibbslab/samplers.hpp"

namespace gibbslab {

namespace {

// Fast raw-pointer matcher for cube-at-origin box configurations (the scan
// domains used by all experiments). Falls back to the generic path otherwise.
struct Scanner {
    const Pattern& a;
    const Configuration& sigma;
    int d;
    int ext;
    int pside;
    const Symbol* cfg;
    const Symbol* pat;

    Scanner(const Pattern& a_, const Configuration& sigma_)
        : a(a_), sigma(sigma_), d(a_.dim()), ext(sigma_.extent()), pside(a_.side()),
          cfg(sigma_.data()), pat(a_.values().data()) {
        if (a.dim() != sigma.dim()) throw ValidationError("pattern scan: dimension mismatch");
        if (sigma.is_torus()) {
            // scans never wrap; the fundamental domain is the window
        } else if (!sigma.origin().is_zero()) {
            throw ValidationError("pattern scan: configuration must sit at the origin");
        }
    }

    bool matches(int x0, int x1, int x2) const {
        const int rowlen = pside + 1;
        if (d == 1) {
            return std::memcmp(cfg + x0, pat, static_cast<std::size_t>(rowlen)) == 0;
        }
        if (d == 2) {
            const Symbol* base = cfg + static_cast<long long>(x0) * ext + x1;
            for (int r = 0; r <= pside; ++r) {
                if (std::memcmp(base + static_cast<long long>(r) * ext, pat + static_cast<long long>(r) * rowlen,
                                static_cast<std::size_t>(rowlen)) != 0)
                    return false;
            }
            return true;
        }
        const Symbol* base = cfg + (static_cast<long long>(x0) * ext + x1) * ext + x2;
        for (int r1 = 0; r1 <= pside; ++r1)
            for (int r2 = 0; r2 <= pside; ++r2) {
                const long long coff = (static_cast<long long>(r1) * ext + r2) * ext;
                const long long poff = (static_cast<long long>(r1) * rowlen + r2) * rowlen;
                if (std::memcmp(base + coff, pat + poff, static_cast<std::size_t>(rowlen)) != 0) return false;
            }
        return true;
    }
};

}  // namespace

std::optional<long long> first_occurrence(const Pattern& a, const Configuration& sigma, long long cap) {
    const int d = a.dim();
    const long long need = cap + a.side();
    if (sigma.extent() <= need) {
        throw ValidationError("first_occurrence: domain too small for cap " + std::to_string(cap));
    }
    Scanner sc(a, sigma);
    // Shell k: placements with max_i x_i == k, lexicographic. A match in
    // shell k answers k since earlier shells were exhausted.
    for (long long k = 1; k <= cap; ++k) {
        if (d == 1) {
            if (sc.matches(static_cast<int>(k), 0, 0)) return k;
            continue;
        }
        if (d == 2) {
            const int kk = static_cast<int>(k);
            // x0 = k row: x1 = 0..k; then x1 = k column: x0 = 0..k-1
            for (int x1 = 0; x1 <= kk; ++x1)
                if (sc.matches(kk, x1, 0)) return k;
            for (int x0 = 0; x0 < kk; ++x0)
                if (sc.matches(x0, kk, 0)) return k;
            continue;
        }
        const int kk = static_cast<int>(k);
        for (int x0 = 0; x0 <= kk; ++x0)
            for (int x1 = 0; x1 <= kk; ++x1)
                for (int x2 = 0; x2 <= kk; ++x2) {
                    if (std::max({x0, x1, x2}) != kk) continue;
                    if (sc.matches(x0, x1, x2)) return k;
                }
    }
    return std::nullopt;
}

long long count_occurrences(const Pattern& a, const Configuration& sigma, long long k, bool include_origin) {
    const int d = a.dim();
    if (sigma.extent() <= k + a.side()) throw ValidationError("count_occurrences: domain too small");
    Scanner sc(a, sigma);
    long long count = 0;
    const int kk = static_cast<int>(k);
    if (d == 1) {
        for (int x0 = 0; x0 <= kk; ++x0)
            if (sc.matches(x0, 0, 0) && (include_origin || x0 != 0)) ++count;
        return count;
    }
    if (d == 2) {
        for (int x0 = 0; x0 <= kk; ++x0)
            for (int x1 = 0; x1 <= kk; ++x1)
                if (sc.matches(x0, x1, 0) && (include_origin || x0 != 0 || x1 != 0)) ++count;
        return count;
    }
    for (int x0 = 0; x0 <= kk; ++x0)
        for (int x1 = 0; x1 <= kk; ++x1)
            for (int x2 = 0; x2 <= kk; ++x2)
                if (sc.matches(x0, x1, x2) && (include_origin || x0 != 0 || x1 != 0 || x2 != 0)) ++count;
    return count;
}

std::optional<long long> first_repetition(const Configuration& sigma, int n, long long cap) {
    return first_occurrence(restrict_pattern(sigma, n), sigma, cap);
}

std::optional<long long> waiting_time(const Configuration& xi, const Configuration& sigma, int n, long long cap) {
    return first_occurrence(restrict_pattern(xi, n), sigma, cap);
}

bool is_badly_self_repeating(const Pattern& a) {
    const int n = a.side();
    const int d = a.dim();
    const int r = n / 2;  // integer x with 0 < |x| <= n/2
    if (r == 0) return false;
    SiteIterator it(d, 2 * r);
    for (; !it.done(); it.advance()) {
        LatticeVector x = *it;
        for (int i = 0; i < d; ++i) x[i] -= r;
        const int norm = x.l1();
        if (norm == 0 || norm > r) continue;
        // consistency of A with its x-translate on C_n ∩ (C_n - x)
        bool consistent = true;
        SiteIterator ys(d, n);
        for (; !ys.done() && consistent; ys.advance()) {
            const LatticeVector& y = *ys;
            bool shifted_inside = true;
            for (int i = 0; i < d; ++i) {
                const int c = y[i] + x[i];
                if (c < 0 || c > n) shifted_inside = false;
            }
            if (!shifted_inside) continue;
            if (a.at(y) != a.at(y + x)) consistent = false;
        }
        if (consistent) return true;
    }
    return false;
}

double bad_pattern_mass(const Model& m, int n) {
    const int d = m.dim();
    const long long sites = static_cast<long long>(ipow(static_cast<std::uint64_t>(n) + 1, static_cast<unsigned>(d)));
    require_enum_budget(m.alphabet(), sites, "bad_pattern_mass");
    if (!m.has_closed_form_marginals())
        throw ValidationError("bad_pattern_mass: exact masses need closed-form pattern probabilities");
    Pattern p(d, n, m.alphabet());
    double mass = 0.0;
    std::vector<Symbol>& v = p.values();
    for (;;) {
        if (is_badly_self_repeating(p)) mass += std::exp(m.pattern_log_prob(p));
        long long pos = sites - 1;
        for (; pos >= 0; --pos) {
            if (++v[static_cast<std::size_t>(pos)] < m.alphabet()) break;
            v[static_cast<std::size_t>(pos)] = 0;
        }
        if (pos < 0) break;
    }
    return mass;
}

LambdaEstimate lambda_from_survival(double survival_at_t, long long t, double pattern_prob, int dim) {
    (void)dim;
    if (t < 1) throw ValidationError("lambda estimate: t must be >= 1");
    if (static_cast<double>(t) * pattern_prob > 0.5 + 1e-12) {
        throw ValidationError("lambda estimate: t Pr(A) must be <= 1/2 (got " +
                              std::to_string(static_cast<double>(t) * pattern_prob) + ")");
    }
    if (!(survival_at_t > 0.0) || !(survival_at_t < 1.0)) {
        throw ValidationError("lambda estimate: survival is 0 or 1 at this t; pick a different scale");
    }
    LambdaEstimate est;
    est.t = t;
    est.survival = survival_at_t;
    est.pattern_prob = pattern_prob;
    est.lambda = -std::log(survival_at_t) / (static_cast<double>(t) * pattern_prob);
    return est;
}

long long lambda_default_scale(double pattern_prob, double gamma) {
    return static_cast<long long>(std::floor(std::pow(pattern_prob, -gamma)));
}

long long lambda_max_scale(double pattern_prob) {
    return static_cast<long long>(std::floor(0.5 / pattern_prob));
}

LambdaEstimate lambda_from_table(const HittingLawTable& table, long long t, int dim) {
    const long long threshold = static_cast<long long>(std::floor(std::pow(static_cast<double>(t), 1.0 / dim)));
    if (threshold > table.cap) throw ValidationError("lambda_from_table: table cap too small for t");
    const double p_le = threshold >= 0 ? table.prob[static_cast<std::size_t>(threshold)] : 0.0;
    return lambda_from_survival(1.0 - p_le, t, std::exp(table.log_prob_pattern), dim);
}

FactorizationDiagnostic factorization_diagnostic(const Model& m, const Pattern& a, int t_side, int separation,
                                                 int cubes, int replicas, std::uint64_t seed, int burn_in) {
    if (cubes < 1) throw ValidationError("factorization_diagnostic: need at least one cube");
    const int d = m.dim();
    // cubes staggered along axis 0 at pitch t_side + separation
    const int pitch = t_side + separation;
    const int extent0 = (cubes - 1) * pitch + t_side + 1;
    const int extent = std::max(extent0, t_side + 1);
    if (!m.has_closed_form_marginals() && m.interaction().range() > 0) {
        // Gibbs samples come from a torus with a safety margin
    }
    const int margin = 2 * std::max(m.interaction().range(), 0);

    long long absent_all = 0, absent_one = 0;
    for (int rep = 0; rep < replicas; ++rep) {
        SamplerSpec spec;
        spec.domain_extent = extent + margin;
        spec.torus = m.kind() != ModelKind::Iid && m.kind() != ModelKind::MarkovProduct;
        if (spec.torus) spec.domain_extent += 1;
        spec.seed = seed;
        spec.replica = static_cast<std::uint64_t>(rep);
        spec.burn_in_sweeps = burn_in;
        const Configuration sigma = sample(m, spec);
        bool all_absent = true;
        for (int c = 0; c < cubes; ++c) {
            LatticeVector origin = LatticeVector::zero(d);
            origin[0] = c * pitch;
            const Box cube{origin, t_side};
            const bool present = pattern_present(a, sigma, cube);
            if (c == 0 && !present) ++absent_one;
            if (present) all_absent = false;
        }
        if (all_absent) ++absent_all;
    }
    FactorizationDiagnostic out;
    out.cubes = cubes;
    out.separation = separation;
    const double mrep = static_cast<double>(replicas);
    out.lhs = static_cast<double>(absent_all) / mrep;
    const double p1 = static_cast<double>(absent_one) / mrep;
    out.rhs = std::pow(p1, cubes);
    out.gap = std::abs(out.lhs - out.rhs);
    const double var_lhs = out.lhs * (1.0 - out.lhs) / mrep;
    const double var_p1 = p1 * (1.0 - p1) / mrep;
    const double drhs = cubes * std::pow(p1, cubes - 1);
    out.ci = 1.96 * std::sqrt(var_lhs + drhs * drhs * var_p1);
    return out;
}

}  // namespace gibbslab
