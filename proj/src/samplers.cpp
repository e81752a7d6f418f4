#include "gibbslab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gibbslab/interaction.hpp"

namespace gibbslab {

namespace {

constexpr std::uint64_t kTagIid = 0x11d5a301;
constexpr std::uint64_t kTagMarkov = 0x3a6b0001;
constexpr std::uint64_t kTagGlauber = 0x61a0b301;
constexpr std::uint64_t kTagPairQ = 0x9a17c601;
constexpr std::uint64_t kTagPairP = 0x9a17c602;

std::vector<double> cdf_of(const std::vector<double>& p) {
    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
}

Configuration sample_iid(const Model& m, const SamplerSpec& spec) {
    Configuration c = spec.torus ? Configuration::torus(m.dim(), spec.domain_extent, m.alphabet())
                                 : Configuration::cube(m.dim(), spec.domain_extent - 1, m.alphabet());
    Rng rng(spec.seed, spec.replica, kTagIid);
    const auto cdf = cdf_of(m.iid_probabilities());
    for (auto& s : c.values()) s = static_cast<Symbol>(rng.next_from_cdf(cdf));
    return c;
}

Configuration sample_markov(const Model& m, const SamplerSpec& spec) {
    if (m.dim() != 2) throw ValidationError("markov_product sampling requires d = 2");
    Configuration c = spec.torus ? Configuration::torus(2, spec.domain_extent, m.alphabet())
                                 : Configuration::cube(2, spec.domain_extent - 1, m.alphabet());
    Rng rng(spec.seed, spec.replica, kTagMarkov);
    const auto pi_cdf = cdf_of(m.stationary_distribution());
    std::vector<std::vector<double>> row_cdfs;
    for (const auto& row : m.transition_matrix()) row_cdfs.push_back(cdf_of(row));
    const int ext = spec.domain_extent;
    Symbol* data = c.data();
    for (int r = 0; r < ext; ++r) {
        Symbol cur = static_cast<Symbol>(rng.next_from_cdf(pi_cdf));
        data[static_cast<long long>(r) * ext] = cur;
        for (int col = 1; col < ext; ++col) {
            cur = static_cast<Symbol>(rng.next_from_cdf(row_cdfs[cur]));
            data[static_cast<long long>(r) * ext + col] = cur;
        }
    }
    return c;
}

}  // namespace

GlauberSampler::GlauberSampler(const Model& m, int torus_length, bool skip_uniqueness_check)
    : model_(m), length_(torus_length), state_(Configuration::torus(m.dim(), torus_length, m.alphabet())),
      scratch_(static_cast<std::size_t>(m.alphabet())) {
    if (torus_length <= m.interaction().range())
        throw ValidationError("glauber: torus side must exceed the interaction range");
    if (!skip_uniqueness_check) {
        const auto rep = check_dobrushin(m.interaction());
        if (!rep.satisfied) {
            throw ValidationError(
                "glauber: Dobrushin condition not satisfied (row sum " + std::to_string(rep.row_sum) +
                "); pass skip_uniqueness_check to proceed anyway");
        }
    } else {
        const auto rep = check_dobrushin(m.interaction());
        warned_ = !rep.satisfied;
    }

    const int d = m.dim();
    const long long sites = state_.site_count();
    site_placements_.resize(static_cast<std::size_t>(sites));
    SiteIterator it(d, length_ - 1);
    for (; !it.done(); it.advance()) {
        const LatticeVector& site = *it;
        long long site_flat = 0;
        for (int i = 0; i < d; ++i) site_flat = site_flat * length_ + site[i];
        auto& list = site_placements_[static_cast<std::size_t>(site_flat)];
        for (const auto& t : m.interaction().terms()) {
            for (std::size_t anchor = 0; anchor < t.shape.size(); ++anchor) {
                SitePlacement sp;
                sp.table = &t.table;
                std::size_t mult = 1;
                // shape sites from least significant; anchor contributes the
                // center multiplier
                for (std::size_t k = t.shape.size(); k-- > 0;) {
                    if (k == anchor) {
                        sp.center_mult = mult;
                    } else {
                        long long flat = 0;
                        for (int i = 0; i < d; ++i) {
                            int c = (site[i] - t.shape[anchor][i] + t.shape[k][i]) % length_;
                            if (c < 0) c += length_;
                            flat = flat * length_ + c;
                        }
                        sp.other_sites.emplace_back(flat, mult);
                    }
                    mult *= static_cast<std::size_t>(m.alphabet());
                }
                list.push_back(std::move(sp));
            }
        }
    }
}

void GlauberSampler::randomize(Rng& rng) {
    for (auto& s : state_.values()) s = static_cast<Symbol>(rng.next_below(static_cast<std::uint64_t>(model_.alphabet())));
}

void GlauberSampler::sweep(Rng& rng) {
    const int q = model_.alphabet();
    Symbol* data = state_.data();
    const long long sites = state_.site_count();
    for (long long site = 0; site < sites; ++site) {
        double emin = std::numeric_limits<double>::infinity();
        for (int a = 0; a < q; ++a) {
            double e = 0.0;
            for (const auto& sp : site_placements_[static_cast<std::size_t>(site)]) {
                std::size_t idx = static_cast<std::size_t>(a) * sp.center_mult;
                for (const auto& [flat, mult] : sp.other_sites) idx += static_cast<std::size_t>(data[flat]) * mult;
                e += (*sp.table)[idx];
            }
            scratch_[static_cast<std::size_t>(a)] = e;
            emin = std::min(emin, e);
        }
        double z = 0.0;
        for (int a = 0; a < q; ++a) {
            scratch_[static_cast<std::size_t>(a)] = std::exp(-(scratch_[static_cast<std::size_t>(a)] - emin));
            z += scratch_[static_cast<std::size_t>(a)];
        }
        double u = rng.next_double() * z;
        int chosen = q - 1;
        for (int a = 0; a + 1 < q; ++a) {
            u -= scratch_[static_cast<std::size_t>(a)];
            if (u < 0.0) {
                chosen = a;
                break;
            }
        }
        data[site] = static_cast<Symbol>(chosen);
    }
}

void GlauberSampler::run(Rng& rng, int sweeps) {
    for (int i = 0; i < sweeps; ++i) sweep(rng);
}

double GlauberSampler::current_energy() const { return torus_energy(model_.interaction(), state_); }

Configuration sample(const Model& m, const SamplerSpec& spec, SamplerMetadata* meta) {
    SamplerMetadata local;
    local.seed = spec.seed;
    local.replica = spec.replica;
    Configuration out = Configuration::cube(1, 0, 1);
    switch (m.kind()) {
        case ModelKind::Iid:
            local.method = "iid";
            out = sample_iid(m, spec);
            break;
        case ModelKind::MarkovProduct:
            local.method = "markov_product";
            out = sample_markov(m, spec);
            break;
        default: {
            local.method = "glauber";
            if (!spec.torus) throw ValidationError("glauber sampling runs on tori");
            GlauberSampler g(m, spec.domain_extent, spec.skip_uniqueness_check);
            local.warned_nonuniqueness = g.uniqueness_warning();
            Rng rng(spec.seed, spec.replica, kTagGlauber);
            g.randomize(rng);
            int burn = spec.burn_in_sweeps;
            if (burn < 0) burn = 100 * spec.domain_extent * spec.domain_extent;
            local.burn_in_sweeps = burn;
            local.warned_zero_burnin = burn == 0;
            // lag-1 energy autocorrelation over the burn-in trace
            std::vector<double> trace;
            trace.reserve(static_cast<std::size_t>(std::min(burn, 2048)));
            const int stride = std::max(1, burn / 2048);
            for (int i = 0; i < burn; ++i) {
                g.sweep(rng);
                if (i % stride == 0) trace.push_back(g.current_energy());
            }
            if (trace.size() > 3) {
                double mean = 0.0;
                for (double e : trace) mean += e;
                mean /= static_cast<double>(trace.size());
                double c0 = 0.0, c1 = 0.0;
                for (std::size_t i = 0; i < trace.size(); ++i) {
                    c0 += (trace[i] - mean) * (trace[i] - mean);
                    if (i + 1 < trace.size()) c1 += (trace[i] - mean) * (trace[i + 1] - mean);
                }
                local.energy_autocorr_lag1 = c0 > 0.0 ? c1 / c0 : 0.0;
            }
            out = g.state();
            break;
        }
    }
    if (meta) *meta = local;
    return out;
}

std::pair<Configuration, Configuration> sample_pair(const Model& q, const Model& p, const SamplerSpec& spec_q,
                                                    const SamplerSpec& spec_p, std::uint64_t master_seed,
                                                    std::uint64_t replica) {
    SamplerSpec sq = spec_q;
    SamplerSpec sp = spec_p;
    sq.seed = mix64(master_seed ^ kTagPairQ);
    sp.seed = mix64(master_seed ^ kTagPairP);
    sq.replica = replica;
    sp.replica = replica;
    return {sample(q, sq), sample(p, sp)};
}

}  // namespace gibbslab
