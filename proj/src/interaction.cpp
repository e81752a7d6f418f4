#include "gibbslab/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace gibbslab {

double InteractionTerm::oscillation() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : table) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

int InteractionTerm::l1_diameter() const {
    int diam = 0;
    for (const auto& a : shape)
        for (const auto& b : shape) diam = std::max(diam, (a - b).l1());
    return diam;
}

namespace {

InteractionTerm normalize_term(InteractionTerm t, int d, int alphabet) {
    if (t.shape.empty()) throw ValidationError("interaction term: empty shape");
    for (const auto& s : t.shape)
        if (s.dim() != d) throw ValidationError("interaction term: shape dimension mismatch");
    // shift so the lexicographically smallest site is the origin
    LatticeVector min_site = t.shape[0];
    for (const auto& s : t.shape)
        if (s < min_site) min_site = s;
    if (!min_site.is_zero()) {
        for (auto& s : t.shape) s = s - min_site;
    }
    std::set<std::string> seen;
    for (const auto& s : t.shape)
        if (!seen.insert(s.str()).second) throw ValidationError("interaction term: duplicate site in shape");
    const std::uint64_t want = ipow(static_cast<std::uint64_t>(alphabet), static_cast<unsigned>(t.shape.size()));
    if (t.table.size() != want) {
        throw ValidationError("interaction term: table has " + std::to_string(t.table.size()) +
                              " entries, expected " + std::to_string(want));
    }
    return t;
}

}  // namespace

Interaction::Interaction(int d, int alphabet, std::vector<InteractionTerm> terms)
    : d_(d), alphabet_(alphabet), terms_(std::move(terms)) {
    if (d < 1 || d > kMaxDim) throw ValidationError("interaction: dimension out of range");
    if (alphabet < 1) throw ValidationError("interaction: alphabet must have at least 1 symbol");
    for (auto& t : terms_) {
        t = normalize_term(std::move(t), d_, alphabet_);
        range_ = std::max(range_, t.l1_diameter());
    }
}

Interaction Interaction::scaled(double factor) const {
    std::vector<InteractionTerm> ts = terms_;
    for (auto& t : ts)
        for (auto& v : t.table) v *= factor;
    return Interaction(d_, alphabet_, std::move(ts));
}

Interaction Interaction::plus(const Interaction& other, double factor) const {
    if (other.d_ != d_ || other.alphabet_ != alphabet_)
        throw ValidationError("interaction sum: dimension or alphabet mismatch");
    std::vector<InteractionTerm> ts = terms_;
    for (auto t : other.terms_) {
        for (auto& v : t.table) v *= factor;
        ts.push_back(std::move(t));
    }
    return Interaction(d_, alphabet_, std::move(ts));
}

std::uint64_t Interaction::content_hash() const {
    std::uint64_t h = fnv1a_str("interaction");
    const int hdr[2] = {d_, alphabet_};
    h = fnv1a(hdr, sizeof hdr, h);
    for (const auto& t : terms_) {
        for (const auto& s : t.shape) h = fnv1a_str(s.str(), h);
        h = fnv1a(t.table.data(), t.table.size() * sizeof(double), h);
    }
    return h;
}

namespace {

// Reads a symbol from sigma inside the volume, else from the boundary.
Symbol read_symbol(const LatticeVector& site, const Box& volume, const Configuration& sigma,
                   const Configuration& zeta) {
    if (volume.contains(site)) return sigma.at(site);
    return zeta.at(site);
}

double eval_term(const InteractionTerm& t, int alphabet, const std::function<Symbol(const LatticeVector&)>& sym,
                 const LatticeVector& x) {
    std::size_t idx = 0;
    for (const auto& s : t.shape) idx = idx * static_cast<std::size_t>(alphabet) + sym(x + s);
    return t.table[idx];
}

}  // namespace

double hamiltonian(const Interaction& u, const Box& volume, const Configuration& sigma,
                   const BoundaryCondition& zeta) {
    if (volume.dim() != u.dim()) throw ValidationError("hamiltonian: dimension mismatch");
    if (!sigma.is_torus()) {
        if (!sigma.contains_box(volume)) throw ValidationError("hamiltonian: sigma does not cover the volume");
    }
    double h = 0.0;
    const int d = u.dim();
    for (const auto& t : u.terms()) {
        // placement bounding range per axis so the shape can meet the volume
        std::array<int, kMaxDim> maxoff{0, 0, 0};
        for (const auto& s : t.shape)
            for (int i = 0; i < d; ++i) maxoff[static_cast<std::size_t>(i)] = std::max(maxoff[static_cast<std::size_t>(i)], s[i]);
        LatticeVector lo = volume.origin;
        int span_side = 0;
        std::array<int, kMaxDim> spans{0, 0, 0};
        for (int i = 0; i < d; ++i) {
            lo[i] = volume.origin[i] - maxoff[static_cast<std::size_t>(i)];
            spans[static_cast<std::size_t>(i)] = volume.side + maxoff[static_cast<std::size_t>(i)];
            span_side = std::max(span_side, spans[static_cast<std::size_t>(i)]);
        }
        SiteIterator it(d, span_side);
        for (; !it.done(); it.advance()) {
            bool in_span = true;
            for (int i = 0; i < d; ++i)
                if ((*it)[i] > spans[static_cast<std::size_t>(i)]) in_span = false;
            if (!in_span) continue;
            const LatticeVector x = lo + *it;
            bool meets = false, leaves = false;
            for (const auto& s : t.shape) {
                if (volume.contains(x + s))
                    meets = true;
                else
                    leaves = true;
            }
            if (!meets) continue;
            if (zeta.free && leaves) continue;
            double e;
            if (zeta.free) {
                e = eval_term(t, u.alphabet(), [&](const LatticeVector& y) { return sigma.at(y); }, x);
            } else {
                e = eval_term(t, u.alphabet(),
                              [&](const LatticeVector& y) { return read_symbol(y, volume, sigma, *zeta.context); }, x);
            }
            h += e;
        }
    }
    return h;
}

double torus_energy(const Interaction& u, const Configuration& torus) {
    if (!torus.is_torus()) throw ValidationError("torus_energy: configuration is not a torus");
    if (torus.dim() != u.dim()) throw ValidationError("torus_energy: dimension mismatch");
    if (torus.extent() <= u.range()) {
        throw ValidationError("torus_energy: torus side must exceed the interaction range");
    }
    double h = 0.0;
    SiteIterator it(torus.dim(), torus.extent() - 1);
    for (; !it.done(); it.advance()) {
        for (const auto& t : u.terms()) {
            std::size_t idx = 0;
            for (const auto& s : t.shape) idx = idx * static_cast<std::size_t>(torus.alphabet()) + torus.at(*it + s);
            h += t.table[idx];
        }
    }
    return h;
}

double site_energy(const Interaction& u, const LatticeVector& site, Symbol sym, const Configuration& context) {
    double e = 0.0;
    for (const auto& t : u.terms()) {
        for (std::size_t anchor = 0; anchor < t.shape.size(); ++anchor) {
            const LatticeVector x = site - t.shape[anchor];
            std::size_t idx = 0;
            for (std::size_t k = 0; k < t.shape.size(); ++k) {
                const Symbol s = (k == anchor) ? sym : context.at(x + t.shape[k]);
                idx = idx * static_cast<std::size_t>(u.alphabet()) + s;
            }
            e += t.table[idx];
        }
    }
    return e;
}

std::vector<double> single_site_conditional(const Interaction& u, const LatticeVector& site,
                                            const Configuration& context) {
    const int q = u.alphabet();
    std::vector<double> energy(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) energy[static_cast<std::size_t>(a)] = site_energy(u, site, static_cast<Symbol>(a), context);
    const double emin = *std::min_element(energy.begin(), energy.end());
    std::vector<double> p(static_cast<std::size_t>(q));
    double z = 0.0;
    for (int a = 0; a < q; ++a) {
        p[static_cast<std::size_t>(a)] = std::exp(-(energy[static_cast<std::size_t>(a)] - emin));
        z += p[static_cast<std::size_t>(a)];
    }
    for (auto& v : p) v /= z;
    return p;
}

namespace {

// Sites of the l1 ball of radius r around the origin, origin excluded,
// lexicographic order.
std::vector<LatticeVector> l1_ball(int d, int r) {
    std::vector<LatticeVector> out;
    SiteIterator it(d, 2 * r);
    for (; !it.done(); it.advance()) {
        LatticeVector v = *it;
        for (int i = 0; i < d; ++i) v[i] -= r;
        if (!v.is_zero() && v.l1() <= r) out.push_back(v);
    }
    return out;
}

}  // namespace

double dobrushin_coefficient(const Interaction& u, const LatticeVector& y) {
    if (y.dim() != u.dim()) throw ValidationError("dobrushin_coefficient: dimension mismatch");
    if (y.is_zero()) throw ValidationError("dobrushin_coefficient: y must differ from the origin");
    const int r = u.range();
    if (y.l1() > r) return 0.0;
    const int d = u.dim();
    const int q = u.alphabet();

    std::vector<LatticeVector> ball = l1_ball(d, r);
    std::vector<LatticeVector> rest;  // ball sites other than y
    for (const auto& z : ball)
        if (z != y) rest.push_back(z);

    const double states = std::pow(static_cast<double>(q), static_cast<double>(rest.size()) + 2.0);
    if (states > static_cast<double>(1ull << kEnumBudgetBits)) {
        throw BudgetExceeded("dobrushin_coefficient: context enumeration exceeds 2^" +
                             std::to_string(kEnumBudgetBits));
    }

    Configuration ctx = Configuration::box(d, LatticeVector::of(std::vector<int>(static_cast<std::size_t>(d), -r)),
                                           2 * r + 1, q);
    double gamma = 0.0;
    std::vector<Symbol> assign(rest.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < rest.size(); ++i) ctx.set(rest[i], assign[i]);
        for (int a = 0; a < q; ++a) {
            ctx.set(y, static_cast<Symbol>(a));
            const auto pa = single_site_conditional(u, LatticeVector::zero(d), ctx);
            for (int b = a + 1; b < q; ++b) {
                ctx.set(y, static_cast<Symbol>(b));
                const auto pb = single_site_conditional(u, LatticeVector::zero(d), ctx);
                double tv = 0.0;
                for (int s = 0; s < q; ++s) tv += std::abs(pa[static_cast<std::size_t>(s)] - pb[static_cast<std::size_t>(s)]);
                gamma = std::max(gamma, 0.5 * tv);
            }
        }
        // mixed-radix increment
        std::size_t pos = 0;
        for (; pos < assign.size(); ++pos) {
            if (++assign[pos] < q) break;
            assign[pos] = 0;
        }
        if (pos == assign.size()) break;
        if (assign.empty()) break;
    }
    return gamma;
}

DobrushinReport check_dobrushin(const Interaction& u) {
    DobrushinReport rep;
    for (const auto& y : l1_ball(u.dim(), std::max(u.range(), 1))) {
        const double g = dobrushin_coefficient(u, y);
        if (g > 0.0) rep.row.emplace_back(y, g);
        rep.row_sum += g;
    }
    rep.satisfied = rep.row_sum < 1.0;
    return rep;
}

HighTemperatureReport check_high_temperature(const Interaction& u) {
    HighTemperatureReport rep;
    // Each term's shape passes through the origin once per anchor site, so
    // sum_{A∋0} (|A|-1) osc(U(A,.)) = sum_terms |S| (|S|-1) osc(table).
    for (const auto& t : u.terms()) {
        rep.lhs += static_cast<double>(t.arity()) * static_cast<double>(t.arity() - 1) * t.oscillation();
    }
    rep.satisfied = rep.lhs < 2.0;
    return rep;
}

double f_u(const Interaction& u, const Configuration& context) {
    double v = 0.0;
    for (const auto& t : u.terms()) {
        for (std::size_t anchor = 0; anchor < t.shape.size(); ++anchor) {
            const LatticeVector x = LatticeVector::zero(u.dim()) - t.shape[anchor];
            std::size_t idx = 0;
            for (const auto& s : t.shape) idx = idx * static_cast<std::size_t>(u.alphabet()) + context.at(x + s);
            v += t.table[idx] / static_cast<double>(t.arity());
        }
    }
    return v;
}

std::vector<LatticeVector> f_u_dependence_set(const Interaction& u) {
    std::vector<LatticeVector> sites;
    auto push_unique = [&](const LatticeVector& v) {
        for (const auto& w : sites)
            if (w == v) return;
        sites.push_back(v);
    };
    push_unique(LatticeVector::zero(u.dim()));
    for (const auto& t : u.terms()) {
        for (std::size_t anchor = 0; anchor < t.shape.size(); ++anchor) {
            const LatticeVector x = LatticeVector::zero(u.dim()) - t.shape[anchor];
            for (const auto& s : t.shape) push_unique(x + s);
        }
    }
    std::sort(sites.begin(), sites.end());
    return sites;
}

// ---- presets ------------------------------------------------------------

Interaction make_iid_interaction(int d, const std::vector<double>& p) {
    if (p.empty()) throw ValidationError("iid preset: need at least one symbol");
    double total = 0.0;
    for (double v : p) {
        if (v <= 0.0) throw ValidationError("iid preset: probabilities must be strictly positive");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("iid preset: probabilities must sum to 1");
    InteractionTerm t;
    t.shape = {LatticeVector::zero(d)};
    t.table.resize(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) t.table[a] = -std::log(p[a]);
    return Interaction(d, static_cast<int>(p.size()), {std::move(t)});
}

Interaction make_ising_interaction(int d, double beta, double coupling, double field) {
    auto spin = [](int a) { return 2.0 * a - 1.0; };
    std::vector<InteractionTerm> terms;
    for (int axis = 0; axis < d; ++axis) {
        LatticeVector e = LatticeVector::zero(d);
        e[axis] = 1;
        InteractionTerm bond;
        bond.shape = {LatticeVector::zero(d), e};
        bond.table.resize(4);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) bond.table[static_cast<std::size_t>(a * 2 + b)] = -beta * coupling * spin(a) * spin(b);
        terms.push_back(std::move(bond));
    }
    if (field != 0.0) {
        InteractionTerm site;
        site.shape = {LatticeVector::zero(d)};
        site.table = {-beta * field * spin(0), -beta * field * spin(1)};
        terms.push_back(std::move(site));
    }
    return Interaction(d, 2, std::move(terms));
}

Interaction make_potts_interaction(int d, double beta, double coupling, int states) {
    if (states < 2) throw ValidationError("potts preset: need at least two states");
    std::vector<InteractionTerm> terms;
    for (int axis = 0; axis < d; ++axis) {
        LatticeVector e = LatticeVector::zero(d);
        e[axis] = 1;
        InteractionTerm bond;
        bond.shape = {LatticeVector::zero(d), e};
        bond.table.assign(static_cast<std::size_t>(states) * static_cast<std::size_t>(states), 0.0);
        for (int a = 0; a < states; ++a) bond.table[static_cast<std::size_t>(a * states + a)] = -beta * coupling;
        terms.push_back(std::move(bond));
    }
    return Interaction(d, states, std::move(terms));
}

std::vector<double> markov_stationary(const std::vector<std::vector<double>>& transition) {
    const std::size_t q = transition.size();
    if (q < 2) throw ValidationError("markov preset: need at least two states");
    for (const auto& row : transition) {
        if (row.size() != q) throw ValidationError("markov preset: transition matrix must be square");
        double s = 0.0;
        for (double v : row) {
            if (v < 0.0) throw ValidationError("markov preset: negative transition probability");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-12) throw ValidationError("markov preset: rows must sum to 1 within 1e-12");
    }
    std::vector<double> pi(q, 1.0 / static_cast<double>(q));
    std::vector<double> next(q);
    for (int iter = 0; iter < 20000; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b) next[b] += pi[a] * transition[a][b];
        double diff = 0.0;
        for (std::size_t a = 0; a < q; ++a) diff += std::abs(next[a] - pi[a]);
        pi.swap(next);
        if (diff < 1e-15) break;
    }
    double s = 0.0;
    for (double v : pi) s += v;
    for (auto& v : pi) v /= s;
    return pi;
}

Interaction make_markov_product_interaction(const std::vector<std::vector<double>>& transition) {
    markov_stationary(transition);  // validates
    const int q = static_cast<int>(transition.size());
    const int d = 2;
    LatticeVector e = LatticeVector::zero(d);
    e[d - 1] = 1;  // chains run along the last (fastest) axis
    InteractionTerm pair;
    pair.shape = {LatticeVector::zero(d), e};
    pair.table.resize(static_cast<std::size_t>(q) * static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) {
        for (int b = 0; b < q; ++b) {
            const double m = transition[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
            pair.table[static_cast<std::size_t>(a * q + b)] =
                m > 0.0 ? -std::log(m) : std::numeric_limits<double>::infinity();
        }
    }
    return Interaction(d, q, {std::move(pair)});
}

}  // namespace gibbslab
