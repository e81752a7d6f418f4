#include "gibbslab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace gibbslab {

namespace {

// A term placement compiled against a flat site enumeration: the table is
// indexed by const_index plus each variable site's symbol times its radix
// multiplier.
struct CompiledPlacement {
    const std::vector<double>* table = nullptr;
    std::vector<std::pair<long long, std::size_t>> var_sites;  // (flat index, multiplier)
    std::size_t const_index = 0;
};

double eval_placement(const CompiledPlacement& p, const Symbol* state) {
    std::size_t idx = p.const_index;
    for (const auto& [flat, mult] : p.var_sites) idx += static_cast<std::size_t>(state[flat]) * mult;
    return (*p.table)[idx];
}

// Placements of every term fully inside the box, sites flattened row-major.
std::vector<CompiledPlacement> compile_free_box(const Interaction& u, const Box& volume) {
    const int d = u.dim();
    const int ext = volume.side + 1;
    std::vector<CompiledPlacement> out;
    for (const auto& t : u.terms()) {
        std::array<int, kMaxDim> maxoff{0, 0, 0};
        for (const auto& s : t.shape)
            for (int i = 0; i < d; ++i) maxoff[static_cast<std::size_t>(i)] = std::max(maxoff[static_cast<std::size_t>(i)], s[i]);
        bool fits = true;
        for (int i = 0; i < d; ++i)
            if (maxoff[static_cast<std::size_t>(i)] > volume.side) fits = false;
        if (!fits) continue;
        SiteIterator it(d, volume.side);
        for (; !it.done(); it.advance()) {
            bool inside = true;
            for (int i = 0; i < d && inside; ++i)
                if ((*it)[i] + maxoff[static_cast<std::size_t>(i)] > volume.side) inside = false;
            if (!inside) continue;
            CompiledPlacement cp;
            cp.table = &t.table;
            std::size_t mult = 1;
            // shape sites in order, first most significant
            std::vector<long long> flats;
            for (const auto& s : t.shape) {
                long long flat = 0;
                for (int i = 0; i < d; ++i) flat = flat * ext + ((*it)[i] + s[i]);
                flats.push_back(flat);
            }
            for (std::size_t k = flats.size(); k-- > 0;) {
                cp.var_sites.emplace_back(flats[k], mult);
                mult *= static_cast<std::size_t>(u.alphabet());
            }
            out.push_back(std::move(cp));
        }
    }
    return out;
}

// Placements meeting the box under a fixed boundary; outside symbols fold
// into const_index.
std::vector<CompiledPlacement> compile_fixed_box(const Interaction& u, const Box& volume,
                                                 const Configuration& zeta) {
    const int d = u.dim();
    const int ext = volume.side + 1;
    std::vector<CompiledPlacement> out;
    for (const auto& t : u.terms()) {
        std::array<int, kMaxDim> maxoff{0, 0, 0};
        for (const auto& s : t.shape)
            for (int i = 0; i < d; ++i) maxoff[static_cast<std::size_t>(i)] = std::max(maxoff[static_cast<std::size_t>(i)], s[i]);
        std::array<int, kMaxDim> spans{0, 0, 0};
        int span_side = 0;
        for (int i = 0; i < d; ++i) {
            spans[static_cast<std::size_t>(i)] = volume.side + maxoff[static_cast<std::size_t>(i)];
            span_side = std::max(span_side, spans[static_cast<std::size_t>(i)]);
        }
        SiteIterator it(d, span_side);
        for (; !it.done(); it.advance()) {
            bool in_span = true;
            for (int i = 0; i < d; ++i)
                if ((*it)[i] > spans[static_cast<std::size_t>(i)]) in_span = false;
            if (!in_span) continue;
            LatticeVector x = volume.origin;
            for (int i = 0; i < d; ++i) x[i] = volume.origin[i] - maxoff[static_cast<std::size_t>(i)] + (*it)[i];
            bool meets = false;
            for (const auto& s : t.shape)
                if (volume.contains(x + s)) meets = true;
            if (!meets) continue;
            CompiledPlacement cp;
            cp.table = &t.table;
            std::size_t mult = 1;
            std::vector<std::pair<long long, bool>> flats;  // (flat or symbol, inside?)
            for (const auto& s : t.shape) {
                const LatticeVector site = x + s;
                if (volume.contains(site)) {
                    long long flat = 0;
                    for (int i = 0; i < d; ++i) flat = flat * ext + (site[i] - volume.origin[i]);
                    flats.emplace_back(flat, true);
                } else {
                    flats.emplace_back(zeta.at(site), false);
                }
            }
            for (std::size_t k = flats.size(); k-- > 0;) {
                if (flats[k].second)
                    cp.var_sites.emplace_back(flats[k].first, mult);
                else
                    cp.const_index += static_cast<std::size_t>(flats[k].first) * mult;
                mult *= static_cast<std::size_t>(u.alphabet());
            }
            out.push_back(std::move(cp));
        }
    }
    return out;
}

// Every placement on the torus, wrapped flat indices.
std::vector<CompiledPlacement> compile_torus(const Interaction& u, int length) {
    const int d = u.dim();
    if (length <= u.range()) throw ValidationError("torus enumeration: side must exceed interaction range");
    std::vector<CompiledPlacement> out;
    for (const auto& t : u.terms()) {
        SiteIterator it(d, length - 1);
        for (; !it.done(); it.advance()) {
            CompiledPlacement cp;
            cp.table = &t.table;
            std::size_t mult = 1;
            std::vector<long long> flats;
            for (const auto& s : t.shape) {
                long long flat = 0;
                for (int i = 0; i < d; ++i) {
                    int c = ((*it)[i] + s[i]) % length;
                    if (c < 0) c += length;
                    flat = flat * length + c;
                }
                flats.push_back(flat);
            }
            for (std::size_t k = flats.size(); k-- > 0;) {
                cp.var_sites.emplace_back(flats[k], mult);
                mult *= static_cast<std::size_t>(u.alphabet());
            }
            out.push_back(std::move(cp));
        }
    }
    return out;
}

double state_energy(const std::vector<CompiledPlacement>& placements, const Symbol* state) {
    double e = 0.0;
    for (const auto& p : placements) e += eval_placement(p, state);
    return e;
}

// Visits all q^n symbol vectors in mixed-radix order.
template <typename Fn>
void enumerate_states(int alphabet, long long sites, Fn&& fn) {
    std::vector<Symbol> state(static_cast<std::size_t>(sites), 0);
    for (;;) {
        fn(state);
        long long pos = sites - 1;
        for (; pos >= 0; --pos) {
            if (++state[static_cast<std::size_t>(pos)] < alphabet) break;
            state[static_cast<std::size_t>(pos)] = 0;
        }
        if (pos < 0) break;
    }
}

}  // namespace

double log_partition_function(const Interaction& u, const Box& volume, const BoundaryCondition& zeta) {
    if (volume.dim() != u.dim()) throw ValidationError("partition function: dimension mismatch");
    require_enum_budget(std::max(u.alphabet(), 2), volume.site_count(), "log_partition_function");
    const auto placements =
        zeta.free ? compile_free_box(u, volume) : compile_fixed_box(u, volume, *zeta.context);
    LogSumExp acc;
    enumerate_states(u.alphabet(), volume.site_count(),
                     [&](const std::vector<Symbol>& s) { acc.add(-state_energy(placements, s.data())); });
    return acc.value();
}

namespace {

bool single_site_only(const Interaction& u) {
    for (const auto& t : u.terms())
        if (t.arity() != 1) return false;
    return true;
}

double single_site_pressure(const Interaction& u) {
    // log sum_a exp(-u(a)) with all single-site tables combined
    std::vector<double> e(static_cast<std::size_t>(u.alphabet()), 0.0);
    for (const auto& t : u.terms())
        for (int a = 0; a < u.alphabet(); ++a) e[static_cast<std::size_t>(a)] += t.table[static_cast<std::size_t>(a)];
    LogSumExp acc;
    for (double v : e) acc.add(-v);
    return acc.value();
}

}  // namespace

PressureEstimate pressure_enumeration(const Interaction& u, const std::vector<int>& sides) {
    PressureEstimate est;
    est.method = "enumeration-sequence";
    if (single_site_only(u)) {
        est.value = single_site_pressure(u);
        est.exact = true;
        est.sequence.emplace_back(0, est.value);
        return est;
    }
    if (sides.size() < 2) throw ValidationError("pressure_enumeration: need at least two sides");
    for (int n : sides) {
        const Box cn = Box::cube(u.dim(), n);
        const double logz = log_partition_function(u, cn, BoundaryCondition::Free());
        est.sequence.emplace_back(n, logz / static_cast<double>(cn.site_count()));
    }
    // per-site values behave like P + c/L with L = n+1; eliminate the surface
    // term with the last two sizes
    const auto [n1, p1] = est.sequence[est.sequence.size() - 2];
    const auto [n2, p2] = est.sequence[est.sequence.size() - 1];
    const double l1 = n1 + 1, l2 = n2 + 1;
    est.value = (l2 * p2 - l1 * p1) / (l2 - l1);
    est.residual = std::abs(est.value - p2);
    est.converged = est.residual < 0.1;
    return est;
}

namespace {

// Transfer matrix for a strip of width w: columns are along the last axis,
// transfer runs along axis 0. Terms must fit in two adjacent columns.
struct StripTransfer {
    int q = 2;
    int w = 1;
    std::size_t states = 1;
    std::vector<double> intra;  // energy of a column (single-site + intra-column terms)
    // inter-column terms: table evaluated from (prev column, next column)
    struct InterTerm {
        const std::vector<double>* table;
        std::vector<std::pair<int, int>> sites;  // (column: 0 prev / 1 next, row offset)
        std::vector<int> row_anchor;             // base rows where the placement fits
    };
    std::vector<const InteractionTerm*> inter_terms;
};

double strip_log_lambda(const Interaction& u, int w) {
    const int d = u.dim();
    const int q = u.alphabet();
    if (d == 1) {
        // degenerate strip: q x q transfer matrix over single sites
        std::vector<double> site_e(static_cast<std::size_t>(q), 0.0);
        std::vector<double> pair_e(static_cast<std::size_t>(q) * static_cast<std::size_t>(q), 0.0);
        for (const auto& t : u.terms()) {
            if (t.arity() == 1) {
                for (int a = 0; a < q; ++a) site_e[static_cast<std::size_t>(a)] += t.table[static_cast<std::size_t>(a)];
            } else if (t.arity() == 2 && t.shape[1][0] == 1) {
                for (int a = 0; a < q; ++a)
                    for (int b = 0; b < q; ++b)
                        pair_e[static_cast<std::size_t>(a * q + b)] += t.table[static_cast<std::size_t>(a * q + b)];
            } else {
                throw ValidationError("transfer matrix: 1d interactions must be nearest-neighbour");
            }
        }
        std::vector<double> v(static_cast<std::size_t>(q), 1.0);
        double lambda = 0.0;
        for (int iter = 0; iter < 500; ++iter) {
            std::vector<double> nv(static_cast<std::size_t>(q), 0.0);
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b)
                    nv[static_cast<std::size_t>(b)] += v[static_cast<std::size_t>(a)] *
                        std::exp(-(pair_e[static_cast<std::size_t>(a * q + b)] + site_e[static_cast<std::size_t>(b)]));
            double norm = 0.0;
            for (double x : nv) norm += x;
            lambda = norm;
            for (auto& x : nv) x /= norm;
            double diff = 0.0;
            for (int a = 0; a < q; ++a) diff += std::abs(nv[static_cast<std::size_t>(a)] - v[static_cast<std::size_t>(a)]);
            v.swap(nv);
            if (diff < 1e-15 && iter > 3) break;
        }
        return std::log(lambda);
    }

    if (d != 2) throw ValidationError("transfer matrix: only d = 1 and d = 2 strips are supported");
    const double bits = static_cast<double>(w) * std::log2(static_cast<double>(q));
    if (bits > 12) throw BudgetExceeded("transfer matrix: |A|^w exceeds 2^12");
    const std::size_t states = ipow(static_cast<std::uint64_t>(q), static_cast<unsigned>(w));

    // classify terms: axis-0 span 0 -> intra-column, span 1 -> inter-column
    struct Cell {
        const std::vector<double>* table;
        std::vector<std::pair<int, int>> offs;  // (axis0 in {0,1}, axis1 offset)
    };
    std::vector<Cell> intra_cells, inter_cells;
    for (const auto& t : u.terms()) {
        int span0 = 0, min1 = 0, max1 = 0;
        for (const auto& s : t.shape) {
            span0 = std::max(span0, s[0]);
            min1 = std::min(min1, s[1]);
            max1 = std::max(max1, s[1]);
        }
        if (span0 > 1) throw ValidationError("transfer matrix: term spans more than two columns");
        if (max1 - min1 >= w) throw ValidationError("transfer matrix: term taller than strip width");
        Cell c;
        c.table = &t.table;
        for (const auto& s : t.shape) c.offs.emplace_back(s[0], s[1]);
        (span0 == 0 ? intra_cells : inter_cells).push_back(std::move(c));
    }

    // decode column states once
    std::vector<std::vector<Symbol>> cols(states, std::vector<Symbol>(static_cast<std::size_t>(w)));
    for (std::size_t c = 0; c < states; ++c) {
        std::size_t rem = c;
        for (int r = w - 1; r >= 0; --r) {
            cols[c][static_cast<std::size_t>(r)] = static_cast<Symbol>(rem % static_cast<std::size_t>(q));
            rem /= static_cast<std::size_t>(q);
        }
    }
    auto cell_energy = [&](const Cell& cell, const std::vector<Symbol>& prev, const std::vector<Symbol>& next) {
        double e = 0.0;
        int maxoff = 0;
        for (const auto& [ax0, off1] : cell.offs) {
            (void)ax0;
            maxoff = std::max(maxoff, off1);
        }
        for (int r = 0; r + maxoff < w; ++r) {
            std::size_t idx = 0;
            for (const auto& [ax0, off1] : cell.offs) {
                const auto& col = ax0 == 0 ? prev : next;
                idx = idx * static_cast<std::size_t>(q) + col[static_cast<std::size_t>(r + off1)];
            }
            e += (*cell.table)[idx];
        }
        return e;
    };

    std::vector<double> intra(states, 0.0);
    for (std::size_t c = 0; c < states; ++c) {
        for (const auto& cell : intra_cells) intra[c] += cell_energy(cell, cols[c], cols[c]);
    }

    std::vector<double> v(states, 1.0 / static_cast<double>(states));
    double lambda = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<double> nv(states, 0.0);
        for (std::size_t cprev = 0; cprev < states; ++cprev) {
            if (v[cprev] == 0.0) continue;
            for (std::size_t cnext = 0; cnext < states; ++cnext) {
                double e = intra[cnext];
                for (const auto& cell : inter_cells) e += cell_energy(cell, cols[cprev], cols[cnext]);
                nv[cnext] += v[cprev] * std::exp(-e);
            }
        }
        double norm = 0.0;
        for (double x : nv) norm += x;
        lambda = norm;
        double diff = 0.0;
        for (std::size_t c = 0; c < states; ++c) {
            nv[c] /= norm;
            diff += std::abs(nv[c] - v[c]);
        }
        v.swap(nv);
        if (diff < 1e-14 && iter > 3) break;
    }
    return std::log(lambda);
}

}  // namespace

PressureEstimate pressure_transfer_matrix(const Interaction& u, const std::vector<int>& widths) {
    PressureEstimate est;
    est.method = "transfer-matrix-strip";
    if (single_site_only(u)) {
        est.value = single_site_pressure(u);
        est.exact = true;
        est.sequence.emplace_back(1, est.value);
        return est;
    }
    if (u.dim() == 1) {
        est.value = strip_log_lambda(u, 1);
        est.exact = true;
        est.sequence.emplace_back(1, est.value);
        return est;
    }
    if (widths.size() < 2) throw ValidationError("pressure_transfer_matrix: need at least two widths");
    for (int w : widths) {
        const double ll = strip_log_lambda(u, w);
        est.sequence.emplace_back(w, ll / static_cast<double>(w));
    }
    const auto [w1, p1] = est.sequence[est.sequence.size() - 2];
    const auto [w2, p2] = est.sequence[est.sequence.size() - 1];
    est.value = (w2 * p2 - w1 * p1) / static_cast<double>(w2 - w1);
    est.residual = std::abs(est.value - p2);
    est.converged = est.residual < 0.05;
    return est;
}

PressureEstimate pressure_auto(const Interaction& u) {
    if (single_site_only(u)) return pressure_enumeration(u, {0, 1});
    if (u.dim() == 1) return pressure_transfer_matrix(u, {1});
    if (u.dim() == 2 && u.range() <= 1) {
        const int q = u.alphabet();
        int wmax = 2;
        while (std::pow(static_cast<double>(q), wmax + 1) <= 1024.0) ++wmax;
        return pressure_transfer_matrix(u, {wmax - 2, wmax - 1, wmax});
    }
    // fall back to the enumeration sequence within budget
    std::vector<int> sides;
    for (int n = 1; n <= 6; ++n) {
        const double bits = std::pow(static_cast<double>(n) + 1, u.dim()) * std::log2(static_cast<double>(u.alphabet()));
        if (bits <= kEnumBudgetBits) sides.push_back(n);
    }
    if (sides.size() < 2) throw BudgetExceeded("pressure_auto: no two box sizes fit the enumeration budget");
    return pressure_enumeration(u, sides);
}

namespace {

int default_torus_side(const Model& m, int n) {
    const int need = n + 2 * std::max(m.interaction().range(), 1);
    int best = -1;
    for (int L = need; L <= need + 8; ++L) {
        const double bits = std::pow(static_cast<double>(L), m.dim()) * std::log2(static_cast<double>(m.alphabet()));
        if (bits <= kEnumBudgetBits) best = L;
    }
    if (best < 0)
        throw BudgetExceeded("exact Gibbs computation: smallest admissible torus exceeds the enumeration budget");
    return best;
}

// Exact marginal of the window pattern at the origin of a torus.
double torus_pattern_probability(const Model& m, const Pattern& a, int length) {
    require_enum_budget(m.alphabet(), static_cast<long long>(std::llround(std::pow(length, m.dim()))),
                        "torus_pattern_probability");
    const auto placements = compile_torus(m.interaction(), length);
    const long long sites = static_cast<long long>(std::llround(std::pow(length, m.dim())));
    // flat indices of the window C_n inside the torus
    std::vector<long long> window;
    SiteIterator it(a.dim(), a.side());
    for (; !it.done(); it.advance()) {
        long long flat = 0;
        for (int i = 0; i < a.dim(); ++i) flat = flat * length + (*it)[i];
        window.push_back(flat);
    }
    LogSumExp num, den;
    enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
        const double e = -state_energy(placements, s.data());
        den.add(e);
        bool match = true;
        std::size_t wi = 0;
        for (const auto& v : a.values()) {
            if (s[static_cast<std::size_t>(window[wi++])] != v) {
                match = false;
                break;
            }
        }
        if (match) num.add(e);
    });
    if (num.count() == 0) return 0.0;
    return std::exp(num.value() - den.value());
}

// Marginal under the finite-volume measure on [-pad, n+pad]^d with the given
// boundary condition.
double finite_volume_pattern_probability(const Model& m, const Pattern& a, int pad,
                                         const BoundaryCondition& bc) {
    const int d = m.dim();
    std::vector<int> lo(static_cast<std::size_t>(d), -pad);
    const Box volume{LatticeVector::of(lo), a.side() + 2 * pad};
    require_enum_budget(m.alphabet(), volume.site_count(), "finite_volume_pattern_probability");
    const auto placements = bc.free ? compile_free_box(m.interaction(), volume)
                                    : compile_fixed_box(m.interaction(), volume, *bc.context);
    const int ext = volume.side + 1;
    std::vector<long long> window;
    SiteIterator it(d, a.side());
    for (; !it.done(); it.advance()) {
        long long flat = 0;
        for (int i = 0; i < d; ++i) flat = flat * ext + ((*it)[i] + pad);
        window.push_back(flat);
    }
    LogSumExp num, den;
    enumerate_states(m.alphabet(), volume.site_count(), [&](const std::vector<Symbol>& s) {
        const double e = -state_energy(placements, s.data());
        den.add(e);
        bool match = true;
        std::size_t wi = 0;
        for (const auto& v : a.values()) {
            if (s[static_cast<std::size_t>(window[wi++])] != v) {
                match = false;
                break;
            }
        }
        if (match) num.add(e);
    });
    if (num.count() == 0) return 0.0;
    return std::exp(num.value() - den.value());
}

}  // namespace

ProbabilityBracket exact_pattern_probability(const Model& m, const Pattern& a, int torus_side) {
    ProbabilityBracket out;
    if (m.has_closed_form_marginals()) {
        out.point = std::exp(m.pattern_log_prob(a));
        out.lo = out.hi = out.point;
        out.method = "closed-form";
        return out;
    }
    const int L = torus_side > 0 ? torus_side : default_torus_side(m, a.side());
    if (L < a.side() + 2 * m.interaction().range())
        throw ValidationError("exact_pattern_probability: torus side must be >= n + 2R");
    out.point = torus_pattern_probability(m, a, L);
    out.method = "torus-enumeration(L=" + std::to_string(L) + ")";
    // bracket from the constant boundary conditions and the free one on the
    // padded box; exact extremes for attractive interactions
    const int pad = std::max(m.interaction().range(), 1);
    out.lo = std::numeric_limits<double>::infinity();
    out.hi = -std::numeric_limits<double>::infinity();
    const int d = m.dim();
    const int ann_ext = a.side() + 2 * pad + 1 + 2 * m.interaction().range() + 2;
    std::vector<int> ann_lo(static_cast<std::size_t>(d), -pad - m.interaction().range() - 1);
    for (int sym = 0; sym < m.alphabet(); ++sym) {
        Configuration ctx = Configuration::box(d, LatticeVector::of(ann_lo), ann_ext, m.alphabet());
        std::fill(ctx.values().begin(), ctx.values().end(), static_cast<Symbol>(sym));
        const double p = finite_volume_pattern_probability(m, a, pad, BoundaryCondition::Fixed(std::move(ctx)));
        out.lo = std::min(out.lo, p);
        out.hi = std::max(out.hi, p);
    }
    const double pfree = finite_volume_pattern_probability(m, a, pad, BoundaryCondition::Free());
    out.lo = std::min(out.lo, pfree);
    out.hi = std::max(out.hi, pfree);
    return out;
}

double box_l1_distance(const Box& a, const Box& b) {
    double dist = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const int alo = a.origin[i], ahi = a.origin[i] + a.side;
        const int blo = b.origin[i], bhi = b.origin[i] + b.side;
        if (bhi < alo)
            dist += alo - bhi;
        else if (ahi < blo)
            dist += blo - ahi;
    }
    return dist;
}

namespace {

std::vector<LatticeVector> box_sites(const Box& b) {
    std::vector<LatticeVector> out;
    SiteIterator it(b.dim(), b.side);
    for (; !it.done(); it.advance()) out.push_back(b.origin + *it);
    return out;
}

// Joint distribution over (cylinder on A1, cylinder on A2) as a dense table.
std::vector<double> joint_cylinder_distribution(const Model& m, const Box& a1, const Box& a2, int torus_side) {
    const auto s1 = box_sites(a1);
    const auto s2 = box_sites(a2);
    const std::size_t n1 = ipow(static_cast<std::uint64_t>(m.alphabet()), static_cast<unsigned>(s1.size()));
    const std::size_t n2 = ipow(static_cast<std::uint64_t>(m.alphabet()), static_cast<unsigned>(s2.size()));
    std::vector<double> joint(n1 * n2, 0.0);

    if (m.kind() == ModelKind::Iid) {
        const auto& p = m.iid_probabilities();
        auto word_prob = [&](std::size_t idx, std::size_t len) {
            double pr = 1.0;
            for (std::size_t k = 0; k < len; ++k) {
                pr *= p[idx % p.size()];
                idx /= p.size();
            }
            return pr;
        };
        for (std::size_t i = 0; i < n1; ++i)
            for (std::size_t j = 0; j < n2; ++j) joint[i * n2 + j] = word_prob(i, s1.size()) * word_prob(j, s2.size());
        return joint;
    }

    if (m.kind() == ModelKind::MarkovProduct) {
        // rows independent; within a row, chain marginals on the listed columns
        const auto& M = m.transition_matrix();
        const auto& pi = m.stationary_distribution();
        const int q = m.alphabet();
        std::vector<std::vector<double>> mpow = {std::vector<double>(static_cast<std::size_t>(q) * q, 0.0)};
        for (int a = 0; a < q; ++a) mpow[0][static_cast<std::size_t>(a * q + a)] = 1.0;  // M^0
        auto mat_power = [&](int e) -> const std::vector<double>& {
            while (static_cast<int>(mpow.size()) <= e) {
                const auto& prev = mpow.back();
                std::vector<double> next(static_cast<std::size_t>(q) * q, 0.0);
                for (int a = 0; a < q; ++a)
                    for (int b = 0; b < q; ++b)
                        for (int c = 0; c < q; ++c)
                            next[static_cast<std::size_t>(a * q + b)] +=
                                prev[static_cast<std::size_t>(a * q + c)] * M[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
                mpow.push_back(std::move(next));
            }
            return mpow[static_cast<std::size_t>(e)];
        };
        // probability of symbols at sorted columns of one row
        auto row_prob = [&](const std::vector<std::pair<int, Symbol>>& cells) {
            if (cells.empty()) return 1.0;
            double pr = pi[cells[0].second];
            for (std::size_t k = 1; k < cells.size(); ++k) {
                const auto& mp = mat_power(cells[k].first - cells[k - 1].first);
                pr *= mp[static_cast<std::size_t>(cells[k - 1].second) * static_cast<std::size_t>(q) + cells[k].second];
            }
            return pr;
        };
        for (std::size_t i = 0; i < n1; ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                // gather per-row cells from both boxes
                std::vector<std::pair<int, std::vector<std::pair<int, Symbol>>>> rows;
                auto add_cells = [&](const std::vector<LatticeVector>& sites, std::size_t idx, std::size_t len) {
                    std::vector<Symbol> w(len);
                    for (std::size_t k = len; k-- > 0;) {
                        w[k] = static_cast<Symbol>(idx % static_cast<std::size_t>(q));
                        idx /= static_cast<std::size_t>(q);
                    }
                    for (std::size_t k = 0; k < len; ++k) {
                        const int row = sites[k][0], col = sites[k][1];
                        auto rit = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.first == row; });
                        if (rit == rows.end()) {
                            rows.push_back({row, {}});
                            rit = rows.end() - 1;
                        }
                        rit->second.emplace_back(col, w[k]);
                    }
                };
                add_cells(s1, i, s1.size());
                add_cells(s2, j, s2.size());
                double pr = 1.0;
                bool consistent = true;
                for (auto& [row, cells] : rows) {
                    std::sort(cells.begin(), cells.end());
                    for (std::size_t k = 1; k < cells.size(); ++k) {
                        if (cells[k].first == cells[k - 1].first && cells[k].second != cells[k - 1].second)
                            consistent = false;
                    }
                    if (!consistent) break;
                    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
                    pr *= row_prob(cells);
                }
                joint[i * n2 + j] = consistent ? pr : 0.0;
            }
        }
        return joint;
    }

    // Gibbs: single torus enumeration, histogram over the two windows
    int L = torus_side;
    if (L <= 0) {
        int need = 0;
        for (const auto& s : s1) for (int i = 0; i < m.dim(); ++i) need = std::max(need, s[i] + 1);
        for (const auto& s : s2) for (int i = 0; i < m.dim(); ++i) need = std::max(need, s[i] + 1);
        L = need + std::max(m.interaction().range(), 1);
    }
    require_enum_budget(m.alphabet(), static_cast<long long>(std::llround(std::pow(L, m.dim()))),
                        "mixing probe torus");
    const auto placements = compile_torus(m.interaction(), L);
    const long long sites = static_cast<long long>(std::llround(std::pow(L, m.dim())));
    auto flatten = [&](const std::vector<LatticeVector>& ss) {
        std::vector<long long> out;
        for (const auto& s : ss) {
            long long flat = 0;
            for (int i = 0; i < m.dim(); ++i) {
                int c = s[i] % L;
                if (c < 0) c += L;
                flat = flat * L + c;
            }
            out.push_back(flat);
        }
        return out;
    };
    const auto f1 = flatten(s1), f2 = flatten(s2);
    std::vector<double> weights(joint.size(), 0.0);
    double z = 0.0;
    // first pass for max energy to stabilize exp
    double emin = std::numeric_limits<double>::infinity();
    enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
        emin = std::min(emin, state_energy(placements, s.data()));
    });
    enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
        const double w = std::exp(-(state_energy(placements, s.data()) - emin));
        std::size_t i = 0, j = 0;
        for (long long f : f1) i = i * static_cast<std::size_t>(m.alphabet()) + s[static_cast<std::size_t>(f)];
        for (long long f : f2) j = j * static_cast<std::size_t>(m.alphabet()) + s[static_cast<std::size_t>(f)];
        weights[i * n2 + j] += w;
        z += w;
    });
    for (std::size_t k = 0; k < joint.size(); ++k) joint[k] = weights[k] / z;
    return joint;
}

}  // namespace

double mixing_phi_probe(const Model& m, const Box& a1, const Box& a2, int torus_side) {
    const auto joint = joint_cylinder_distribution(m, a1, a2, torus_side);
    const std::size_t n1 = ipow(static_cast<std::uint64_t>(m.alphabet()), static_cast<unsigned>(a1.site_count()));
    const std::size_t n2 = joint.size() / n1;
    std::vector<double> p1(n1, 0.0), p2(n2, 0.0);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) {
            p1[i] += joint[i * n2 + j];
            p2[j] += joint[i * n2 + j];
        }
    double best = 0.0;
    for (std::size_t j = 0; j < n2; ++j) {
        if (p2[j] <= 0.0) continue;
        for (std::size_t i = 0; i < n1; ++i) {
            best = std::max(best, std::abs(joint[i * n2 + j] / p2[j] - p1[i]));
        }
    }
    return best / static_cast<double>(a1.site_count());
}

double model_entropy(const Model& m) {
    if (m.has_closed_form_entropy()) return m.closed_form_entropy();
    // s(Pr) = P(U) + E_Pr[f_U]; the energy expectation is torus-exact
    const auto pe = pressure_auto(m.interaction());
    const int L = default_torus_side(m, std::max(m.interaction().range(), 1));
    require_enum_budget(m.alphabet(), static_cast<long long>(std::llround(std::pow(L, m.dim()))), "model_entropy");
    const auto placements = compile_torus(m.interaction(), L);
    const long long sites = static_cast<long long>(std::llround(std::pow(L, m.dim())));
    // E[f_U]: average f_U at the origin, reading context from the torus
    Configuration ctx = Configuration::torus(m.dim(), L, m.alphabet());
    double emin = std::numeric_limits<double>::infinity();
    enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
        emin = std::min(emin, state_energy(placements, s.data()));
    });
    double z = 0.0, acc = 0.0;
    enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
        const double w = std::exp(-(state_energy(placements, s.data()) - emin));
        std::copy(s.begin(), s.end(), ctx.values().begin());
        acc += w * f_u(m.interaction(), ctx);
        z += w;
    });
    return pe.value + acc / z;
}

namespace {

// E_Q[f_U] for a product-structured Q by enumerating the dependence set.
double expect_f_under_product(const Model& q_model, const Interaction& u) {
    const auto dep = f_u_dependence_set(u);
    require_enum_budget(q_model.alphabet(), static_cast<long long>(dep.size()), "expect_f_under_product");
    // context box covering the dependence set
    int lo = 0, hi = 0;
    for (const auto& s : dep)
        for (int i = 0; i < u.dim(); ++i) {
            lo = std::min(lo, s[i]);
            hi = std::max(hi, s[i]);
        }
    std::vector<int> origin(static_cast<std::size_t>(u.dim()), lo);
    Configuration ctx = Configuration::box(u.dim(), LatticeVector::of(origin), hi - lo + 1, q_model.alphabet());

    double acc = 0.0;
    std::vector<Symbol> assign(dep.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < dep.size(); ++i) ctx.set(dep[i], assign[i]);
        double w;
        if (q_model.kind() == ModelKind::Iid) {
            w = 1.0;
            const auto& p = q_model.iid_probabilities();
            for (Symbol s : assign) w *= p[s];
        } else {
            // markov rows: cells grouped by row, weighted by chain marginals
            const auto& M = q_model.transition_matrix();
            const auto& pi = q_model.stationary_distribution();
            w = 1.0;
            std::vector<std::pair<int, std::vector<std::pair<int, Symbol>>>> rows;
            for (std::size_t i = 0; i < dep.size(); ++i) {
                const int row = dep[i][0], col = dep[i][1];
                auto rit = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.first == row; });
                if (rit == rows.end()) {
                    rows.push_back({row, {}});
                    rit = rows.end() - 1;
                }
                rit->second.emplace_back(col, assign[i]);
            }
            for (auto& [row, cells] : rows) {
                std::sort(cells.begin(), cells.end());
                double pr = pi[cells[0].second];
                for (std::size_t k = 1; k < cells.size(); ++k) {
                    const int gap = cells[k].first - cells[k - 1].first;
                    if (gap != 1) {
                        // dependence sets of finite-range interactions through
                        // the origin are contiguous per row for range <= 1;
                        // larger gaps would need transition powers
                        throw ValidationError("expect_f_under_product: non-contiguous markov dependence set");
                    }
                    pr *= M[cells[k - 1].second][cells[k].second];
                }
                w *= pr;
            }
        }
        acc += w * f_u(u, ctx);
        std::size_t pos = 0;
        for (; pos < assign.size(); ++pos) {
            if (++assign[pos] < q_model.alphabet()) break;
            assign[pos] = 0;
        }
        if (pos == assign.size()) break;
    }
    return acc;
}

}  // namespace

double relative_entropy(const Model& q, const Model& p) {
    if (q.dim() != p.dim() || q.alphabet() != p.alphabet())
        throw ValidationError("relative_entropy: models must share dimension and alphabet");
    const auto pe = pressure_auto(p.interaction());
    double ef;
    if (q.has_closed_form_marginals()) {
        ef = expect_f_under_product(q, p.interaction());
    } else {
        // E_Q[f_{U_P}] torus-exact under Q
        const int L = default_torus_side(q, std::max({q.interaction().range(), p.interaction().range(), 1}));
        const auto placements = compile_torus(q.interaction(), L);
        const long long sites = static_cast<long long>(std::llround(std::pow(L, q.dim())));
        require_enum_budget(q.alphabet(), sites, "relative_entropy");
        Configuration ctx = Configuration::torus(q.dim(), L, q.alphabet());
        double emin = std::numeric_limits<double>::infinity();
        enumerate_states(q.alphabet(), sites, [&](const std::vector<Symbol>& s) {
            emin = std::min(emin, state_energy(placements, s.data()));
        });
        double z = 0.0, acc = 0.0;
        enumerate_states(q.alphabet(), sites, [&](const std::vector<Symbol>& s) {
            const double w = std::exp(-(state_energy(placements, s.data()) - emin));
            std::copy(s.begin(), s.end(), ctx.values().begin());
            acc += w * f_u(p.interaction(), ctx);
            z += w;
        });
        ef = acc / z;
    }
    return pe.value + ef - model_entropy(q);
}

double log_sum_pattern_prob_power(const Model& m, int n, double q) {
    const double e = 1.0 - q;
    if (m.kind() == ModelKind::Iid) {
        const auto& p = m.iid_probabilities();
        double s = 0.0;
        for (double v : p) s += std::pow(v, e);
        return std::pow(static_cast<double>(n) + 1.0, m.dim()) * std::log(s);
    }
    if (m.kind() == ModelKind::MarkovProduct) {
        const auto& M = m.transition_matrix();
        const auto& pi = m.stationary_distribution();
        const int a = m.alphabet();
        // per-row sum over words of (pi prod M)^e via entrywise powers
        std::vector<double> v(static_cast<std::size_t>(a));
        for (int i = 0; i < a; ++i) v[static_cast<std::size_t>(i)] = std::pow(pi[static_cast<std::size_t>(i)], e);
        for (int step = 0; step < n; ++step) {
            std::vector<double> nv(static_cast<std::size_t>(a), 0.0);
            for (int i = 0; i < a; ++i)
                for (int j = 0; j < a; ++j)
                    nv[static_cast<std::size_t>(j)] += v[static_cast<std::size_t>(i)] *
                        std::pow(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], e);
            v.swap(nv);
        }
        double row = 0.0;
        for (double x : v) row += x;
        return (static_cast<double>(n) + 1.0) * std::log(row);
    }
    // Gibbs: histogram of window probabilities from one torus enumeration
    const long long patterns = static_cast<long long>(
        std::pow(static_cast<double>(m.alphabet()), std::pow(static_cast<double>(n) + 1.0, m.dim())));
    if (patterns <= 0 || std::log2(static_cast<double>(patterns)) > kEnumBudgetBits)
        throw BudgetExceeded("log_sum_pattern_prob_power: pattern table exceeds budget");
    const int L = default_torus_side(m, n);
    const auto placements = compile_torus(m.interaction(), L);
    const long long sites = static_cast<long long>(std::llround(std::pow(L, m.dim())));
    require_enum_budget(m.alphabet(), sites, "log_sum_pattern_prob_power");
    std::vector<long long> window;
    SiteIterator it(m.dim(), n);
    for (; !it.done(); it.advance()) {
        long long flat = 0;
        for (int i = 0; i < m.dim(); ++i) flat = flat * L + (*it)[i];
        window.push_back(flat);
    }
    std::vector<double> hist(static_cast<std::size_t>(patterns), 0.0);
    double emin = std::numeric_limits<double>::infinity();
    enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
        emin = std::min(emin, state_energy(placements, s.data()));
    });
    double z = 0.0;
    enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
        const double w = std::exp(-(state_energy(placements, s.data()) - emin));
        std::size_t idx = 0;
        for (long long f : window) idx = idx * static_cast<std::size_t>(m.alphabet()) + s[static_cast<std::size_t>(f)];
        hist[idx] += w;
        z += w;
    });
    LogSumExp acc;
    for (double h : hist)
        if (h > 0.0) acc.add(e * std::log(h / z));
    return acc.value();
}

namespace {

struct WindowStats {
    int tau = -1;        // min over matches x != 0 of max_i x_i; -1 = none
    int tau0 = -1;       // same including x = 0
    std::vector<int> count;  // N_k for k = 0..K (origin included)
};

WindowStats window_stats(const Pattern& a, const std::vector<Symbol>& window, int wext, int cap, int d,
                         int /*alphabet*/) {
    WindowStats st;
    st.count.assign(static_cast<std::size_t>(cap) + 1, 0);
    const int pside = a.side();
    SiteIterator it(d, cap);
    for (; !it.done(); it.advance()) {
        const LatticeVector& x = *it;
        // match test at x
        bool match = true;
        SiteIterator ps(d, pside);
        for (; !ps.done() && match; ps.advance()) {
            long long flat = 0;
            for (int i = 0; i < d; ++i) flat = flat * wext + (x[i] + (*ps)[i]);
            if (window[static_cast<std::size_t>(flat)] != a.at(*ps)) match = false;
        }
        if (!match) continue;
        int shell = 0;
        for (int i = 0; i < d; ++i) shell = std::max(shell, x[i]);
        for (int k = shell; k <= cap; ++k) ++st.count[static_cast<std::size_t>(k)];
        if (st.tau0 < 0 || shell < st.tau0) st.tau0 = shell;
        if (!x.is_zero() && (st.tau < 0 || shell < st.tau)) st.tau = shell;
    }
    return st;
}

}  // namespace

HittingLawTable brute_force_hitting_law(const Model& m, const Pattern& a, int cap) {
    if (cap < 0) throw ValidationError("brute_force_hitting_law: cap must be >= 0");
    const int d = m.dim();
    const int wside = cap + a.side();
    const int wext = wside + 1;
    const long long wsites = static_cast<long long>(ipow(static_cast<std::uint64_t>(wext), static_cast<unsigned>(d)));

    HittingLawTable t;
    t.pattern = a;
    t.cap = cap;
    t.prob.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    t.prob_with_origin.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    t.mean_count.assign(static_cast<std::size_t>(cap) + 1, 0.0);
    t.second_moment.assign(static_cast<std::size_t>(cap) + 1, 0.0);

    auto accumulate = [&](const std::vector<Symbol>& window, double weight) {
        const auto st = window_stats(a, window, wext, cap, d, m.alphabet());
        for (int k = 0; k <= cap; ++k) {
            if (st.tau >= 0 && st.tau <= k && k >= 1) t.prob[static_cast<std::size_t>(k)] += weight;
            if (st.tau0 >= 0 && st.tau0 <= k) t.prob_with_origin[static_cast<std::size_t>(k)] += weight;
            const double c = st.count[static_cast<std::size_t>(k)];
            t.mean_count[static_cast<std::size_t>(k)] += weight * c;
            t.second_moment[static_cast<std::size_t>(k)] += weight * c * c;
        }
    };

    if (m.has_closed_form_marginals()) {
        require_enum_budget(m.alphabet(), wsites, "brute_force_hitting_law");
        Pattern wp(d, wside, m.alphabet());
        enumerate_states(m.alphabet(), wsites, [&](const std::vector<Symbol>& s) {
            std::copy(s.begin(), s.end(), wp.values().begin());
            accumulate(s, std::exp(m.pattern_log_prob(wp)));
            ++t.states_enumerated;
        });
    } else {
        const int L = default_torus_side(m, wside);
        const auto placements = compile_torus(m.interaction(), L);
        const long long sites = static_cast<long long>(std::llround(std::pow(L, d)));
        require_enum_budget(m.alphabet(), sites, "brute_force_hitting_law (gibbs torus)");
        std::vector<long long> window_flat;
        SiteIterator it(d, wside);
        for (; !it.done(); it.advance()) {
            long long flat = 0;
            for (int i = 0; i < d; ++i) flat = flat * L + (*it)[i];
            window_flat.push_back(flat);
        }
        double emin = std::numeric_limits<double>::infinity();
        enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
            emin = std::min(emin, state_energy(placements, s.data()));
        });
        double z = 0.0;
        std::vector<Symbol> window(static_cast<std::size_t>(wsites));
        enumerate_states(m.alphabet(), sites, [&](const std::vector<Symbol>& s) {
            const double w = std::exp(-(state_energy(placements, s.data()) - emin));
            for (std::size_t i = 0; i < window.size(); ++i) window[i] = s[static_cast<std::size_t>(window_flat[i])];
            accumulate(window, w);
            z += w;
            ++t.states_enumerated;
        });
        for (auto& v : t.prob) v /= z;
        for (auto& v : t.prob_with_origin) v /= z;
        for (auto& v : t.mean_count) v /= z;
        for (auto& v : t.second_moment) v /= z;
    }

    const auto br = exact_pattern_probability(m, a);
    t.log_prob_pattern = std::log(br.point);
    return t;
}

std::string hitting_law_csv(const HittingLawTable& t) {
    std::ostringstream os;
    os << "k,prob,prob_with_origin,mean_count,second_moment\n";
    os.precision(17);
    for (int k = 0; k <= t.cap; ++k) {
        os << k << ',' << t.prob[static_cast<std::size_t>(k)] << ',' << t.prob_with_origin[static_cast<std::size_t>(k)]
           << ',' << t.mean_count[static_cast<std::size_t>(k)] << ',' << t.second_moment[static_cast<std::size_t>(k)]
           << '\n';
    }
    return os.str();
}

std::string hitting_law_json(const HittingLawTable& t, const Model& m) {
    nlohmann::json j;
    j["pattern"] = nlohmann::json::parse(t.pattern.to_json_string());
    j["cap"] = t.cap;
    j["log_prob_pattern"] = t.log_prob_pattern;
    j["prob"] = t.prob;
    j["prob_with_origin"] = t.prob_with_origin;
    j["mean_count"] = t.mean_count;
    j["second_moment"] = t.second_moment;
    j["model"] = m.descriptor();
    j["model_hash"] = m.content_hash();
    j["states_enumerated"] = t.states_enumerated;
    j["version"] = kVersion;
    return j.dump(2);
}

std::pair<double, double> conditional_probability_range(const Interaction& u) {
    const int d = u.dim();
    const int r = std::max(u.range(), 1);
    const int q = u.alphabet();
    // enumerate contexts on the surrounding box of radius r
    std::vector<LatticeVector> ball;
    SiteIterator it(d, 2 * r);
    for (; !it.done(); it.advance()) {
        LatticeVector v = *it;
        for (int i = 0; i < d; ++i) v[i] -= r;
        if (!v.is_zero() && v.l1() <= r) ball.push_back(v);
    }
    require_enum_budget(q, static_cast<long long>(ball.size()) + 1, "conditional_probability_range");
    std::vector<int> lo(static_cast<std::size_t>(d), -r);
    Configuration ctx = Configuration::box(d, LatticeVector::of(lo), 2 * r + 1, q);
    double pmin = 1.0, pmax = 0.0;
    std::vector<Symbol> assign(ball.size(), 0);
    for (;;) {
        for (std::size_t i = 0; i < ball.size(); ++i) ctx.set(ball[i], assign[i]);
        const auto p = single_site_conditional(u, LatticeVector::zero(d), ctx);
        for (double v : p) {
            pmin = std::min(pmin, v);
            pmax = std::max(pmax, v);
        }
        std::size_t pos = 0;
        for (; pos < assign.size(); ++pos) {
            if (++assign[pos] < q) break;
            assign[pos] = 0;
        }
        if (pos == assign.size() || assign.empty()) break;
    }
    return {pmin, pmax};
}

}  // namespace gibbslab
