// Finite-range translation-invariant interactions, finite-volume
// Hamiltonians, single-site conditional distributions, the Dobrushin
// influence matrix, and the high-temperature condition.
//
// Inverse temperature is folded into the local energy tables: a preset
// taking beta scales its tables once at construction, and there is no
// separate beta anywhere downstream.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gibbslab/lattice.hpp"

namespace gibbslab {

// One translation class of local energies. The shape is normalized so its
// lexicographically smallest site is 0; the table holds an energy for every
// symbol assignment on the shape, mixed-radix indexed with shape[0] most
// significant.
struct InteractionTerm {
    std::vector<LatticeVector> shape;
    std::vector<double> table;

    int arity() const { return static_cast<int>(shape.size()); }
    double oscillation() const;
    int l1_diameter() const;
};

class Interaction {
public:
    Interaction(int d, int alphabet, std::vector<InteractionTerm> terms);

    int dim() const { return d_; }
    int alphabet() const { return alphabet_; }
    int range() const { return range_; }  // max l1 diameter over shapes
    const std::vector<InteractionTerm>& terms() const { return terms_; }

    Interaction scaled(double factor) const;
    // this + factor * other (same d and alphabet required). Term lists
    // concatenate; no algebraic merging is attempted.
    Interaction plus(const Interaction& other, double factor = 1.0) const;

    std::uint64_t content_hash() const;

private:
    int d_;
    int alphabet_;
    int range_ = 0;
    std::vector<InteractionTerm> terms_;
};

struct BoundaryCondition {
    bool free = true;
    std::optional<Configuration> context;  // must cover the R-annulus when fixed

    static BoundaryCondition Free() { return BoundaryCondition{}; }
    static BoundaryCondition Fixed(Configuration ctx) { return BoundaryCondition{false, std::move(ctx)}; }
};

// H^zeta_Lambda(sigma): sum of U(A, sigma_Lambda zeta_Lambda^c) over term
// placements meeting the volume. A free boundary drops placements that leave
// the volume, matching the free-boundary partition function.
double hamiltonian(const Interaction& u, const Box& volume, const Configuration& sigma,
                   const BoundaryCondition& zeta);

// Energy of a full torus configuration: every placement, wrapped reads.
double torus_energy(const Interaction& u, const Configuration& torus);

// Conditional distribution at one site given symbols on its R-ball.
// The context's value at the site itself is ignored.
std::vector<double> single_site_conditional(const Interaction& u, const LatticeVector& site,
                                            const Configuration& context);

// Energy of placing `sym` at `site`: the sum over placements covering the
// site, other symbols read from the context. The exponent behind the
// conditional above; exposed for samplers.
double site_energy(const Interaction& u, const LatticeVector& site, Symbol sym,
                   const Configuration& context);

// Dobrushin influence coefficient gamma_{0y}: the maximal total-variation
// distance between conditional distributions at the origin under contexts
// differing only at y, exact by exhaustive enumeration over the R-ball.
double dobrushin_coefficient(const Interaction& u, const LatticeVector& y);

struct DobrushinReport {
    bool satisfied = false;
    double row_sum = 0.0;
    std::vector<std::pair<LatticeVector, double>> row;  // nonzero entries
};
// Row at the origin; by translation invariance this is the sup over sites.
DobrushinReport check_dobrushin(const Interaction& u);

struct HighTemperatureReport {
    bool satisfied = false;
    double lhs = 0.0;  // sup_x sum_{A∋x} (|A|-1) osc(U(A,.)); threshold 2
};
HighTemperatureReport check_high_temperature(const Interaction& u);

// f_U(sigma) = sum_{A∋0} U(A, sigma)/|A|, context covering the R-ball of 0.
double f_u(const Interaction& u, const Configuration& context);

// The union of shapes' placements through the origin: the dependence set of
// f_U. Sorted lexicographically.
std::vector<LatticeVector> f_u_dependence_set(const Interaction& u);

// ---- presets ------------------------------------------------------------

Interaction make_iid_interaction(int d, const std::vector<double>& p);
Interaction make_ising_interaction(int d, double beta, double coupling, double field);
Interaction make_potts_interaction(int d, double beta, double coupling, int states);
// Product of independent stationary chains along the last axis; the pair
// potential is -log M(a,b) with no single-site part.
Interaction make_markov_product_interaction(const std::vector<std::vector<double>>& transition);

// Stationary distribution of a stochastic matrix (rows sum to 1 within 1e-12).
std::vector<double> markov_stationary(const std::vector<std::vector<double>>& transition);

}  // namespace gibbslab
