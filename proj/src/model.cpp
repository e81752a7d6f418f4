#include "gibbslab/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace gibbslab {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Model Model::iid(int d, std::vector<double> p) {
    std::string desc = "iid(d=" + std::to_string(d) + ",p=[";
    for (std::size_t i = 0; i < p.size(); ++i) desc += (i ? "," : "") + fmt(p[i]);
    desc += "])";
    Model m(ModelKind::Iid, make_iid_interaction(d, p), std::move(desc));
    m.iid_p_ = std::move(p);
    return m;
}

Model Model::ising(int d, double beta, double coupling, double field) {
    std::string desc = "ising(d=" + std::to_string(d) + ",beta=" + fmt(beta) + ",J=" + fmt(coupling) +
                       ",h=" + fmt(field) + ")";
    return Model(ModelKind::Ising, make_ising_interaction(d, beta, coupling, field), std::move(desc));
}

Model Model::potts(int d, double beta, double coupling, int states) {
    std::string desc = "potts(d=" + std::to_string(d) + ",beta=" + fmt(beta) + ",J=" + fmt(coupling) +
                       ",q=" + std::to_string(states) + ")";
    return Model(ModelKind::Potts, make_potts_interaction(d, beta, coupling, states), std::move(desc));
}

Model Model::markov_product(std::vector<std::vector<double>> transition) {
    std::string desc = "markov_product(M=[";
    for (std::size_t a = 0; a < transition.size(); ++a) {
        desc += a ? ";" : "";
        for (std::size_t b = 0; b < transition[a].size(); ++b) desc += (b ? "," : "") + fmt(transition[a][b]);
    }
    desc += "])";
    Model m(ModelKind::MarkovProduct, make_markov_product_interaction(transition), std::move(desc));
    m.stationary_ = markov_stationary(transition);
    m.transition_ = std::move(transition);
    return m;
}

Model Model::custom(int d, int alphabet, std::vector<InteractionTerm> terms, std::string label) {
    Model m(ModelKind::Custom, Interaction(d, alphabet, std::move(terms)), std::move(label));
    return m;
}

std::uint64_t Model::content_hash() const {
    return fnv1a_str(descriptor_, interaction_.content_hash());
}

double Model::pattern_log_prob(const Pattern& a) const {
    if (kind_ == ModelKind::Iid) {
        double lp = 0.0;
        for (Symbol s : a.values()) lp += std::log(iid_p_[s]);
        return lp;
    }
    if (kind_ == ModelKind::MarkovProduct) {
        if (a.dim() != 2) throw ValidationError("markov_product: patterns are two-dimensional");
        // rows (fixed slow axis) are independent chain words along the fast axis
        const int rowlen = a.side() + 1;
        double lp = 0.0;
        for (int r = 0; r <= a.side(); ++r) {
            LatticeVector y = LatticeVector::zero(2);
            y[0] = r;
            Symbol prev = a.at(y);
            double row_lp = std::log(stationary_[prev]);
            for (int c = 1; c < rowlen; ++c) {
                y[1] = c;
                const Symbol cur = a.at(y);
                const double t = transition_[prev][cur];
                row_lp += t > 0.0 ? std::log(t) : -std::numeric_limits<double>::infinity();
                prev = cur;
            }
            lp += row_lp;
        }
        return lp;
    }
    throw ValidationError("pattern_log_prob: no closed form for this model; use the exact engine");
}

double Model::closed_form_entropy() const {
    if (kind_ == ModelKind::Iid) {
        double h = 0.0;
        for (double p : iid_p_)
            if (p > 0.0) h -= p * std::log(p);
        return h;
    }
    if (kind_ == ModelKind::MarkovProduct) {
        double h = 0.0;
        for (std::size_t a = 0; a < transition_.size(); ++a) {
            for (double m : transition_[a]) {
                if (m > 0.0) h -= stationary_[a] * m * std::log(m);
            }
        }
        return h;
    }
    throw ValidationError("closed_form_entropy: no closed form for this model");
}

const std::vector<double>& Model::iid_probabilities() const {
    if (kind_ != ModelKind::Iid) throw ValidationError("model is not iid");
    return iid_p_;
}

const std::vector<std::vector<double>>& Model::transition_matrix() const {
    if (kind_ != ModelKind::MarkovProduct) throw ValidationError("model is not markov_product");
    return transition_;
}

const std::vector<double>& Model::stationary_distribution() const {
    if (kind_ != ModelKind::MarkovProduct) throw ValidationError("model is not markov_product");
    return stationary_;
}

}  // namespace gibbslab
