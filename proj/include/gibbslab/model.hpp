// A model bundles a preset descriptor with its realized interaction and,
// for product-structured presets, exact closed forms (marginals, entropy)
// that the Gibbs machinery cannot provide cheaply.
#pragma once

#include <string>
#include <vector>

#include "gibbslab/interaction.hpp"

namespace gibbslab {

enum class ModelKind { Iid, MarkovProduct, Ising, Potts, Custom };

class Model {
public:
    static Model iid(int d, std::vector<double> p);
    static Model ising(int d, double beta, double coupling, double field);
    static Model potts(int d, double beta, double coupling, int states);
    static Model markov_product(std::vector<std::vector<double>> transition);
    static Model custom(int d, int alphabet, std::vector<InteractionTerm> terms, std::string label = "custom");

    ModelKind kind() const { return kind_; }
    int dim() const { return interaction_.dim(); }
    int alphabet() const { return interaction_.alphabet(); }
    const Interaction& interaction() const { return interaction_; }
    const std::string& descriptor() const { return descriptor_; }
    std::uint64_t content_hash() const;

    // Product-structured models (iid, markov_product) have exact cylinder
    // probabilities; true Gibbs models go through the exact engine.
    bool has_closed_form_marginals() const { return kind_ == ModelKind::Iid || kind_ == ModelKind::MarkovProduct; }
    double pattern_log_prob(const Pattern& a) const;

    // Entropy per site in nats; closed form for product-structured models.
    bool has_closed_form_entropy() const { return has_closed_form_marginals(); }
    double closed_form_entropy() const;

    const std::vector<double>& iid_probabilities() const;
    const std::vector<std::vector<double>>& transition_matrix() const;
    const std::vector<double>& stationary_distribution() const;

private:
    Model(ModelKind kind, Interaction interaction, std::string descriptor)
        : kind_(kind), interaction_(std::move(interaction)), descriptor_(std::move(descriptor)) {}

    ModelKind kind_;
    Interaction interaction_;
    std::string descriptor_;
    std::vector<double> iid_p_;
    std::vector<std::vector<double>> transition_;
    std::vector<double> stationary_;
};

}  // namespace gibbslab
