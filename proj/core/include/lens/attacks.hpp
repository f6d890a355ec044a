#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lens/attribution.hpp"
#include "lens/metrics.hpp"
#include "lens/network.hpp"
#include "lens/types.hpp"

namespace lens {

enum class AttackVariant { random_sign, universal_random, top_k, mass_center, lens_objective };

std::string to_string(AttackVariant variant);
AttackVariant parse_attack_variant(const std::string& name);

struct AttackConfig {
    AttackVariant variant = AttackVariant::top_k;
    double epsilon = 0.3;
    std::size_t steps = 100;
    double step_size = 0.01;
    std::size_t t = 10;        // size of the attacked top-t set
    std::size_t k_eval = 10;   // k used to pick the worst iterate
    std::size_t w_eval = 1;    // window for the LENS-objective variant
    std::size_t restarts = 3;  // first run starts at x, later ones at a random point of the ball
    std::uint64_t seed = 0;
    AttributionMethod attribution;
    Ranking ranking = Ranking::raw;
    double hvp_r = 1e-4;

    // Throws DomainError if step_size > epsilon (for epsilon > 0) or t is zero.
    void validate(std::size_t image_size) const;
};

struct AttackResult {
    ImageTensor perturbed;
    double delta_linf = 0.0;
    bool prediction_preserved = true;
    // One objective value per iteration (restarts concatenated), in the
    // direction the attack maximises: minus the attribution mass on the
    // target set for top_k and lens_objective, the center displacement for
    // mass_center.
    std::vector<double> objective_trace;
    // Index into objective_trace of the returned iterate; -1 means the
    // unperturbed input was returned.
    long chosen_iteration = -1;
    // Largest l-inf distance and worst range violation over all iterates
    // visited, including ones that were not returned.
    double max_iterate_linf = 0.0;
    bool iterates_in_range = true;
};

// Projection onto the epsilon ball around x intersected with [0, 1].
void project_linf(std::span<double> candidate, std::span<const double> x, double epsilon);

// +-epsilon independent fair signs per coordinate, clipped to [0, 1].
AttackResult random_sign(const ToyNetwork& net, const ImageTensor& x, double epsilon, std::uint64_t seed);

// One input-agnostic +-epsilon sign tensor of the given size.
std::vector<double> universal_random(std::size_t size, double epsilon, std::uint64_t seed);
// Adds a precomputed perturbation and clips to [0, 1].
AttackResult apply_perturbation(const ToyNetwork& net, const ImageTensor& x, std::span<const double> delta,
                                double epsilon);

// Iterative attacks. Each decreases (or, for mass_center, displaces) the
// attribution of the original prediction by signed steps, projecting after
// every step, and returns the prediction-preserving iterate that is worst
// for the corresponding metric.
AttackResult topk_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg);
AttackResult mass_center_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg);
AttackResult lens_objective_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg);

// Dispatch on cfg.variant. universal_delta is required for universal_random.
AttackResult run_attack(const ToyNetwork& net, const ImageTensor& x, const AttackConfig& cfg,
                        std::span<const double> universal_delta = {});

struct CenterOfMass {
    double row = 0.0;
    double col = 0.0;
};

// Center of mass of |a|. Throws DomainError if the map is all zeros.
CenterOfMass center_of_mass(const AttributionMap& map);

}  // namespace lens
