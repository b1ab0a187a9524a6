#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "laat/neighborhood.hpp"
#include "laat/point_cloud.hpp"

namespace laat {

enum class Placement {
  median_filtered_random,  // uniform over points with >= median-size neighborhoods
  subcube_stratified,      // one ant per nonempty subcube of the bounding box
};

// Attribute-driven reward term for the multi-dimensional variant: the jump
// preference gains sign * weight * (a_j - a_i) / sum_j' |a_j' - a_i|.
struct RewardTerm {
  std::string attribute;
  double sign = 1.0;    // +1 favors increasing values, -1 decreasing
  double weight = 0.0;  // nonnegative
};

struct LaatConfig {
  int epochs = 100;          // N_epoch
  int ants = 100;            // N_ants
  int steps = 2500;          // N_steps per ant
  double radius = 0.0;       // neighborhood radius r, required > 0
  double deposit = 0.05;     // pheromone per visit, phi
  double evaporation = 0.1;  // zeta in (0,1)
  double beta = 10.0;        // softmax inverse temperature
  double kappa = 0.5;        // alignment/pheromone mix in [0,1]
  std::uint64_t seed = 1;
  Placement placement = Placement::median_filtered_random;
  int subcubes = 200;  // cube count for subcube_stratified

  // Multi-reward variant. Empty rewards = plain two-term preference. When
  // rewards are present, pheromone_weight / alignment_weight are kappa_1 and
  // kappa_2; negative values mean "derive from kappa" as (1-kappa, kappa).
  std::vector<RewardTerm> rewards;
  double pheromone_weight = -1.0;
  double alignment_weight = -1.0;

  // field-by-field messages; empty when the config is valid
  std::vector<std::string> validate() const;
};

struct PheromoneField {
  std::vector<double> values;  // one nonnegative score per point
  // filled when RunOptions::snapshots is set: field after each epoch
  std::vector<std::vector<double>> epoch_history;
  std::vector<int> epoch_ant_counts;  // ants actually placed per epoch
};

// Multiset of visited points; multiplicities in first-visit order.
struct AntRoute {
  std::uint32_t start = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> visits;  // (id, count)
};

enum class WalkMode {
  sequential_faithful,  // ants walk one after another, deposits immediately
  epoch_batched,        // ants of an epoch share the epoch-start field
};

struct RunOptions {
  WalkMode mode = WalkMode::sequential_faithful;
  int threads = 1;  // used by index build and batched walking
  bool snapshots = false;
};

// Jump distribution over neighbors(i): softmax(beta * ((1-kappa)*F-bar +
// kappa*E-bar)) with the pheromone normalized within the neighborhood.
std::vector<double> jump_probabilities(const NeighborhoodIndex& index,
                                       const PheromoneField& field,
                                       const LaatConfig& cfg, std::uint32_t i);

// N_ants start points (median-filtered placement draws with replacement;
// stratified placement returns one start per nonempty subcube).
std::vector<std::uint32_t> select_start_points(const NeighborhoodIndex& index,
                                               const LaatConfig& cfg,
                                               std::mt19937_64& rng);

// One ant: `steps` jumps against a frozen field.
AntRoute walk_ant(const NeighborhoodIndex& index, const PheromoneField& field,
                  const LaatConfig& cfg, std::uint32_t start,
                  std::mt19937_64& rng);

// F_j += multiplicity * deposit over the route support.
void deposit_pheromone(PheromoneField& field, const AntRoute& route,
                       const LaatConfig& cfg);

// F_j *= (1 - evaporation) for every point.
void evaporate(PheromoneField& field, const LaatConfig& cfg);

// Full run over a prebuilt index (the index must come from `cloud` at
// cfg.radius). The cloud is only consulted for reward attributes.
PheromoneField run_laat(const NeighborhoodIndex& index, const PointCloud& cloud,
                        const LaatConfig& cfg, const RunOptions& opts = {});

PheromoneField run_laat(const PointCloud& cloud, const LaatConfig& cfg,
                        const RunOptions& opts = {});

// Convenience wrapper for the multi-reward variant.
PheromoneField run_laat_multi_reward(const PointCloud& cloud, LaatConfig cfg,
                                     const std::vector<RewardTerm>& rewards,
                                     const RunOptions& opts = {});

}  // namespace laat
