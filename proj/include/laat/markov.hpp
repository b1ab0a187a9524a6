#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "laat/neighborhood.hpp"

namespace laat::markov {

enum class KernelFlavor { alignment, distance };

// Row-stochastic jump kernel over the neighborhood graph. CSR over all
// points; rows of inactive points are empty. The sparsity pattern equals the
// neighborhood graph, entries are strictly positive.
struct TransitionKernel {
  KernelFlavor flavor = KernelFlavor::alignment;
  double beta = 0.0;
  std::size_t n = 0;
  std::vector<std::size_t> row_offset;
  std::vector<std::uint32_t> col;
  std::vector<double> prob;

  std::size_t degree(std::size_t i) const {
    return row_offset[i + 1] - row_offset[i];
  }
  std::span<const std::uint32_t> columns(std::size_t i) const {
    return {col.data() + row_offset[i], degree(i)};
  }
  std::span<const double> probabilities(std::size_t i) const {
    return {prob.data() + row_offset[i], degree(i)};
  }
};

// softmax(beta * E-bar) per row: the pheromone-free special case of the
// walker's jump distribution. Matches the walker rows at kappa=1 exactly.
TransitionKernel alignment_kernel(const NeighborhoodIndex& index, double beta);

// Distance-based baseline: scores s = 1 - d/r normalized within the row,
// then the same softmax. (The source material names this baseline without
// writing its formula; this is the simplest distance-decreasing choice.)
TransitionKernel distance_kernel(const NeighborhoodIndex& index, double beta);

struct StationaryVector {
  std::vector<double> pi;  // over the kernel's points; sums to 1
  double residual = 0.0;   // ||pi^T P - pi^T||_1 at return
  int iterations = 0;
};

// Connected components of the kernel's (symmetric) sparsity pattern,
// restricted to points with nonempty rows. Deterministic order.
std::vector<std::vector<std::uint32_t>> connected_components(
    const TransitionKernel& kernel);

// Power iteration for the dominant left eigenvector, starting uniform, with
// the lazy-chain (I+P)/2 update to damp period-2 oscillation. Throws
// multi_component when the kernel splits, convergence after max_iter.
StationaryVector stationary_vector(const TransitionKernel& kernel,
                                   double tol = 1e-10, int max_iter = 100000);

struct ComponentStat {
  std::size_t size = 0;
  double residual = 0.0;
  int iterations = 0;
};

// Per-component stationary analysis merged into one per-point score vector:
// each component's pi is scaled by its share of the kernel's points, so the
// combined scores are comparable under one threshold (the visitation rate of
// a walker started uniformly at random). Inactive points score 0.
std::vector<double> stationary_scores(const TransitionKernel& kernel,
                                      double tol, int max_iter,
                                      std::vector<ComponentStat>* stats = nullptr);

// { i : scores[i] >= threshold }
std::vector<std::uint32_t> threshold_by_visitation(std::span<const double> scores,
                                                   double threshold);

}  // namespace laat::markov
