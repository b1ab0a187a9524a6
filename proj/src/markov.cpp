#include "laat/markov.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include "laat/error.hpp"
#include "laat/kernels.hpp"

namespace laat::markov {

namespace {

TransitionKernel kernel_shell(const NeighborhoodIndex& index,
                              KernelFlavor flavor, double beta) {
  if (!(beta > 0.0)) {
    throw_error(ErrorKind::argument, "kernel beta must be positive");
  }
  TransitionKernel kernel;
  kernel.flavor = flavor;
  kernel.beta = beta;
  kernel.n = index.n;
  kernel.row_offset = index.row_offset;
  kernel.col = index.nbr;
  kernel.prob.resize(index.nbr.size());
  return kernel;
}

void softmax_rows(const NeighborhoodIndex& index, TransitionKernel& kernel) {
  const auto& kn = kernels::ops();
  for (std::size_t i = 0; i < index.n; ++i) {
    const std::size_t begin = kernel.row_offset[i];
    const std::size_t m = kernel.row_offset[i + 1] - begin;
    if (m == 0) continue;
    double* row = kernel.prob.data() + begin;
    const double total = kn.exp_shift_sum(row, m, kernel.beta);
    for (std::size_t k = 0; k < m; ++k) row[k] /= total;
  }
}

}  // namespace

TransitionKernel alignment_kernel(const NeighborhoodIndex& index, double beta) {
  TransitionKernel kernel = kernel_shell(index, KernelFlavor::alignment, beta);
  std::copy(index.pref.begin(), index.pref.end(), kernel.prob.begin());
  softmax_rows(index, kernel);
  return kernel;
}

TransitionKernel distance_kernel(const NeighborhoodIndex& index, double beta) {
  TransitionKernel kernel = kernel_shell(index, KernelFlavor::distance, beta);
  for (std::size_t i = 0; i < index.n; ++i) {
    const std::size_t begin = kernel.row_offset[i];
    const std::size_t m = kernel.row_offset[i + 1] - begin;
    if (m == 0) continue;
    double* row = kernel.prob.data() + begin;
    const double* dist = index.nbr_dist.data() + begin;
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      row[k] = 1.0 - dist[k] / index.radius;
      total += row[k];
    }
    if (total > 0.0) {
      for (std::size_t k = 0; k < m; ++k) row[k] /= total;
    } else {
      // every neighbor sits exactly on the radius sphere
      for (std::size_t k = 0; k < m; ++k) row[k] = 1.0 / static_cast<double>(m);
    }
  }
  softmax_rows(index, kernel);
  return kernel;
}

std::vector<std::vector<std::uint32_t>> connected_components(
    const TransitionKernel& kernel) {
  std::vector<std::vector<std::uint32_t>> components;
  std::vector<std::uint8_t> seen(kernel.n, 0);
  for (std::size_t i = 0; i < kernel.n; ++i) {
    if (seen[i] || kernel.degree(i) == 0) continue;
    components.emplace_back();
    std::vector<std::uint32_t>& comp = components.back();
    std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(i)};
    seen[i] = 1;
    while (!queue.empty()) {
      const std::uint32_t v = queue.front();
      queue.pop_front();
      comp.push_back(v);
      for (const std::uint32_t w : kernel.columns(v)) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
  }
  return components;
}

namespace {

// Power iteration restricted to one component. Returns pi indexed like
// `comp`, normalized to sum 1 within the component.
StationaryVector component_power(const TransitionKernel& kernel,
                                 const std::vector<std::uint32_t>& comp,
                                 double tol, int max_iter) {
  const std::size_t m = comp.size();
  std::vector<std::uint32_t> local(kernel.n, 0);
  for (std::size_t k = 0; k < m; ++k) local[comp[k]] = static_cast<std::uint32_t>(k);

  std::vector<double> x(m, 1.0 / static_cast<double>(m));
  std::vector<double> next(m);

  StationaryVector result;
  for (int it = 1; it <= max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const std::uint32_t i = comp[k];
      const double xi = x[k];
      const std::size_t begin = kernel.row_offset[i];
      const std::size_t end = kernel.row_offset[i + 1];
      for (std::size_t e = begin; e < end; ++e) {
        next[local[kernel.col[e]]] += xi * kernel.prob[e];
      }
    }
    double residual = 0.0;
    for (std::size_t k = 0; k < m; ++k) residual += std::abs(next[k] - x[k]);
    if (residual <= tol) {
      result.pi = x;
      result.residual = residual;
      result.iterations = it;
      return result;
    }
    // lazy-chain step: averaging with the previous iterate keeps the same
    // fixed point but converges on periodic (bipartite-like) graphs too
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      x[k] = 0.5 * (x[k] + next[k]);
      total += x[k];
    }
    for (std::size_t k = 0; k < m; ++k) x[k] /= total;
    result.residual = residual;
    result.iterations = it;
  }
  throw LaatError(ErrorKind::convergence,
                  "power iteration did not reach tol=" + std::to_string(tol) +
                      " in " + std::to_string(max_iter) +
                      " iterations (residual " +
                      std::to_string(result.residual) + ")",
                  result.residual);
}

}  // namespace

StationaryVector stationary_vector(const TransitionKernel& kernel, double tol,
                                   int max_iter) {
  if (!(tol > 0.0) || max_iter < 1) {
    throw_error(ErrorKind::argument, "stationary: tol > 0 and max_iter >= 1");
  }
  const auto components = connected_components(kernel);
  if (components.empty()) {
    throw_error(ErrorKind::data, "stationary: kernel has no populated rows");
  }
  if (components.size() > 1) {
    throw_error(ErrorKind::multi_component,
                "kernel splits into " + std::to_string(components.size()) +
                    " connected components; analyse each in isolation "
                    "(stationary_scores does this)");
  }

  const std::vector<std::uint32_t>& comp = components.front();
  StationaryVector local = component_power(kernel, comp, tol, max_iter);
  StationaryVector out;
  out.pi.assign(kernel.n, 0.0);
  for (std::size_t k = 0; k < comp.size(); ++k) out.pi[comp[k]] = local.pi[k];
  out.residual = local.residual;
  out.iterations = local.iterations;
  return out;
}

std::vector<double> stationary_scores(const TransitionKernel& kernel, double tol,
                                      int max_iter,
                                      std::vector<ComponentStat>* stats) {
  const auto components = connected_components(kernel);
  if (components.empty()) {
    throw_error(ErrorKind::data, "stationary: kernel has no populated rows");
  }
  std::size_t covered = 0;
  for (const auto& comp : components) covered += comp.size();

  std::vector<double> scores(kernel.n, 0.0);
  for (const auto& comp : components) {
    const StationaryVector local = component_power(kernel, comp, tol, max_iter);
    const double share =
        static_cast<double>(comp.size()) / static_cast<double>(covered);
    for (std::size_t k = 0; k < comp.size(); ++k) {
      scores[comp[k]] = share * local.pi[k];
    }
    if (stats != nullptr) {
      stats->push_back({comp.size(), local.residual, local.iterations});
    }
  }
  return scores;
}

std::vector<std::uint32_t> threshold_by_visitation(std::span<const double> scores,
                                                   double threshold) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= threshold) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace laat::markov
