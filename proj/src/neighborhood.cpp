#include "laat/neighborhood.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <thread>

#include "laat/error.hpp"
#include "laat/spatial_grid.hpp"

namespace laat {

namespace {

void require_active(const NeighborhoodIndex& index, std::uint32_t i) {
  if (i >= index.n || !index.active[i]) {
    throw_error(ErrorKind::argument,
                "point " + std::to_string(i) + " is not active in the index");
  }
}

// |cos| weights of the jump vector against the eigenvectors of i, written
// into w (size dims). Returns false for a zero-length jump vector.
bool alignment_weights_into(const NeighborhoodIndex& index, std::uint32_t i,
                            std::uint32_t j, double* w) {
  const std::size_t dims = index.dims;
  const double* xi = index.coords.data() + std::size_t{i} * dims;
  const double* xj = index.coords.data() + std::size_t{j} * dims;
  double norm2 = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double u = xj[d] - xi[d];
    norm2 += u * u;
  }
  if (norm2 == 0.0) return false;
  // The 1/||u|| factor of each cosine cancels in the normalization.
  double total = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double* v = index.eigvec.data() + (std::size_t{i} * dims + d) * dims;
    double dot = 0.0;
    for (std::size_t c = 0; c < dims; ++c) dot += (xj[c] - xi[c]) * v[c];
    w[d] = std::abs(dot);
    total += w[d];
  }
  if (total == 0.0) return false;  // cannot happen for an orthonormal basis
  for (std::size_t d = 0; d < dims; ++d) w[d] /= total;
  return true;
}

void parallel_over_points(std::size_t n, int threads,
                          const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
  if (threads <= 1 || n < 2048) {
    chunk_fn(0, n);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t step = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * step;
    const std::size_t end = std::min(n, begin + step);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] { chunk_fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

NeighborhoodIndex build_index(const PointCloud& cloud, double radius,
                              int threads) {
  cloud.validate();
  if (!(radius > 0.0)) {
    throw_error(ErrorKind::argument, "neighborhood radius must be positive");
  }

  NeighborhoodIndex index;
  index.radius = radius;
  index.n = cloud.n;
  index.dims = cloud.dims;
  index.coords = cloud.coords;

  const std::size_t n = cloud.n;
  const std::size_t dims = cloud.dims;
  const SpatialGrid grid(cloud.coords.data(), n, dims, radius);

  std::vector<std::vector<std::uint32_t>> lists(n);
  std::vector<std::vector<double>> dists(n);
  index.eigval.assign(n * dims, 0.0);
  index.eigvec.assign(n * dims * dims, 0.0);

  parallel_over_points(n, threads, [&](std::size_t begin, std::size_t end) {
    SpatialGrid::Scratch scratch;
    std::vector<std::pair<std::uint32_t, double>> order;
    Eigen::MatrixXd centered;
    Eigen::VectorXd mean(static_cast<Eigen::Index>(dims));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    for (std::size_t i = begin; i < end; ++i) {
      const double* q = cloud.coords.data() + i * dims;
      lists[i].clear();
      dists[i].clear();
      grid.radius_query(q, radius, scratch, lists[i], dists[i]);

      // drop the self hit, keep lists sorted by id
      order.clear();
      for (std::size_t k = 0; k < lists[i].size(); ++k) {
        if (lists[i][k] != i) order.emplace_back(lists[i][k], dists[i][k]);
      }
      std::sort(order.begin(), order.end());
      lists[i].resize(order.size());
      dists[i].resize(order.size());
      for (std::size_t k = 0; k < order.size(); ++k) {
        lists[i][k] = order[k].first;
        dists[i][k] = order[k].second;
      }

      // local PCA over the neighborhood plus the center, mean-centered,
      // population (1/m) covariance
      const std::size_t m = order.size() + 1;
      centered.resize(static_cast<Eigen::Index>(m),
                      static_cast<Eigen::Index>(dims));
      for (std::size_t d = 0; d < dims; ++d) {
        centered(0, static_cast<Eigen::Index>(d)) = q[d];
      }
      for (std::size_t k = 0; k < order.size(); ++k) {
        const double* xj = cloud.coords.data() + std::size_t{order[k].first} * dims;
        for (std::size_t d = 0; d < dims; ++d) {
          centered(static_cast<Eigen::Index>(k + 1),
                   static_cast<Eigen::Index>(d)) = xj[d];
        }
      }
      mean = centered.colwise().mean();
      centered.rowwise() -= mean.transpose();
      const Eigen::MatrixXd cov =
          (centered.transpose() * centered) / static_cast<double>(m);
      solver.compute(cov);

      // Eigen returns ascending eigenvalues; store nonincreasing
      for (std::size_t d = 0; d < dims; ++d) {
        const auto src = static_cast<Eigen::Index>(dims - 1 - d);
        index.eigval[i * dims + d] = std::max(0.0, solver.eigenvalues()(src));
        for (std::size_t c = 0; c < dims; ++c) {
          index.eigvec[(i * dims + d) * dims + c] =
              solver.eigenvectors()(static_cast<Eigen::Index>(c), src);
        }
      }
    }
  });

  // Degeneracy filter: drop points with fewer than `dims` neighbors, and
  // cascade so every surviving point keeps >= dims surviving neighbors
  // (walkers must never strand).
  index.active.assign(n, 1);
  std::vector<std::size_t> deg(n);
  std::deque<std::uint32_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    deg[i] = lists[i].size();
    if (deg[i] < dims) {
      index.active[i] = 0;
      queue.push_back(static_cast<std::uint32_t>(i));
    }
  }
  while (!queue.empty()) {
    const std::uint32_t gone = queue.front();
    queue.pop_front();
    for (const std::uint32_t j : lists[gone]) {
      if (!index.active[j]) continue;
      if (--deg[j] < dims) {
        index.active[j] = 0;
        queue.push_back(j);
      }
    }
  }
  index.active_count = static_cast<std::size_t>(
      std::count(index.active.begin(), index.active.end(), std::uint8_t{1}));
  if (index.active_count == 0) {
    throw_error(ErrorKind::data,
                "empty-after-filter: no point kept >= dims neighbors at radius " +
                    std::to_string(radius));
  }

  // assemble CSR over active points only
  index.row_offset.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t kept = 0;
    if (index.active[i]) {
      for (const std::uint32_t j : lists[i]) kept += index.active[j] ? 1 : 0;
    }
    index.row_offset[i + 1] = index.row_offset[i] + kept;
  }
  index.nbr.resize(index.row_offset[n]);
  index.nbr_dist.resize(index.row_offset[n]);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index.active[i]) continue;
    std::size_t at = index.row_offset[i];
    for (std::size_t k = 0; k < lists[i].size(); ++k) {
      if (!index.active[lists[i][k]]) continue;
      index.nbr[at] = lists[i][k];
      index.nbr_dist[at] = dists[i][k];
      ++at;
    }
  }

  // median neighborhood size among active points (lower median)
  std::vector<std::size_t> sizes;
  sizes.reserve(index.active_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (index.active[i]) sizes.push_back(index.degree(i));
  }
  const std::size_t mid = (sizes.size() - 1) / 2;
  std::nth_element(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(mid),
                   sizes.end());
  index.size_median = sizes[mid];

  recompute_preferences(index);
  return index;
}

std::vector<double> jump_alignment_weights(const NeighborhoodIndex& index,
                                           std::uint32_t i, std::uint32_t j) {
  require_active(index, i);
  const auto nbrs = index.neighbors(i);
  if (!std::binary_search(nbrs.begin(), nbrs.end(), j)) {
    throw_error(ErrorKind::argument, "point " + std::to_string(j) +
                                         " is not a neighbor of " +
                                         std::to_string(i));
  }
  std::vector<double> w(index.dims);
  if (!alignment_weights_into(index, i, j, w.data())) {
    throw_error(ErrorKind::degenerate,
                "degenerate-jump: zero-length jump vector " + std::to_string(i) +
                    " -> " + std::to_string(j));
  }
  return w;
}

std::vector<double> normalized_eigenvalues(const NeighborhoodIndex& index,
                                           std::uint32_t i) {
  require_active(index, i);
  const auto ev = index.eigenvalues(i);
  const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
  if (!(total > 0.0)) {
    throw_error(ErrorKind::degenerate,
                "degenerate-neighborhood: zero covariance at point " +
                    std::to_string(i));
  }
  std::vector<double> out(ev.begin(), ev.end());
  for (double& v : out) v /= total;
  return out;
}

namespace {

// Shared by alignment_preference and the cache rebuild. Writes the relative
// preference row of point i into out (degree(i) entries).
void preference_row(const NeighborhoodIndex& index, std::uint32_t i,
                    bool strict, double* w_scratch, double* out) {
  const std::size_t deg = index.degree(i);
  if (deg == 0) return;
  const auto ev = index.eigenvalues(i);
  const double ev_total = std::accumulate(ev.begin(), ev.end(), 0.0);
  const auto nbrs = index.neighbors(i);

  if (!(ev_total > 0.0)) {
    if (strict) {
      throw_error(ErrorKind::degenerate,
                  "degenerate-neighborhood: zero covariance at point " +
                      std::to_string(i));
    }
    for (std::size_t k = 0; k < deg; ++k) out[k] = 1.0 / static_cast<double>(deg);
    return;
  }

  double total = 0.0;
  for (std::size_t k = 0; k < deg; ++k) {
    if (!alignment_weights_into(index, i, nbrs[k], w_scratch)) {
      if (strict) {
        throw_error(ErrorKind::degenerate,
                    "degenerate-jump: coincident neighbor " +
                        std::to_string(nbrs[k]) + " of point " +
                        std::to_string(i));
      }
      out[k] = 0.0;  // coincident duplicates carry no directional signal
      continue;
    }
    double e = 0.0;
    for (std::size_t d = 0; d < index.dims; ++d) {
      e += w_scratch[d] * ev[d];
    }
    out[k] = e / ev_total;  // w . lambda-bar, with the shared 1/sum(lambda)
    total += out[k];
  }
  if (total > 0.0) {
    for (std::size_t k = 0; k < deg; ++k) out[k] /= total;
  } else {
    for (std::size_t k = 0; k < deg; ++k) out[k] = 1.0 / static_cast<double>(deg);
  }
}

}  // namespace

std::vector<double> alignment_preference(const NeighborhoodIndex& index,
                                         std::uint32_t i, bool strict) {
  require_active(index, i);
  if (index.degree(i) == 0) {
    throw_error(ErrorKind::argument,
                "point " + std::to_string(i) + " has no neighbors");
  }
  std::vector<double> out(index.degree(i));
  std::vector<double> w(index.dims);
  preference_row(index, i, strict, w.data(), out.data());
  return out;
}

void recompute_preferences(NeighborhoodIndex& index, bool strict) {
  index.pref.assign(index.nbr.size(), 0.0);
  std::vector<double> w(index.dims);
  for (std::size_t i = 0; i < index.n; ++i) {
    if (!index.active[i]) continue;
    preference_row(index, static_cast<std::uint32_t>(i), strict, w.data(),
                   index.pref.data() + index.row_offset[i]);
  }
}

}  // namespace laat
