#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "laat/point_cloud.hpp"

namespace laat {

// Radius-neighborhood graph with cached local PCA and per-edge alignment
// preferences. Built once, then shared read-only by walkers and kernels.
//
// Adjacency is CSR over all points; rows of inactive points are empty.
// Local PCA is computed over the geometric neighborhood (all points within
// the radius, plus the center) before the degeneracy filter, matching the
// preprocessing order of the construction it implements.
struct NeighborhoodIndex {
  double radius = 0.0;
  std::size_t n = 0;
  std::size_t dims = 0;
  std::vector<double> coords;  // row-major copy of the cloud coordinates

  std::vector<std::size_t> row_offset;  // n + 1
  std::vector<std::uint32_t> nbr;       // ids, ascending within a row
  std::vector<double> nbr_dist;         // Euclidean distance per edge
  std::vector<double> pref;             // relative alignment preference per edge

  // nonincreasing eigenvalues and row-major eigenvectors of the local
  // covariance: component c of v_d for point i is eigvec[(i*dims + d)*dims + c]
  std::vector<double> eigval;  // n * dims
  std::vector<double> eigvec;  // n * dims * dims

  std::vector<std::uint8_t> active;
  std::size_t active_count = 0;
  std::size_t size_median = 0;  // median neighborhood size among active points

  std::size_t degree(std::size_t i) const {
    return row_offset[i + 1] - row_offset[i];
  }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {nbr.data() + row_offset[i], degree(i)};
  }
  std::span<const double> preferences(std::size_t i) const {
    return {pref.data() + row_offset[i], degree(i)};
  }
  std::span<const double> distances(std::size_t i) const {
    return {nbr_dist.data() + row_offset[i], degree(i)};
  }
  std::span<const double> eigenvalues(std::size_t i) const {
    return {eigval.data() + i * dims, dims};
  }
  // d-th eigenvector of point i
  std::span<const double> eigenvector(std::size_t i, std::size_t d) const {
    return {eigvec.data() + (i * dims + d) * dims, dims};
  }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dims, dims};
  }
};

// Exact radius-neighbor lists plus per-point PCA. Points whose geometric
// neighborhood is smaller than the ambient dimension are dropped, and the
// filter cascades until every active point keeps >= dims active neighbors.
// Throws data errors when nothing survives, argument errors for radius <= 0.
NeighborhoodIndex build_index(const PointCloud& cloud, double radius,
                              int threads = 1);

// Per-dimension alignment weights of the jump i -> j (j must be a neighbor
// of i): |cos| of the angle to each eigen-direction, normalized to sum 1.
std::vector<double> jump_alignment_weights(const NeighborhoodIndex& index,
                                           std::uint32_t i, std::uint32_t j);

// Eigenvalues of point i normalized to sum 1 (relative importance of the
// eigen-directions).
std::vector<double> normalized_eigenvalues(const NeighborhoodIndex& index,
                                           std::uint32_t i);

// Relative preference for each neighbor of i, aligned with neighbors(i).
// strict=true surfaces degenerate-jump / degenerate-neighborhood errors;
// otherwise coincident neighbors contribute zero preference and a fully
// degenerate row falls back to uniform.
std::vector<double> alignment_preference(const NeighborhoodIndex& index,
                                         std::uint32_t i, bool strict = false);

// Rebuilds the cached per-edge preferences (used after mutating the PCA
// fields, e.g. in invariance tests).
void recompute_preferences(NeighborhoodIndex& index, bool strict = false);

}  // namespace laat
