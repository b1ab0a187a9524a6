#include "laat/spatial_grid.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "laat/error.hpp"
#include "laat/kernels.hpp"

namespace laat {

namespace {

// Walks an axis-aligned box of cell coordinates. `fn(c)` receives each cell.
template <typename Fn>
void for_each_cell(const std::int64_t* lo, const std::int64_t* hi,
                   std::size_t dims, std::int64_t* c, Fn&& fn) {
  for (std::size_t d = 0; d < dims; ++d) {
    if (lo[d] > hi[d]) return;
    c[d] = lo[d];
  }
  for (;;) {
    fn(c);
    std::size_t d = 0;
    while (d < dims) {
      if (++c[d] <= hi[d]) break;
      c[d] = lo[d];
      ++d;
    }
    if (d == dims) return;
  }
}

constexpr std::size_t kMaxDims = 16;

}  // namespace

SpatialGrid::SpatialGrid(const double* coords, std::size_t n, std::size_t dims,
                         double min_cell)
    : n_(n), dims_(dims), min_cell_(min_cell) {
  if (n == 0) throw_error(ErrorKind::argument, "spatial grid: empty point set");
  if (dims == 0 || dims > kMaxDims) {
    throw_error(ErrorKind::argument, "spatial grid: unsupported dimensionality");
  }
  if (!(min_cell > 0.0)) {
    throw_error(ErrorKind::argument, "spatial grid: cell size must be positive");
  }

  mins_.assign(dims, std::numeric_limits<double>::infinity());
  std::vector<double> maxs(dims, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      mins_[d] = std::min(mins_[d], coords[i * dims + d]);
      maxs[d] = std::max(maxs[d], coords[i * dims + d]);
    }
  }

  // Cap per-dim resolution so the linear cell id cannot overflow. The width
  // never drops below min_cell, so a 3^D block always covers a radius query.
  const std::int64_t cap = std::int64_t{1} << (62 / dims);
  grid_dims_.resize(dims);
  widths_.resize(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const double extent = maxs[d] - mins_[d];
    std::int64_t g = static_cast<std::int64_t>(std::floor(extent / min_cell));
    g = std::clamp<std::int64_t>(g, 1, cap);
    grid_dims_[d] = g;
    widths_[d] = extent > 0.0 ? extent / static_cast<double>(g) : 0.0;
  }
  strides_.resize(dims);
  std::uint64_t stride = 1;
  for (std::size_t d = 0; d < dims; ++d) {
    strides_[d] = stride;
    stride *= static_cast<std::uint64_t>(grid_dims_[d]);
  }

  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(n);
  std::int64_t c[kMaxDims];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      c[d] = cell_coord(coords[i * dims + d], d);
    }
    keyed[i] = {cell_id_of(c), static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());

  perm_.resize(n);
  soa_.resize(n * dims);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t id = keyed[k].second;
    perm_[k] = id;
    for (std::size_t d = 0; d < dims; ++d) {
      soa_[d * n + k] = coords[id * dims + d];
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || keyed[k].first != keyed[k - 1].first) {
      cells_.push_back(keyed[k].first);
      cell_offsets_.push_back(static_cast<std::uint32_t>(k));
    }
  }
  cell_offsets_.push_back(static_cast<std::uint32_t>(n));
}

std::int64_t SpatialGrid::cell_coord(double x, std::size_t d) const {
  if (widths_[d] <= 0.0) return 0;
  const double rel = (x - mins_[d]) / widths_[d];
  auto idx = static_cast<std::int64_t>(std::floor(rel));
  return std::clamp<std::int64_t>(idx, 0, grid_dims_[d] - 1);
}

std::uint64_t SpatialGrid::cell_id_of(const std::int64_t* c) const {
  std::uint64_t id = 0;
  for (std::size_t d = 0; d < dims_; ++d) {
    id += static_cast<std::uint64_t>(c[d]) * strides_[d];
  }
  return id;
}

std::pair<std::uint32_t, std::uint32_t> SpatialGrid::cell_range(
    std::uint64_t id) const {
  const auto it = std::lower_bound(cells_.begin(), cells_.end(), id);
  if (it == cells_.end() || *it != id) return {0, 0};
  const std::size_t slot = static_cast<std::size_t>(it - cells_.begin());
  return {cell_offsets_[slot], cell_offsets_[slot + 1]};
}

void SpatialGrid::radius_query(const double* q, double radius,
                               Scratch& scratch,
                               std::vector<std::uint32_t>& out_ids,
                               std::vector<double>& out_dists) const {
  assert(radius <= min_cell_ * (1.0 + 1e-12));
  const double r2 = radius * radius;
  const auto& kn = kernels::ops();

  std::int64_t lo[kMaxDims];
  std::int64_t hi[kMaxDims];
  std::int64_t c[kMaxDims];
  for (std::size_t d = 0; d < dims_; ++d) {
    const std::int64_t cd = cell_coord(q[d], d);
    lo[d] = std::max<std::int64_t>(cd - 1, 0);
    hi[d] = std::min<std::int64_t>(cd + 1, grid_dims_[d] - 1);
  }

  for_each_cell(lo, hi, dims_, c, [&](const std::int64_t* cell) {
    const auto [begin, end] = cell_range(cell_id_of(cell));
    if (begin == end) return;
    const std::size_t count = end - begin;
    scratch.d2.resize(count);
    kn.sq_dists(soa_.data() + begin, n_, dims_, count, q, scratch.d2.data());
    for (std::size_t k = 0; k < count; ++k) {
      if (scratch.d2[k] <= r2) {
        out_ids.push_back(perm_[begin + k]);
        out_dists.push_back(std::sqrt(scratch.d2[k]));
      }
    }
  });
}

double SpatialGrid::nearest_sq(const double* q) const {
  const auto& kn = kernels::ops();
  std::int64_t center[kMaxDims];
  std::int64_t max_ring = 0;
  double min_width = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < dims_; ++d) {
    center[d] = cell_coord(q[d], d);
    max_ring = std::max(
        max_ring, std::max(center[d], grid_dims_[d] - 1 - center[d]));
    if (widths_[d] > 0.0) min_width = std::min(min_width, widths_[d]);
  }
  if (!std::isfinite(min_width)) min_width = 0.0;

  double best = std::numeric_limits<double>::infinity();
  std::int64_t lo[kMaxDims];
  std::int64_t hi[kMaxDims];
  std::int64_t c[kMaxDims];
  for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
    if (ring >= 1) {
      // any point in a ring-`ring` cell is at least (ring-1) full cells away
      const double bound = static_cast<double>(ring - 1) * min_width;
      if (best <= bound * bound) break;
    }
    for (std::size_t d = 0; d < dims_; ++d) {
      lo[d] = std::max<std::int64_t>(center[d] - ring, 0);
      hi[d] = std::min<std::int64_t>(center[d] + ring, grid_dims_[d] - 1);
    }
    for_each_cell(lo, hi, dims_, c, [&](const std::int64_t* cell) {
      std::int64_t cheb = 0;
      for (std::size_t d = 0; d < dims_; ++d) {
        cheb = std::max(cheb, std::abs(cell[d] - center[d]));
      }
      if (cheb != ring) return;  // interior already visited
      const auto [begin, end] = cell_range(cell_id_of(cell));
      if (begin == end) return;
      best = std::min(
          best, kn.min_sq_dist(soa_.data() + begin, n_, dims_, end - begin, q));
    });
  }
  return best;
}

}  // namespace laat
