#pragma once

#include <cstdint>
#include <vector>

namespace laat {

// Uniform-cell index for exact radius and nearest-neighbor queries in any
// dimension. Points are permuted so each occupied cell is one contiguous
// range of an SoA coordinate block, which lets the distance tests run
// through the data-parallel kernels.
class SpatialGrid {
 public:
  // Reusable per-caller buffers; queries from different threads must use
  // distinct scratch objects.
  struct Scratch {
    std::vector<double> d2;
  };

  // min_cell: lower bound for the cell width in every dimension; radius
  // queries are valid for radius <= min_cell.
  SpatialGrid(const double* coords, std::size_t n, std::size_t dims,
              double min_cell);

  // Appends ids of points with ||x - q|| <= radius (original ids, unsorted).
  void radius_query(const double* q, double radius, Scratch& scratch,
                    std::vector<std::uint32_t>& out_ids,
                    std::vector<double>& out_dists) const;

  // Squared distance from q to the nearest indexed point.
  double nearest_sq(const double* q) const;

  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::size_t dims_ = 0;
  double min_cell_ = 0;
  std::vector<double> mins_;
  std::vector<double> widths_;        // per-dim cell width (>= min_cell)
  std::vector<std::int64_t> grid_dims_;
  std::vector<std::uint64_t> strides_;
  std::vector<std::uint32_t> perm_;   // sorted position -> original id
  std::vector<double> soa_;           // soa_[d * n + k], k = sorted position
  std::vector<std::uint64_t> cells_;  // sorted occupied cell ids
  std::vector<std::uint32_t> cell_offsets_;  // |cells_| + 1

  std::int64_t cell_coord(double x, std::size_t d) const;
  std::uint64_t cell_id_of(const std::int64_t* c) const;
  // [begin, end) range of sorted positions for a cell id, empty if vacant
  std::pair<std::uint32_t, std::uint32_t> cell_range(std::uint64_t id) const;
};

}  // namespace laat
