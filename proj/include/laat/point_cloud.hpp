#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace laat {

// n points in `dims` dimensions plus optional per-point attribute channels
// and optional ground-truth labels (0 = noise, >0 = manifold id).
struct PointCloud {
  std::size_t n = 0;
  std::size_t dims = 0;
  std::vector<double> coords;  // row-major n x dims
  std::vector<std::string> attribute_names;
  std::vector<std::vector<double>> attributes;  // one channel = n values
  std::vector<std::int32_t> labels;             // empty, or n entries

  double coord(std::size_t i, std::size_t d) const {
    return coords[i * dims + d];
  }
  std::span<const double> point(std::size_t i) const {
    return {coords.data() + i * dims, dims};
  }
  bool has_labels() const { return !labels.empty(); }

  // nullptr when the channel does not exist
  const std::vector<double>* attribute(const std::string& name) const;

  // ids of points labeled as manifold members (label > 0)
  std::vector<std::uint32_t> manifold_ids() const;

  // throws ErrorKind::data on any structural violation
  void validate() const;
};

}  // namespace laat
