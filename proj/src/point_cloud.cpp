#include "laat/point_cloud.hpp"

#include <cmath>

#include "laat/error.hpp"

namespace laat {

const std::vector<double>* PointCloud::attribute(
    const std::string& name) const {
  for (std::size_t c = 0; c < attribute_names.size(); ++c) {
    if (attribute_names[c] == name) return &attributes[c];
  }
  return nullptr;
}

std::vector<std::uint32_t> PointCloud::manifold_ids() const {
  std::vector<std::uint32_t> ids;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 0) ids.push_back(static_cast<std::uint32_t>(i));
  }
  return ids;
}

void PointCloud::validate() const {
  if (n < 1) throw_error(ErrorKind::data, "point cloud: n must be >= 1");
  if (dims < 2) throw_error(ErrorKind::data, "point cloud: dims must be >= 2");
  if (coords.size() != n * dims) {
    throw_error(ErrorKind::data, "point cloud: coordinate block size mismatch");
  }
  for (double c : coords) {
    if (!std::isfinite(c)) {
      throw_error(ErrorKind::data, "point cloud: non-finite coordinate");
    }
  }
  if (attribute_names.size() != attributes.size()) {
    throw_error(ErrorKind::data, "point cloud: attribute name/channel mismatch");
  }
  for (std::size_t c = 0; c < attributes.size(); ++c) {
    if (attributes[c].size() != n) {
      throw_error(ErrorKind::data, "point cloud: attribute '" +
                                       attribute_names[c] +
                                       "' has wrong length");
    }
    for (double a : attributes[c]) {
      if (!std::isfinite(a)) {
        throw_error(ErrorKind::data, "point cloud: non-finite attribute in '" +
                                         attribute_names[c] + "'");
      }
    }
  }
  if (!labels.empty() && labels.size() != n) {
    throw_error(ErrorKind::data, "point cloud: label column has wrong length");
  }
}

}  // namespace laat
