#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "laat/point_cloud.hpp"

namespace laat::metrics {

// Non-owning view of a dense point block (row-major n x dims).
struct PointSetView {
  const double* data = nullptr;
  std::size_t n = 0;
  std::size_t dims = 0;
};

// Rows of `cloud` selected by `ids`, materialized as a dense block.
std::vector<double> gather_points(const PointCloud& cloud,
                                  std::span<const std::uint32_t> ids);

// Classic Hausdorff distance: max over the two directed sup-inf terms.
// Nearest-neighbor queries run on a spatial grid; both sets must be nonempty.
double hausdorff(PointSetView x, PointSetView y);

// Average Hausdorff distance: symmetric mean nearest-neighbor distance,
// sum_y inf_x ||x-y|| / (2 N_y) + sum_x inf_y ||x-y|| / (2 N_x).
double average_hausdorff(PointSetView x, PointSetView y);

struct SweepEntry {
  double threshold = 0.0;
  std::size_t survivors = 0;
  double ahd = 0.0;
};

struct AhdReport {
  std::vector<SweepEntry> sweep;  // thresholds descending, survivors growing
  double best_threshold = 0.0;
  std::size_t best_survivors = 0;
  double best_ahd = 0.0;
};

// AHD of { i : scores[i] >= t } against the ground-truth ids for every
// distinct score value t, descending (subsampled to 2000 quantiles above
// 50k points). Thresholds with no survivors are skipped. Incremental:
// the survivor set only grows, so each point is costed once.
AhdReport threshold_sweep(std::span<const double> scores,
                          const PointCloud& cloud,
                          std::span<const std::uint32_t> ground_truth);

// AHD of the survivors at one fixed threshold (the calibrate-then-apply
// protocol's second step). Throws when nothing survives.
struct ThresholdedAhd {
  std::size_t survivors = 0;
  double ahd = 0.0;
};
ThresholdedAhd ahd_at_threshold(std::span<const double> scores,
                                double threshold, const PointCloud& cloud,
                                std::span<const std::uint32_t> ground_truth);

// Runs `runner` on the labeled calibration cloud, sweeps its scores and
// returns the AHD-minimizing threshold (applied unchanged to evaluation
// runs afterwards).
struct CalibrationResult {
  double threshold = 0.0;
  AhdReport report;
};
CalibrationResult calibrate_threshold(
    const std::function<std::vector<double>(const PointCloud&)>& runner,
    const PointCloud& calibration_cloud);

struct PrPoint {
  std::size_t count = 0;
  double precision = 0.0;
  double recall = 0.0;
};

// Top-`target_count` points by score (ties broken by ascending id) scored
// against the positive mask.
PrPoint precision_recall_at_count(std::span<const double> scores,
                                  std::span<const std::uint8_t> positive,
                                  std::size_t target_count);

struct PrCurve {
  std::vector<PrPoint> entries;
};
PrCurve pr_curve(std::span<const double> scores,
                 std::span<const std::uint8_t> positive,
                 std::span<const std::size_t> counts);

// Per-epoch AHD with per-epoch calibrated thresholds: epoch e's threshold is
// swept on the calibration snapshot, then applied to the evaluation snapshot.
std::vector<std::pair<int, double>> convergence_curve(
    const std::vector<std::vector<double>>& eval_snapshots,
    const PointCloud& eval_cloud, std::span<const std::uint32_t> eval_truth,
    const std::vector<std::vector<double>>& calib_snapshots,
    const PointCloud& calib_cloud, std::span<const std::uint32_t> calib_truth);

}  // namespace laat::metrics
