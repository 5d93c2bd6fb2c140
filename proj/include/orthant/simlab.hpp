#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orthant/density.hpp"
#include "orthant/kde.hpp"

namespace orthant {

// The two benchmark densities on a 3-spider: a single bump centered at 0.5 on
// leg 0 (sigma 0.5), and an equal two-mode mixture at 0.6 on legs 0 and 1
// (sigma 0.4).
DensitySpec f1_density(SpacePtr spider);
DensitySpec f2_density(SpacePtr spider);

struct ExperimentConfig {
  SpacePtr space;
  DensitySpec truth;
  long n = 1;
  int replicates = 1;
  double h = 0.1;
  std::vector<KernelKind> kernels{KernelKind::k1, KernelKind::k2};
  uint64_t seed = 0;
  std::vector<Point> eval_points;
  double tol = 1e-7;
  int jobs = 1;

  // LCMLE experiment: sample sizes to fit (falls back to {n} when empty) and
  // the per-leg overlay grid.
  std::vector<long> n_schedule;
  int grid_points = 200;
  double grid_max = 2.5;

  // Output paths; empty = do not write.
  std::string bias_csv;
  std::string overlay_csv;
  std::string tv_csv;
};

struct BiasReport {
  struct Cell {
    KernelKind kernel;
    Point eval_point;
    double truth = 0.0;
    std::vector<double> estimates;  // one per replicate, in replicate order
    double mean_bias = 0.0;
    double std_error = 0.0;
  };
  std::vector<Cell> cells;
};

// Replicated sampling experiment: per replicate draw N points from the truth,
// evaluate each kernel's estimator at each eval point, aggregate the bias.
// Replicates run on disjoint RNG substreams and may execute in parallel;
// aggregation order is fixed. Writes bias_csv when set.
BiasReport run_bias_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  KernelKind kernel;
  double h = 0.0;
  double smoothed = 0.0;
  double truth = 0.0;
  double bias = 0.0;  // smoothed - truth
};

// Sampling-free bias: the infinite-sample smoothed density at x minus the
// truth, for each bandwidth in hs.
std::vector<SweepRow> exact_bias_sweep(const DensitySpec& truth,
                                       const Point& x,
                                       const std::vector<double>& hs,
                                       const std::vector<KernelKind>& kernels,
                                       double tol);

struct LcmleReport {
  struct TvRow {
    long n = 0;
    uint64_t seed = 0;
    double tv = 0.0;
  };
  struct OverlayRow {
    int orthant = 0;
    double coord = 0.0;
    double truth = 0.0;
    double estimate = 0.0;
    std::string method;
  };
  std::vector<TvRow> tv;
  std::vector<OverlayRow> overlay;  // first seed of each N in the schedule
};

// Fits the log-concave MLE for each N in the schedule and `replicates` seeds,
// recording total-variation distances to the truth and grid overlays.
// Writes tv_csv / overlay_csv when set.
LcmleReport run_lcmle_experiment(const ExperimentConfig& cfg);

// CSV emission (comma separator, header row, 17 significant digits).
void write_bias_csv(const BiasReport& report, const std::string& path);
void write_overlay_csv(const LcmleReport& report, const std::string& path);
void write_tv_csv(const LcmleReport& report, const std::string& path);

// Compact eval-point label for CSV cells ("origin" or "leg:coord" on
// spiders, "axis=value;..." elsewhere).
std::string point_label(const Point& x);

}  // namespace orthant
