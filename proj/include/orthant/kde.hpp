#pragma once

#include <string>
#include <vector>

#include "orthant/complex.hpp"

namespace orthant {

class DensitySpec;

// K1 normalizes at the data point (the original estimator); K2 normalizes at
// the evaluation point, which removes the asymptotic boundary bias.
enum class KernelKind { k1, k2 };

std::string to_string(KernelKind k);
KernelKind kernel_from_string(const std::string& s);

// C(x, h) = 1 / integral of exp(-d(., x)^2 / 2h^2) against nu.
// Closed form on k-spiders; adaptive quadrature elsewhere.
double normalizing_constant(const Point& x, double h, double tol);

// K1(x | xi, h) = C(xi, h) exp(-d(x, xi)^2 / 2h^2);
// K2(x | xi, h) = C(x, h)  exp(-d(x, xi)^2 / 2h^2).
double kernel_eval(KernelKind kind, const Point& x, const Point& xi, double h,
                   double tol);

// Arithmetic mean of kernel_eval over the sample, with the K2 constant
// computed once per evaluation point. Fixed summation order.
double kde_evaluate(const std::vector<Point>& sample, const Point& x, double h,
                    KernelKind kind, double tol);

// Caches the per-sample-point normalizing constants (the expensive part of
// K1) so that repeated evaluations and replicate experiments stay cheap.
class KdeEstimator {
public:
  KdeEstimator(std::vector<Point> sample, double h, KernelKind kind,
               double tol);

  double operator()(const Point& x) const;

  double bandwidth() const { return h_; }
  KernelKind kind() const { return kind_; }
  const std::vector<Point>& sample() const { return sample_; }

private:
  std::vector<Point> sample_;
  double h_;
  KernelKind kind_;
  double tol_;
  std::vector<double> constants_;  // C(X_i, h) when kind == k1
};

// Infinite-sample limit of the estimator: the expectation of the kernel under
// the density f, computed by quadrature.
double smoothed_density(const DensitySpec& f, const Point& x, double h,
                        KernelKind kind, double tol);

// Bandwidth sequence h_N for the uniform-consistency conditions:
//   1. N h_N^p / |log h_N| -> inf
//   2. |log h_N| / log log N -> inf
//   3. h_N^p <= c h_{2N}^p for some constant c
struct BandwidthSchedule {
  enum class Form {
    power,         // h_N = N^(-beta)
    log_power,     // h_N = (log N)^(-beta)
    explicit_list  // sampled (N, h) pairs; diagnostics only
  };
  Form form = Form::power;
  double beta = 0.25;
  int p = 1;                                   // space dimension
  std::vector<std::pair<long, double>> values;  // for explicit_list

  double value_at(long n) const;
};

struct ConditionVerdict {
  bool holds = false;
  bool analytic = false;  // false = heuristic trend diagnostic
  std::string detail;
};

struct ScheduleReport {
  ConditionVerdict density_growth;  // condition 1
  ConditionVerdict log_ratio;       // condition 2
  ConditionVerdict halving;         // condition 3
  bool all_hold() const {
    return density_growth.holds && log_ratio.holds && halving.holds;
  }
};

ScheduleReport check_bandwidth_schedule(const BandwidthSchedule& s,
                                        const std::vector<long>& n_range);

// (leg, coordinate) of a point on a k-spider; leg == -1 at the origin.
std::pair<int, double> spider_coord(const Point& x);

double spider_distance(const Point& x, const Point& y);

}  // namespace orthant
