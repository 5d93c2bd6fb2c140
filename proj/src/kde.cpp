#include "orthant/kde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orthant/density.hpp"
#include "orthant/geodesic.hpp"
#include "orthant/normal.hpp"

namespace orthant {

namespace {

constexpr double kDecayRadiusFactor = 10.0;  // exp(-50) truncation error

double require_bandwidth(double h) {
  if (!(h > 0.0)) throw Error("bad-bandwidth", "bandwidth must be > 0");
  return h;
}

double spider_constant(int k, double dist_from_origin, double h) {
  return 1.0 / (std::sqrt(2.0 * M_PI) * h *
                (1.0 + (k - 2) * norm_cdf(-dist_from_origin / h)));
}

}  // namespace

std::string to_string(KernelKind k) {
  return k == KernelKind::k1 ? "k1" : "k2";
}

KernelKind kernel_from_string(const std::string& s) {
  if (s == "k1" || s == "K1") return KernelKind::k1;
  if (s == "k2" || s == "K2") return KernelKind::k2;
  throw Error("bad-parameter", "unknown kernel: " + s);
}

std::pair<int, double> spider_coord(const Point& x) {
  if (!x.space()->is_spider())
    throw Error("bad-parameter", "point is not on a spider");
  if (x.is_origin()) return {-1, 0.0};
  return {x.coords()[0].first, x.coords()[0].second};
}

double spider_distance(const Point& x, const Point& y) {
  auto [lx, ux] = spider_coord(x);
  auto [ly, uy] = spider_coord(y);
  if (lx == ly) return std::abs(ux - uy);
  if (lx < 0 || ly < 0) return ux + uy;  // one point is the origin
  return ux + uy;
}

double normalizing_constant(const Point& x, double h, double tol) {
  require_bandwidth(h);
  const auto& space = *x.space();
  if (space.is_spider())
    return spider_constant(space.axis_count(), x.norm(), h);

  double mass = integrate(
      x.space(),
      [&](const Point& y) {
        double d = distance(x, y).distance;
        return std::exp(-d * d / (2.0 * h * h));
      },
      BorelBoxSet::around(x, kDecayRadiusFactor * h), tol);
  return 1.0 / mass;
}

double kernel_eval(KernelKind kind, const Point& x, const Point& xi, double h,
                   double tol) {
  require_bandwidth(h);
  const Point& anchor = (kind == KernelKind::k1) ? xi : x;
  double c = normalizing_constant(anchor, h, tol);
  double d = x.space()->is_spider() ? spider_distance(x, xi)
                                    : distance(x, xi).distance;
  return c * std::exp(-d * d / (2.0 * h * h));
}

double kde_evaluate(const std::vector<Point>& sample, const Point& x, double h,
                    KernelKind kind, double tol) {
  if (sample.empty()) throw Error("empty-sample", "sample must be nonempty");
  require_bandwidth(h);
  KdeEstimator est(sample, h, kind, tol);
  return est(x);
}

KdeEstimator::KdeEstimator(std::vector<Point> sample, double h,
                           KernelKind kind, double tol)
    : sample_(std::move(sample)), h_(require_bandwidth(h)), kind_(kind),
      tol_(tol) {
  if (sample_.empty()) throw Error("empty-sample", "sample must be nonempty");
  if (kind_ == KernelKind::k1) {
    constants_.reserve(sample_.size());
    for (const auto& xi : sample_)
      constants_.push_back(normalizing_constant(xi, h_, tol_));
  }
}

double KdeEstimator::operator()(const Point& x) const {
  const bool spider = x.space()->is_spider();
  const double inv2h2 = 1.0 / (2.0 * h_ * h_);
  double sum = 0.0;
  if (kind_ == KernelKind::k1) {
    for (std::size_t i = 0; i < sample_.size(); ++i) {
      double d = spider ? spider_distance(x, sample_[i])
                        : distance(x, sample_[i]).distance;
      sum += constants_[i] * std::exp(-d * d * inv2h2);
    }
  } else {
    double c = normalizing_constant(x, h_, tol_);
    for (const auto& xi : sample_) {
      double d =
          spider ? spider_distance(x, xi) : distance(x, xi).distance;
      sum += std::exp(-d * d * inv2h2);
    }
    sum *= c;
  }
  return sum / static_cast<double>(sample_.size());
}

double smoothed_density(const DensitySpec& f, const Point& x, double h,
                        KernelKind kind, double tol) {
  require_bandwidth(h);
  const double inv2h2 = 1.0 / (2.0 * h * h);
  const bool spider = x.space()->is_spider();
  BorelBoxSet domain = BorelBoxSet::around(x, kDecayRadiusFactor * h);

  if (kind == KernelKind::k2) {
    double c = normalizing_constant(x, h, tol);
    return c * integrate(
                   x.space(),
                   [&](const Point& y) {
                     double d = spider ? spider_distance(x, y)
                                       : distance(x, y).distance;
                     return std::exp(-d * d * inv2h2) * f(y);
                   },
                   domain, tol);
  }
  return integrate(
      x.space(),
      [&](const Point& y) {
        double d = spider ? spider_distance(x, y) : distance(x, y).distance;
        double c = normalizing_constant(y, h, tol);
        return c * std::exp(-d * d * inv2h2) * f(y);
      },
      domain, tol);
}

double BandwidthSchedule::value_at(long n) const {
  switch (form) {
    case Form::power:
      return std::pow(static_cast<double>(n), -beta);
    case Form::log_power:
      return std::pow(std::log(static_cast<double>(n)), -beta);
    case Form::explicit_list:
      for (const auto& [m, h] : values)
        if (m == n) return h;
      throw Error("bad-parameter", "no bandwidth recorded for this N");
  }
  return 0.0;
}

namespace {

ScheduleReport check_explicit(const BandwidthSchedule& s) {
  auto values = s.values;
  std::sort(values.begin(), values.end());
  if (values.size() < 2)
    throw Error("bad-parameter", "explicit schedule needs >= 2 entries");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i].second > 0.0))
      throw Error("bad-parameter", "bandwidths must be > 0");
    if (i > 0 && values[i].second > values[i - 1].second)
      throw Error("bad-parameter", "bandwidths must be nonincreasing in N");
  }

  auto seq1 = [&](std::size_t i) {
    double h = values[i].second;
    return static_cast<double>(values[i].first) * std::pow(h, s.p) /
           std::abs(std::log(h));
  };
  auto seq2 = [&](std::size_t i) {
    double n = static_cast<double>(values[i].first);
    return std::abs(std::log(values[i].second)) / std::log(std::log(n));
  };

  ScheduleReport r;
  bool inc1 = true, inc2 = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    inc1 = inc1 && seq1(i) > seq1(i - 1);
    inc2 = inc2 && seq2(i) > seq2(i - 1);
  }
  r.density_growth = {inc1, false,
                      "heuristic: N h^p/|log h| trend over supplied range"};
  r.log_ratio = {inc2, false,
                 "heuristic: |log h|/log log N trend over supplied range"};

  double worst = 0.0;
  bool found = false;
  for (const auto& [n, h] : values)
    for (const auto& [m, h2] : values)
      if (m == 2 * n) {
        found = true;
        worst = std::max(worst, std::pow(h / h2, s.p));
      }
  r.halving = {found, false,
               found ? "heuristic: max observed h_N^p/h_2N^p = " +
                           std::to_string(worst)
                     : "no (N, 2N) pairs in the supplied range"};
  return r;
}

}  // namespace

ScheduleReport check_bandwidth_schedule(const BandwidthSchedule& s,
                                        const std::vector<long>& n_range) {
  (void)n_range;  // analytic forms need no sampling
  if (s.form == BandwidthSchedule::Form::explicit_list)
    return check_explicit(s);
  if (!(s.beta > 0.0))
    throw Error("bad-parameter", "schedule exponent must be > 0");
  if (s.p < 1) throw Error("bad-parameter", "dimension p must be >= 1");

  std::ostringstream bp;
  bp << "beta*p = " << s.beta * s.p;

  ScheduleReport r;
  if (s.form == BandwidthSchedule::Form::power) {
    // h = N^-beta: N h^p / |log h| = N^(1-beta p) / (beta log N).
    bool c1 = s.beta * s.p < 1.0;
    r.density_growth = {c1, true,
                        bp.str() + (c1 ? " < 1" : " >= 1") +
                            "; N^(1-beta p)/(beta log N)"};
    // |log h| / log log N = beta log N / log log N -> inf for any beta > 0.
    r.log_ratio = {true, true, "beta log N / log log N -> inf"};
    // h_N^p / h_2N^p = 2^(beta p), a constant.
    r.halving = {true, true, "certified by c = 2^(beta p)"};
  } else {
    // h = (log N)^-beta.
    r.density_growth = {true, true,
                        "N (log N)^(-beta p) / (beta log log N) -> inf"};
    r.log_ratio = {false, true,
                   "beta log log N / log log N = beta, a finite limit"};
    r.halving = {true, true, "(log 2N / log N)^(beta p) <= 1"};
  }
  return r;
}

}  // namespace orthant
