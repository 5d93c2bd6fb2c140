#include <doctest.h>

#include <cmath>
#include <vector>

#include "orthant/density.hpp"
#include "orthant/geodesic.hpp"
#include "orthant/kde.hpp"
#include "orthant/rng.hpp"

using namespace orthant;

namespace {

// Simpson integral of g over [a, b], independent of the library quadrature.
double simpson(const std::function<double(double)>& g, double a, double b,
               int panels) {
  double h = (b - a) / panels;
  double s = g(a) + g(b);
  for (int i = 1; i < panels; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Gaussian kernel mass around a point at distance r down one leg of a
// k-spider: |u - r| on the home leg, u + r on the k-1 others.
double spider_kernel_mass(int k, double r, double h) {
  double upper = r + 14.0 * h;
  auto home = [&](double u) {
    return std::exp(-(u - r) * (u - r) / (2.0 * h * h));
  };
  auto away = [&](double u) {
    return std::exp(-(u + r) * (u + r) / (2.0 * h * h));
  };
  return simpson(home, 0.0, upper, 4000) +
         (k - 1) * simpson(away, 0.0, upper, 4000);
}

Point leg_point(const SpacePtr& s, int leg, double u) {
  return Point::make_indexed(s, {{leg, u}});
}

}  // namespace

TEST_CASE("spider coordinates and distances") {
  SpacePtr s = OrthantComplex::spider(3);
  Point o = Point::origin(s);
  Point a = leg_point(s, 0, 0.5);
  Point b = leg_point(s, 1, 0.7);
  Point c = leg_point(s, 0, 1.2);

  CHECK(spider_coord(o) == std::pair<int, double>{-1, 0.0});
  CHECK(spider_coord(a) == std::pair<int, double>{0, 0.5});
  CHECK(spider_distance(a, b) == doctest::Approx(1.2));
  CHECK(spider_distance(a, c) == doctest::Approx(0.7));
  CHECK(spider_distance(a, o) == doctest::Approx(0.5));
  CHECK(spider_distance(a, a) == 0.0);

  SpacePtr qp = OrthantComplex::quarter_planes3();
  CHECK_THROWS_AS(spider_coord(Point::origin(qp)), Error);
}

TEST_CASE("normalizing constant on spiders matches quadrature") {
  SpacePtr s3 = OrthantComplex::spider(3);
  double c_origin = normalizing_constant(Point::origin(s3), 1.0, 1e-10);
  CHECK(c_origin == doctest::Approx(1.0 / (std::sqrt(2.0 * M_PI) * 1.5)));
  CHECK(c_origin == doctest::Approx(0.26596).epsilon(1e-4));
  CHECK(c_origin ==
        doctest::Approx(1.0 / spider_kernel_mass(3, 0.0, 1.0)).epsilon(1e-9));

  double c_deep = normalizing_constant(leg_point(s3, 1, 50.0), 1.0, 1e-10);
  CHECK(c_deep == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-9));
  CHECK(c_deep == doctest::Approx(0.39894).epsilon(1e-4));

  SpacePtr half = OrthantComplex::spider(1);
  double c_half = normalizing_constant(Point::origin(half), 1.0, 1e-10);
  CHECK(c_half == doctest::Approx(2.0 / std::sqrt(2.0 * M_PI)));
  CHECK(c_half == doctest::Approx(0.79788).epsilon(1e-4));
  CHECK(c_half ==
        doctest::Approx(1.0 / spider_kernel_mass(1, 0.0, 1.0)).epsilon(1e-9));

  // Generic positions and bandwidths against the Simpson oracle.
  for (int k : {2, 3, 5})
    for (double r : {0.0, 0.3, 1.0})
      for (double h : {0.25, 1.0, 2.0}) {
        SpacePtr s = OrthantComplex::spider(k);
        Point x = r == 0.0 ? Point::origin(s) : leg_point(s, k - 1, r);
        CHECK(normalizing_constant(x, h, 1e-10) ==
              doctest::Approx(1.0 / spider_kernel_mass(k, r, h)).epsilon(1e-8));
      }

  CHECK_THROWS_AS(normalizing_constant(Point::origin(s3), 0.0, 1e-8), Error);
  CHECK_THROWS_AS(normalizing_constant(Point::origin(s3), -1.0, 1e-8), Error);
}

TEST_CASE("normalizing constant grows away from the origin when k > 2") {
  SpacePtr s = OrthantComplex::spider(4);
  double prev = 0.0;
  for (double r : {0.0, 0.2, 0.5, 1.0, 3.0}) {
    double c = normalizing_constant(leg_point(s, 0, r), 0.7, 1e-9);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("normalizing constant off spiders uses quadrature") {
  SpacePtr qp = OrthantComplex::quarter_planes3();
  // Deep inside one sheet the space is locally R^2: C -> 1/(2 pi h^2).
  Point deep = Point::make(qp, {{"e", 8.0}, {"a", 8.0}});
  double h = 0.5;
  CHECK(normalizing_constant(deep, h, 1e-9) ==
        doctest::Approx(1.0 / (2.0 * M_PI * h * h)).epsilon(1e-7));
}

TEST_CASE("kernel evaluation") {
  SpacePtr s = OrthantComplex::spider(3);
  Point o = Point::origin(s);
  Point xi = leg_point(s, 0, 0.5);
  double h = 0.5;

  CHECK(kernel_eval(KernelKind::k1, xi, xi, h, 1e-9) ==
        doctest::Approx(normalizing_constant(xi, h, 1e-9)));
  CHECK(kernel_eval(KernelKind::k2, xi, xi, h, 1e-9) ==
        doctest::Approx(normalizing_constant(xi, h, 1e-9)));

  double expected = (1.0 / (std::sqrt(2.0 * M_PI) * 0.75)) * std::exp(-0.5);
  CHECK(kernel_eval(KernelKind::k2, o, xi, h, 1e-9) ==
        doctest::Approx(expected));
  CHECK(kernel_eval(KernelKind::k2, o, xi, h, 1e-9) ==
        doctest::Approx(0.32262).epsilon(1e-4));

  CHECK(to_string(KernelKind::k1) == "k1");
  CHECK(kernel_from_string("K2") == KernelKind::k2);
  CHECK_THROWS_AS(kernel_from_string("k3"), Error);
}

TEST_CASE("kde evaluation basics") {
  SpacePtr s = OrthantComplex::spider(3);
  Point o = Point::origin(s);
  Point a = leg_point(s, 0, 0.5);
  Point b = leg_point(s, 1, 0.5);
  double h = 0.5;

  for (KernelKind kind : {KernelKind::k1, KernelKind::k2}) {
    CHECK(kde_evaluate({a}, o, h, kind, 1e-9) ==
          doctest::Approx(kernel_eval(kind, o, a, h, 1e-9)));
    CHECK(kde_evaluate({a, a, a}, o, h, kind, 1e-9) ==
          doctest::Approx(kde_evaluate({a}, o, h, kind, 1e-9)));
  }
  CHECK(kde_evaluate({a, b}, o, h, KernelKind::k2, 1e-9) ==
        doctest::Approx(0.32262).epsilon(1e-4));

  CHECK_THROWS_AS(kde_evaluate({}, o, h, KernelKind::k1, 1e-9), Error);
  CHECK_THROWS_AS(kde_evaluate({a}, o, 0.0, KernelKind::k1, 1e-9), Error);

  KdeEstimator est({a, b}, h, KernelKind::k1, 1e-9);
  CHECK(est.bandwidth() == h);
  CHECK(est.kind() == KernelKind::k1);
  CHECK(est(o) == doctest::Approx(kde_evaluate({a, b}, o, h, KernelKind::k1,
                                               1e-9)));
}

TEST_CASE("kernels integrate to one") {
  std::vector<SpacePtr> spaces = {OrthantComplex::spider(3),
                                  OrthantComplex::quarter_planes3()};
  for (const auto& space : spaces) {
    CounterRng rng(7);
    const auto& maxf = space->maximal_faces();
    for (double h : {0.1, 0.5, 1.0}) {
      const Face& f = maxf[rng.next_u64() % maxf.size()];
      std::vector<std::pair<int, double>> coords;
      for (int a : f) coords.emplace_back(a, 0.1 + rng.next_double());
      Point anchor = Point::make_indexed(space, coords);

      // Both kernels reduce to C(anchor, h) exp(-d^2/2h^2) in the slot that
      // is integrated over; hoist the constant so the quadratures do not
      // nest, and spot-check kernel_eval against the hoisted form.
      double c = normalizing_constant(anchor, h, 1e-9);
      auto bump = [&](const Point& y) {
        double d = distance(anchor, y).distance;
        return std::exp(-d * d / (2.0 * h * h));
      };
      Point probe = Point::origin(space);
      CHECK(kernel_eval(KernelKind::k1, probe, anchor, h, 1e-9) ==
            doctest::Approx(c * bump(probe)));
      CHECK(kernel_eval(KernelKind::k2, anchor, probe, h, 1e-9) ==
            doctest::Approx(c * bump(probe)));

      double mass = integrate(space, bump,
                              BorelBoxSet::around(anchor, 12.0 * h), 1e-9);
      CHECK(c * mass == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("smoothed density limits at the spider origin") {
  SpacePtr s = OrthantComplex::spider(3);
  DensitySpec f1 = DensitySpec::gaussian(leg_point(s, 0, 0.5), 0.5);
  Point o = Point::origin(s);
  double f0 = f1(o);
  CHECK(f0 == doctest::Approx(0.41767509998872837));

  // K1 inflates the origin value toward (k/(k-2)) log(k/2) = 3 log 1.5.
  const double limit = 3.0 * std::log(1.5);
  double prev_gap = 1e9;
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    double ratio = smoothed_density(f1, o, h, KernelKind::k1, 1e-8) / f0;
    double gap = std::abs(ratio - limit);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.05 * limit);

  // K2 converges to f itself; track the sup over a few probe points.
  std::vector<Point> probes = {o, leg_point(s, 0, 0.5), leg_point(s, 1, 0.3),
                               leg_point(s, 0, 1.2)};
  double prev_sup = 1e9;
  for (double h : {0.4, 0.2, 0.1}) {
    double sup = 0.0;
    for (const auto& x : probes)
      sup = std::max(sup,
                     std::abs(smoothed_density(f1, x, h, KernelKind::k2, 1e-8) -
                              f1(x)));
    CHECK(sup < prev_sup);
    prev_sup = sup;
  }
}

TEST_CASE("K2 estimates are unbiased for the smoothed density") {
  SpacePtr s = OrthantComplex::spider(3);
  DensitySpec f1 = DensitySpec::gaussian(leg_point(s, 0, 0.5), 0.5);
  Point x = leg_point(s, 0, 0.5);
  const double h = 0.3;
  const double target = smoothed_density(f1, x, h, KernelKind::k2, 1e-9);

  const int reps = 40;
  const long n = 500;
  std::vector<double> est(reps);
  for (int r = 0; r < reps; ++r) {
    auto sample = f1.sample(n, 1000 + r);
    est[r] = kde_evaluate(sample, x, h, KernelKind::k2, 1e-9);
  }
  double mean = 0.0;
  for (double e : est) mean += e / reps;
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean) / (reps - 1);
  double se = std::sqrt(var / reps);
  CHECK(std::abs(mean - target) < 3.0 * se);
}

TEST_CASE("bandwidth schedule values") {
  BandwidthSchedule pw{BandwidthSchedule::Form::power, 0.25, 1, {}};
  CHECK(pw.value_at(16) == doctest::Approx(0.5));

  BandwidthSchedule lg{BandwidthSchedule::Form::log_power, 1.0, 1, {}};
  CHECK(lg.value_at(100) == doctest::Approx(1.0 / std::log(100.0)));

  BandwidthSchedule ex{BandwidthSchedule::Form::explicit_list, 0.0, 1,
                       {{100, 0.3}, {200, 0.2}}};
  CHECK(ex.value_at(200) == 0.2);
  CHECK_THROWS_AS(ex.value_at(300), Error);
}

TEST_CASE("bandwidth checker analytic verdicts") {
  std::vector<long> ns = {100, 1000, 10000};

  BandwidthSchedule quarter{BandwidthSchedule::Form::power, 0.25, 1, {}};
  ScheduleReport r1 = check_bandwidth_schedule(quarter, ns);
  CHECK(r1.all_hold());
  CHECK(r1.density_growth.analytic);
  CHECK(r1.log_ratio.analytic);
  CHECK(r1.halving.analytic);

  BandwidthSchedule logn{BandwidthSchedule::Form::log_power, 1.0, 1, {}};
  ScheduleReport r2 = check_bandwidth_schedule(logn, ns);
  CHECK(r2.density_growth.holds);
  CHECK_FALSE(r2.log_ratio.holds);
  CHECK(r2.log_ratio.analytic);
  CHECK(r2.halving.holds);

  BandwidthSchedule steep{BandwidthSchedule::Form::power, 2.0, 1, {}};
  ScheduleReport r3 = check_bandwidth_schedule(steep, ns);
  CHECK_FALSE(r3.density_growth.holds);
  CHECK(r3.density_growth.analytic);
  CHECK(r3.log_ratio.holds);
  CHECK(r3.halving.holds);

  // Higher dimension tightens condition 1: beta p < 1.
  BandwidthSchedule dim3{BandwidthSchedule::Form::power, 0.25, 3, {}};
  CHECK(check_bandwidth_schedule(dim3, ns).density_growth.holds);
  BandwidthSchedule dim5{BandwidthSchedule::Form::power, 0.25, 5, {}};
  CHECK_FALSE(check_bandwidth_schedule(dim5, ns).density_growth.holds);

  BandwidthSchedule bad{BandwidthSchedule::Form::power, -1.0, 1, {}};
  CHECK_THROWS_AS(check_bandwidth_schedule(bad, ns), Error);
}

TEST_CASE("bandwidth checker explicit-list diagnostics") {
  BandwidthSchedule ex{BandwidthSchedule::Form::explicit_list,
                       0.0,
                       1,
                       {{100, 0.316}, {200, 0.266}, {400, 0.224},
                        {800, 0.188}}};
  ScheduleReport r = check_bandwidth_schedule(ex, {});
  CHECK_FALSE(r.density_growth.analytic);
  CHECK_FALSE(r.log_ratio.analytic);
  CHECK_FALSE(r.halving.analytic);
  CHECK(r.density_growth.holds);
  CHECK(r.halving.holds);

  BandwidthSchedule rising{BandwidthSchedule::Form::explicit_list,
                           0.0,
                           1,
                           {{100, 0.1}, {200, 0.2}}};
  CHECK_THROWS_AS(check_bandwidth_schedule(rising, {}), Error);

  BandwidthSchedule nonpos{BandwidthSchedule::Form::explicit_list,
                           0.0,
                           1,
                           {{100, 0.1}, {200, 0.0}}};
  CHECK_THROWS_AS(check_bandwidth_schedule(nonpos, {}), Error);
}
