#include "orthant/density.hpp"

#include <cmath>
#include <functional>

#include "orthant/geodesic.hpp"
#include "orthant/normal.hpp"

namespace orthant {

namespace {

constexpr double kTailFactor = 12.0;

double gaussian_mass(int k, double c, double sigma) {
  return std::sqrt(2.0 * M_PI) * sigma *
         (1.0 + (k - 2) * norm_cdf(-c / sigma));
}

double point_distance(const Point& x, const Point& y) {
  return x.space()->is_spider() ? spider_distance(x, y)
                                : distance(x, y).distance;
}

}  // namespace

DensitySpec DensitySpec::gaussian(const Point& center, double sigma) {
  if (!(sigma > 0.0)) throw Error("bad-parameter", "sigma must be > 0");
  DensitySpec d;
  d.variant_ = Variant::gaussian;
  d.space_ = center.space();
  d.points_ = {center};
  d.sigma_ = sigma;
  if (d.space_->is_spider()) {
    d.z_ = gaussian_mass(d.space_->axis_count(), center.norm(), sigma);
  } else {
    d.z_ = 1.0 / normalizing_constant(center, sigma, 1e-9);
  }
  return d;
}

DensitySpec DensitySpec::mixture(
    std::vector<std::pair<double, DensitySpec>> components) {
  if (components.empty())
    throw Error("bad-parameter", "mixture needs components");
  double total = 0.0;
  for (const auto& [w, c] : components) {
    if (!(w > 0.0)) throw Error("bad-parameter", "weights must be > 0");
    if (c.space().get() != components.front().second.space().get())
      throw Error("different-spaces", "mixture components on different spaces");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error("bad-parameter", "mixture weights must sum to 1");
  DensitySpec d;
  d.variant_ = Variant::mixture;
  d.space_ = components.front().second.space();
  d.components_ = std::move(components);
  d.z_ = 1.0;
  return d;
}

DensitySpec DensitySpec::fitted(SpacePtr space, SpiderConcaveFn psi) {
  if (!space->is_spider())
    throw Error("bad-parameter", "fitted densities live on spiders");
  if (static_cast<int>(psi.legs.size()) != space->axis_count())
    throw Error("bad-parameter", "leg count does not match the space");
  DensitySpec d;
  d.variant_ = Variant::fitted;
  d.space_ = std::move(space);
  d.z_ = integrate_exp(psi);
  if (!(d.z_ > 0.0))
    throw Error("bad-parameter", "exp(psi) has no mass");
  d.psi_ = std::make_shared<const SpiderConcaveFn>(std::move(psi));
  return d;
}

DensitySpec DensitySpec::kde(std::vector<Point> sample, double h,
                             KernelKind kind) {
  if (sample.empty()) throw Error("empty-sample", "sample must be nonempty");
  DensitySpec d;
  d.variant_ = Variant::kde;
  d.space_ = sample.front().space();
  d.sigma_ = h;
  d.z_ = 1.0;
  d.estimator_ =
      std::make_shared<const KdeEstimator>(std::move(sample), h, kind, 1e-8);
  return d;
}

double DensitySpec::operator()(const Point& x) const {
  switch (variant_) {
    case Variant::gaussian: {
      if (points_.empty())
        throw Error("bad-parameter", "density spec is unset");
      double d = point_distance(x, points_[0]);
      return std::exp(-d * d / (2.0 * sigma_ * sigma_)) / z_;
    }
    case Variant::mixture: {
      double s = 0.0;
      for (const auto& [w, c] : components_) s += w * c(x);
      return s;
    }
    case Variant::fitted:
      return evaluate(*psi_, x) / z_;
    case Variant::kde:
      return (*estimator_)(x);
  }
  return 0.0;
}

const Point& DensitySpec::center() const {
  if (variant_ != Variant::gaussian)
    throw Error("bad-parameter", "only gaussian densities have a center");
  return points_[0];
}

std::vector<Point> DensitySpec::sample(long n, uint64_t seed) const {
  if (n < 0) throw Error("bad-parameter", "sample size must be >= 0");
  if (!space_->is_spider())
    throw Error("bad-parameter", "sampling is implemented on spiders");
  const int k = space_->axis_count();

  // Inverse-CDF draw: pick the leg by its mass share, then a truncated
  // normal along it.
  std::function<Point(const DensitySpec&, CounterRng&)> draw =
      [&](const DensitySpec& d, CounterRng& rng) -> Point {
    if (d.variant_ == Variant::mixture) {
      double u = rng.next_double(), acc = 0.0;
      for (const auto& [w, c] : d.components_) {
        acc += w;
        if (u < acc || &c == &d.components_.back().second) return draw(c, rng);
      }
      return draw(d.components_.back().second, rng);
    }
    if (d.variant_ != Variant::gaussian)
      throw Error("bad-parameter",
                  "sampling needs a gaussian or mixture density");

    const Point& c = d.points_[0];
    const double sg = d.sigma_;
    const double r = c.norm();
    const int home = c.is_origin() ? -1 : c.coords()[0].first;
    const double away = norm_cdf(-r / sg);  // mass share scale per other leg
    const double own = norm_cdf(r / sg);

    double u = rng.next_double() * (own + (k - 1) * away);
    int leg;
    bool on_home;
    if (u < own) {
      leg = home < 0 ? 0 : home;
      on_home = true;
    } else {
      int idx = std::min<int>(k - 2, static_cast<int>((u - own) / away));
      leg = 0;
      on_home = false;
      for (int cand = 0, seen = 0; cand < k; ++cand) {
        if (cand == home) continue;
        if (seen++ == idx) {
          leg = cand;
          break;
        }
      }
    }
    double v = rng.next_open();
    double coord;
    if (on_home) {
      // N(r, sg^2) truncated to [0, inf)
      coord = r + sg * norm_quantile(away + v * own);
    } else {
      // N(-r, sg^2) truncated to [0, inf)
      coord = -r + sg * norm_quantile(own + v * away);
    }
    if (coord <= 0.0) return Point::origin(d.space_);
    return Point::make_indexed(d.space_, {{leg, coord}});
  };

  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    CounterRng rng = CounterRng::substream(seed, static_cast<uint64_t>(i));
    out.push_back(draw(*this, rng));
  }
  return out;
}

double tv_distance(const DensitySpec& f, const DensitySpec& g, double tol) {
  if (f.space().get() != g.space().get())
    throw Error("different-spaces", "densities on different complexes");
  double r = std::max(f.extent(), g.extent());
  BorelBoxSet domain = BorelBoxSet::cube(*f.space(), r);
  double mass = integrate(
      f.space(), [&](const Point& x) { return std::abs(f(x) - g(x)); }, domain,
      tol);
  return 0.5 * mass;
}

double DensitySpec::extent() const {
  switch (variant_) {
    case Variant::gaussian:
      return points_[0].norm() + kTailFactor * sigma_;
    case Variant::mixture: {
      double r = 0.0;
      for (const auto& [w, c] : components_) r = std::max(r, c.extent());
      return r;
    }
    case Variant::fitted: {
      double r = 0.0;
      for (const auto& leg : psi_->legs) {
        if (leg.knots.empty()) continue;
        if (leg.domain_end)
          r = std::max(r, *leg.domain_end);
        else
          r = std::max(r, leg.knots.back().first + 45.0 / -leg.final_slope);
      }
      return r;
    }
    case Variant::kde: {
      double r = 0.0;
      for (const auto& x : estimator_->sample()) r = std::max(r, x.norm());
      return r + kTailFactor * sigma_;
    }
  }
  return 0.0;
}

}  // namespace orthant
