#pragma once

#include <memory>
#include <vector>

#include "orthant/complex.hpp"
#include "orthant/kde.hpp"
#include "orthant/lcmle.hpp"
#include "orthant/rng.hpp"

namespace orthant {

// Symbolic density on a spider: Gaussian-type bump, mixture, fitted LCMLE,
// or a KDE of a frozen sample. Evaluable pointwise; normalized on demand.
class DensitySpec {
public:
  enum class Variant { gaussian, mixture, fitted, kde };

  // exp(-d(x, center)^2 / (2 sigma^2)) / Z.
  static DensitySpec gaussian(const Point& center, double sigma);

  // Weights must be positive and sum to 1; components share one space.
  static DensitySpec mixture(
      std::vector<std::pair<double, DensitySpec>> components);

  static DensitySpec fitted(SpacePtr space, SpiderConcaveFn psi);

  // Unnormalized by construction for K2 (the estimator need not integrate
  // to one).
  static DensitySpec kde(std::vector<Point> sample, double h, KernelKind kind);

  Variant variant() const { return variant_; }
  const SpacePtr& space() const { return space_; }

  double operator()(const Point& x) const;
  double normalization() const { return z_; }

  // n exact draws; gaussian/mixture on spiders only. Deterministic in seed.
  std::vector<Point> sample(long n, uint64_t seed) const;

  const Point& center() const;
  double sigma() const { return sigma_; }

  // Radius beyond which the density is negligible; integration cutoff.
  double extent() const;

  // An unset spec; evaluating it throws. Assign from a factory before use.
  DensitySpec() = default;

private:

  Variant variant_ = Variant::gaussian;
  SpacePtr space_;
  // gaussian
  std::vector<Point> points_;  // center (gaussian) or sample (kde)
  double sigma_ = 0.0;
  double z_ = 1.0;
  // mixture
  std::vector<std::pair<double, DensitySpec>> components_;
  // fitted
  std::shared_ptr<const SpiderConcaveFn> psi_;
  // kde
  std::shared_ptr<const KdeEstimator> estimator_;
};

// Total variation distance (1/2) integral |f - g| d nu, by adaptive
// quadrature with relative error <= tol.
double tv_distance(const DensitySpec& f, const DensitySpec& g, double tol);

}  // namespace orthant
