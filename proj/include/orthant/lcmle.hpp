#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "orthant/complex.hpp"

namespace orthant {

// Piecewise-linear concave coercive function on a k-spider. Values are log
// scale; exp of it is the estimated density.
struct SpiderConcaveFn {
  struct Leg {
    // (coordinate, value) knots, strictly increasing coordinates > 0.
    std::vector<std::pair<double, double>> knots;
    // Slope past the last knot when domain_end is unset; must be < 0 then.
    double final_slope = -std::numeric_limits<double>::infinity();
    // Function is -inf beyond this coordinate; 0 excludes the whole leg.
    std::optional<double> domain_end;
    // > 0 only when the data sat on a single leg away from the origin.
    double domain_start = 0.0;
  };

  double origin_value = -std::numeric_limits<double>::infinity();
  std::vector<Leg> legs;

  bool origin_in_domain() const { return std::isfinite(origin_value); }

  // phi on leg `leg` at coordinate u; -inf outside the domain.
  double log_value(int leg, double u) const;
  double log_value(const Point& x) const;

  // Initial slope of a leg at 0+; -inf when the leg is excluded.
  double initial_slope(int leg) const;

  // Adds c to every value (origin, knots).
  void shift(double c);

  // Checks per-leg and cross-leg concavity plus coercivity; throws Error.
  void validate() const;
};

struct LiftedPoint {
  int leg = 0;      // ignored when coord == 0
  double coord = 0.0;
  double value = 0.0;
};

// The pointwise-smallest concave function on a k-spider dominating the lifted
// points; -inf outside the convex hull of the points.
SpiderConcaveFn least_concave_majorant(int k_legs,
                                       const std::vector<LiftedPoint>& points);

// Exact closed-form integral of exp(psi) against nu (sum over linear pieces).
double integrate_exp(const SpiderConcaveFn& psi);

// exp(psi(x)); 0 outside the domain.
double evaluate(const SpiderConcaveFn& psi, const Point& x);

struct FitOptions {
  double tol = 1e-8;
  int max_iter = 20000;
  // Objective must improve by less than tol over this many iterations.
  int patience = 50;
  double step_scale = 0.25;
};

struct FitResult {
  SpiderConcaveFn psi;
  double objective = 0.0;  // achieved log-likelihood functional L
  int iterations = 0;
  bool converged = false;
  double integral = 0.0;  // integral of exp(psi) d nu
};

// Log-concave maximum likelihood estimate on a k-spider: maximizes
// (1/N) sum psi(X_i) - integral(exp psi) + 1 over lifted values via
// subgradient ascent on the least-concave-majorant parametrization.
FitResult fit(const std::vector<Point>& sample, const FitOptions& opts = {});

}  // namespace orthant
