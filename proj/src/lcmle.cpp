#include "orthant/lcmle.hpp"

#include <algorithm>
#include <cmath>

namespace orthant {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double slope_tol(double a, double b) {
  return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// integral over [0, du] of exp((1-t/du) a + (t/du) b), and the same weighted
// by t/du. Series fallback near zero slope avoids cancellation.
void piece_integrals(double a, double b, double du, double& i0, double& i1) {
  if (a == kNegInf && b == kNegInf) {
    i0 = i1 = 0.0;
    return;
  }
  double x = b - a;
  if (std::abs(x) < 1e-6) {
    double ea = std::exp(a);
    i0 = du * ea * (1.0 + x * (0.5 + x / 6.0));
    i1 = du * ea * (0.5 + x * (1.0 / 3.0 + x / 8.0));
    return;
  }
  double s = x / du;
  i0 = (std::exp(b) - std::exp(a)) / s;
  i1 = (std::exp(b) * (x - 1.0) + std::exp(a)) / (s * x);
}

}  // namespace

double SpiderConcaveFn::log_value(int leg, double u) const {
  if (u < 0.0) throw Error("bad-parameter", "negative leg coordinate");
  if (u == 0.0) return origin_value;
  if (leg < 0 || leg >= static_cast<int>(legs.size()))
    throw Error("bad-parameter", "leg index out of range");
  const Leg& L = legs[leg];
  if (L.knots.empty()) return kNegInf;
  if (u < L.knots.front().first) {
    if (L.domain_start > 0.0 || !origin_in_domain()) return kNegInf;
    double f = u / L.knots.front().first;
    return origin_value + f * (L.knots.front().second - origin_value);
  }
  if (u > L.knots.back().first) {
    if (L.domain_end) return kNegInf;
    return L.knots.back().second + L.final_slope * (u - L.knots.back().first);
  }
  auto it = std::lower_bound(
      L.knots.begin(), L.knots.end(), u,
      [](const std::pair<double, double>& kn, double v) { return kn.first < v; });
  if (it->first == u) return it->second;
  auto lo = std::prev(it);
  double f = (u - lo->first) / (it->first - lo->first);
  return lo->second + f * (it->second - lo->second);
}

double SpiderConcaveFn::log_value(const Point& x) const {
  if (!x.space()->is_spider())
    throw Error("bad-parameter", "point is not on a spider");
  if (x.is_origin()) return origin_value;
  return log_value(x.coords()[0].first, x.coords()[0].second);
}

double SpiderConcaveFn::initial_slope(int leg) const {
  const Leg& L = legs.at(leg);
  if (L.knots.empty() || L.domain_start > 0.0 || !origin_in_domain())
    return kNegInf;
  return (L.knots.front().second - origin_value) / L.knots.front().first;
}

void SpiderConcaveFn::shift(double c) {
  if (std::isfinite(origin_value)) origin_value += c;
  for (auto& leg : legs)
    for (auto& kn : leg.knots) kn.second += c;
}

void SpiderConcaveFn::validate() const {
  if (legs.empty()) throw Error("bad-parameter", "function has no legs");
  int occupied = 0;
  for (const auto& L : legs) {
    double prev_u = 0.0;
    for (const auto& [u, v] : L.knots) {
      if (!(u > prev_u)) throw Error("bad-parameter", "knots must increase");
      if (!std::isfinite(v))
        throw Error("bad-parameter", "knot values must be finite");
      prev_u = u;
    }
    if (L.knots.empty()) {
      if (L.domain_end && *L.domain_end != 0.0)
        throw Error("bad-parameter", "empty leg must have zero extent");
      continue;
    }
    ++occupied;
    if (L.domain_start > 0.0 && L.domain_start != L.knots.front().first)
      throw Error("bad-parameter", "domain start must be the first knot");
    if (L.domain_start == 0.0 && !origin_in_domain())
      throw Error("bad-parameter",
                  "leg reaches the origin but the origin value is -inf");
    if (L.domain_end) {
      if (*L.domain_end != L.knots.back().first)
        throw Error("bad-parameter", "domain end must be the last knot");
    } else if (!(L.final_slope < 0.0)) {
      throw Error("bad-parameter", "unbounded leg needs a negative tail slope");
    }

    // Per-leg concavity: chord slopes nonincreasing, origin segment and tail
    // included.
    std::vector<double> slopes;
    if (L.domain_start == 0.0)
      slopes.push_back((L.knots.front().second - origin_value) /
                       L.knots.front().first);
    for (std::size_t i = 1; i < L.knots.size(); ++i)
      slopes.push_back((L.knots[i].second - L.knots[i - 1].second) /
                       (L.knots[i].first - L.knots[i - 1].first));
    if (!L.domain_end) slopes.push_back(L.final_slope);
    for (std::size_t i = 1; i < slopes.size(); ++i)
      if (slopes[i] > slopes[i - 1] + slope_tol(slopes[i], slopes[i - 1]))
        throw Error("bad-parameter", "leg is not concave");
  }

  if (!origin_in_domain() && occupied > 1)
    throw Error("bad-parameter",
                "multiple legs occupied but the origin is excluded");

  // Cross-leg concavity along through-origin geodesics.
  if (origin_in_domain()) {
    for (std::size_t l = 0; l < legs.size(); ++l) {
      double sl = initial_slope(static_cast<int>(l));
      if (sl == kNegInf) continue;
      for (std::size_t m = l + 1; m < legs.size(); ++m) {
        double sm = initial_slope(static_cast<int>(m));
        if (sm == kNegInf) continue;
        if (sl + sm > slope_tol(sl, sm))
          throw Error("bad-parameter",
                      "initial slopes violate concavity through the origin");
      }
    }
  }
}

namespace {

// Upper concave hull of points sorted by strictly increasing x; returns
// indices of the hull vertices (endpoints always kept, collinear interior
// points dropped).
std::vector<int> upper_hull(const std::vector<std::pair<double, double>>& pts) {
  std::vector<int> st;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    while (st.size() >= 2) {
      const auto& p1 = pts[st[st.size() - 2]];
      const auto& p2 = pts[st[st.size() - 1]];
      const auto& p3 = pts[i];
      // pop p2 when it lies on or below the chord p1-p3
      double cross = (p2.first - p1.first) * (p3.second - p2.second) -
                     (p3.first - p2.first) * (p2.second - p1.second);
      if (cross < 0.0) break;
      st.pop_back();
    }
    st.push_back(i);
  }
  return st;
}

struct Site {
  int leg = -1;  // -1 at the origin
  double u = 0.0;
  double w = 0.0;
};

struct MajorantBuild {
  SpiderConcaveFn psi;
  std::vector<std::vector<int>> knot_site;  // site id per knot, per leg
  int origin_site = -1;                     // site pinning the origin value
  int bind_a = -1, bind_b = -1;             // else the binding cross-leg pair
};

// Best chord value at the origin between the hulls of two legs, with the pair
// of sites achieving it: mirror one leg to the negative axis, hull the union,
// read off the edge bracketing zero.
void cross_chord(const std::vector<std::pair<double, double>>& a_pts,
                 const std::vector<int>& a_ids,
                 const std::vector<std::pair<double, double>>& b_pts,
                 const std::vector<int>& b_ids, double& best, int& best_a,
                 int& best_b) {
  std::vector<std::pair<double, double>> merged;
  std::vector<int> ids;
  std::vector<bool> from_a;
  merged.reserve(a_pts.size() + b_pts.size());
  for (std::size_t i = b_pts.size(); i-- > 0;) {
    merged.emplace_back(-b_pts[i].first, b_pts[i].second);
    ids.push_back(b_ids[i]);
    from_a.push_back(false);
  }
  for (std::size_t i = 0; i < a_pts.size(); ++i) {
    merged.push_back(a_pts[i]);
    ids.push_back(a_ids[i]);
    from_a.push_back(true);
  }
  std::vector<int> hull = upper_hull(merged);
  for (std::size_t i = 1; i < hull.size(); ++i) {
    int p = hull[i - 1], q = hull[i];
    if (merged[p].first < 0.0 && merged[q].first > 0.0) {
      double f = -merged[p].first / (merged[q].first - merged[p].first);
      double v = merged[p].second + f * (merged[q].second - merged[p].second);
      if (v > best) {
        best = v;
        best_a = ids[q];  // positive side
        best_b = ids[p];
      }
      return;
    }
  }
}

MajorantBuild build_majorant(int k_legs,
                             const std::vector<Site>& sites,
                             const std::vector<double>& y,
                             const std::vector<std::vector<int>>& leg_sites,
                             int origin_site_id) {
  MajorantBuild out;
  out.psi.legs.resize(k_legs);
  out.knot_site.resize(k_legs);

  // Per-leg point lists and their standalone hulls.
  std::vector<std::vector<std::pair<double, double>>> pts(k_legs);
  std::vector<std::vector<int>> hull_ids(k_legs);
  int occupied = 0;
  for (int l = 0; l < k_legs; ++l) {
    for (int id : leg_sites[l]) pts[l].emplace_back(sites[id].u, y[id]);
    if (!pts[l].empty()) ++occupied;
    std::vector<int> h = upper_hull(pts[l]);
    for (int idx : h) hull_ids[l].push_back(leg_sites[l][idx]);
  }

  const bool origin_in = origin_site_id >= 0 || occupied >= 2;
  double v0 = kNegInf;
  if (origin_site_id >= 0) {
    v0 = y[origin_site_id];
    out.origin_site = origin_site_id;
  }
  if (occupied >= 2) {
    double cross_best = kNegInf;
    int ba = -1, bb = -1;
    for (int l = 0; l < k_legs; ++l) {
      if (pts[l].empty()) continue;
      std::vector<std::pair<double, double>> hl;
      for (std::size_t i = 0; i < hull_ids[l].size(); ++i)
        hl.emplace_back(sites[hull_ids[l][i]].u, y[hull_ids[l][i]]);
      for (int m = l + 1; m < k_legs; ++m) {
        if (pts[m].empty()) continue;
        std::vector<std::pair<double, double>> hm;
        for (std::size_t i = 0; i < hull_ids[m].size(); ++i)
          hm.emplace_back(sites[hull_ids[m][i]].u, y[hull_ids[m][i]]);
        cross_chord(hl, hull_ids[l], hm, hull_ids[m], cross_best, ba, bb);
      }
    }
    if (cross_best > v0) {
      v0 = cross_best;
      out.origin_site = -1;
      out.bind_a = ba;
      out.bind_b = bb;
    }
  }
  out.psi.origin_value = origin_in ? v0 : kNegInf;

  for (int l = 0; l < k_legs; ++l) {
    auto& leg = out.psi.legs[l];
    if (pts[l].empty()) {
      leg.domain_end = 0.0;
      continue;
    }
    std::vector<std::pair<double, double>> aug;
    std::vector<int> aug_ids;
    if (origin_in) {
      aug.emplace_back(0.0, v0);
      aug_ids.push_back(-1);
    }
    for (std::size_t i = 0; i < pts[l].size(); ++i) {
      aug.push_back(pts[l][i]);
      aug_ids.push_back(leg_sites[l][i]);
    }
    std::vector<int> h = upper_hull(aug);
    for (int idx : h) {
      if (aug_ids[idx] < 0) continue;  // origin handled separately
      leg.knots.push_back(aug[idx]);
      out.knot_site[l].push_back(aug_ids[idx]);
    }
    leg.domain_end = leg.knots.back().first;
    leg.domain_start = origin_in ? 0.0 : leg.knots.front().first;
  }
  return out;
}

}  // namespace

SpiderConcaveFn least_concave_majorant(
    int k_legs, const std::vector<LiftedPoint>& points) {
  if (k_legs < 1) throw Error("bad-parameter", "need at least one leg");
  if (points.empty()) throw Error("bad-parameter", "need at least one point");

  // Collapse coincident locations to their max lifted value.
  std::vector<LiftedPoint> ps = points;
  for (auto& p : ps) {
    if (p.coord < 0.0) throw Error("bad-parameter", "negative leg coordinate");
    if (p.coord == 0.0) p.leg = -1;
    if (p.leg >= k_legs) throw Error("bad-parameter", "leg index out of range");
  }
  std::sort(ps.begin(), ps.end(), [](const LiftedPoint& a, const LiftedPoint& b) {
    if (a.leg != b.leg) return a.leg < b.leg;
    if (a.coord != b.coord) return a.coord < b.coord;
    return a.value < b.value;
  });
  std::vector<Site> sites;
  std::vector<double> y;
  std::vector<std::vector<int>> leg_sites(k_legs);
  int origin_site = -1;
  for (const auto& p : ps) {
    if (!sites.empty() && sites.back().leg == p.leg &&
        sites.back().u == p.coord) {
      y.back() = p.value;  // sorted: the last duplicate carries the max
      continue;
    }
    int id = static_cast<int>(sites.size());
    sites.push_back({p.leg, p.coord, 0.0});
    y.push_back(p.value);
    if (p.leg < 0)
      origin_site = id;
    else
      leg_sites[p.leg].push_back(id);
  }
  if (sites.size() < 2)
    throw Error("bad-parameter", "need at least two distinct lifted locations");
  return build_majorant(k_legs, sites, y, leg_sites, origin_site).psi;
}

double integrate_exp(const SpiderConcaveFn& psi) {
  double total = 0.0;
  for (const auto& L : psi.legs) {
    if (L.knots.empty()) continue;
    double prev_u, prev_v;
    if (L.domain_start == 0.0 && psi.origin_in_domain()) {
      prev_u = 0.0;
      prev_v = psi.origin_value;
    } else {
      prev_u = L.knots.front().first;
      prev_v = L.knots.front().second;
    }
    for (const auto& [u, v] : L.knots) {
      if (u == prev_u) continue;
      double i0, i1;
      piece_integrals(prev_v, v, u - prev_u, i0, i1);
      total += i0;
      prev_u = u;
      prev_v = v;
    }
    if (!L.domain_end) {
      if (!(L.final_slope < 0.0))
        throw Error("bad-parameter", "unbounded leg needs a negative slope");
      total += -std::exp(L.knots.back().second) / L.final_slope;
    }
  }
  return total;
}

double evaluate(const SpiderConcaveFn& psi, const Point& x) {
  double v = psi.log_value(x);
  return v == kNegInf ? 0.0 : std::exp(v);
}

namespace {

struct Problem {
  int k_legs = 0;
  std::vector<Site> sites;
  std::vector<std::vector<int>> leg_sites;
  int origin_site = -1;

  MajorantBuild build(const std::vector<double>& y) const {
    return build_majorant(k_legs, sites, y, leg_sites, origin_site);
  }

  // sigma(y) + 1 = (1/N) sum psi(X_i) - integral + 1, evaluated with the
  // data term snapped onto the majorant.
  double objective(std::vector<double> y, MajorantBuild* out = nullptr) const {
    MajorantBuild b = build(y);
    double data = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i)
      data += sites[i].w * b.psi.log_value(sites[i].leg, sites[i].u);
    double val = data - integrate_exp(b.psi) + 1.0;
    if (out) *out = std::move(b);
    return val;
  }
};

// Mass of exp(psi) attributed to each site: piece integrals split between
// their endpoint knots, with the origin pseudo-knot's share forwarded to the
// origin site or split across the binding cross-leg pair.
std::vector<double> hat_mass(const Problem& pr, const MajorantBuild& b) {
  std::vector<double> m(pr.sites.size(), 0.0);
  double origin_mass = 0.0;
  for (int l = 0; l < pr.k_legs; ++l) {
    const auto& L = b.psi.legs[l];
    if (L.knots.empty()) continue;
    double prev_u, prev_v;
    int prev_id;
    if (L.domain_start == 0.0 && b.psi.origin_in_domain()) {
      prev_u = 0.0;
      prev_v = b.psi.origin_value;
      prev_id = -1;
    } else {
      prev_u = L.knots.front().first;
      prev_v = L.knots.front().second;
      prev_id = b.knot_site[l].front();
    }
    for (std::size_t i = 0; i < L.knots.size(); ++i) {
      double u = L.knots[i].first, v = L.knots[i].second;
      int id = b.knot_site[l][i];
      if (u > prev_u) {
        double i0, i1;
        piece_integrals(prev_v, v, u - prev_u, i0, i1);
        if (prev_id < 0)
          origin_mass += i0 - i1;
        else
          m[prev_id] += i0 - i1;
        m[id] += i1;
      }
      prev_u = u;
      prev_v = v;
      prev_id = id;
    }
  }
  if (origin_mass > 0.0) {
    if (b.origin_site >= 0) {
      m[b.origin_site] += origin_mass;
    } else if (b.bind_a >= 0 && b.bind_b >= 0) {
      double ua = pr.sites[b.bind_a].u, ub = pr.sites[b.bind_b].u;
      m[b.bind_a] += origin_mass * ub / (ua + ub);
      m[b.bind_b] += origin_mass * ua / (ua + ub);
    }
  }
  return m;
}

// Snap onto the majorant and renormalize so integral(exp psi) = 1; both moves
// never decrease the objective.
double snap_and_normalize(const Problem& pr, std::vector<double>& y) {
  MajorantBuild b = pr.build(y);
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = b.psi.log_value(pr.sites[i].leg, pr.sites[i].u);
  double c = std::log(integrate_exp(b.psi));
  for (auto& v : y) v -= c;
  double data = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) data += pr.sites[i].w * y[i];
  return data;  // objective: data - 1 + 1
}

// Golden-section line search of the objective along a direction; updates y
// and returns the achieved value. The objective is concave along any line.
double line_search(const Problem& pr, std::vector<double>& y,
                   const std::vector<double>& dir, double cur) {
  constexpr double kGold = 0.6180339887498949;
  auto val = [&](double t) {
    std::vector<double> y2 = y;
    for (std::size_t i = 0; i < y2.size(); ++i) y2[i] += t * dir[i];
    return pr.objective(y2);
  };
  double lo = -1.0, hi = 1.0;
  double best = 0.0, fb = cur;
  // Re-expand when the maximum sits on the bracket edge.
  for (int expand = 0; expand < 8; ++expand) {
    double a = lo, bq = hi;
    double x1 = bq - kGold * (bq - a), x2 = a + kGold * (bq - a);
    double f1 = val(x1), f2 = val(x2);
    while (bq - a > 1e-10) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGold * (bq - a);
        f2 = val(x2);
      } else {
        bq = x2;
        x2 = x1;
        f2 = f1;
        x1 = bq - kGold * (bq - a);
        f1 = val(x1);
      }
    }
    best = 0.5 * (a + bq);
    fb = val(best);
    if (best - lo < 1e-6 * (hi - lo))
      lo -= (hi - lo);
    else if (hi - best < 1e-6 * (hi - lo))
      hi += (hi - lo);
    else
      break;
  }
  if (fb > cur) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += best * dir[i];
    return fb;
  }
  return cur;
}

// Exact ascent polish for small problems: golden-section searches along each
// coordinate, then along per-leg tilts (adding c * u keeps concavity shapes
// reachable) and pairwise diagonals, which escape the corner points where
// pure coordinate ascent stalls on the nonsmooth hull objective.
void polish(const Problem& pr, std::vector<double>& y, double tol) {
  const std::size_t n = y.size();
  double cur = pr.objective(y);
  std::vector<double> dir(n, 0.0);
  for (int sweep = 0; sweep < 200; ++sweep) {
    double before = cur;

    for (std::size_t i = 0; i < n; ++i) {
      dir.assign(n, 0.0);
      dir[i] = 1.0;
      cur = line_search(pr, y, dir, cur);
    }

    for (int l = -1; l < pr.k_legs; ++l) {
      dir.assign(n, 0.0);
      bool any = false;
      for (std::size_t i = 0; i < n; ++i)
        if (l < 0 || pr.sites[i].leg == l) {
          dir[i] = pr.sites[i].u;
          any = any || dir[i] != 0.0;
        }
      if (any) cur = line_search(pr, y, dir, cur);
    }

    if (n <= 24) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          for (double sj : {1.0, -1.0}) {
            dir.assign(n, 0.0);
            dir[i] = 1.0;
            dir[j] = sj;
            cur = line_search(pr, y, dir, cur);
          }
    }

    if (cur - before < tol) break;
  }
}

// Polish for large problems, where full coordinate sweeps are too slow: line
// searches along the current majorant's knot hat directions (one per knot,
// plus the origin), per-leg tilts, and the highest-|gradient| coordinates
// (which can create new knots). Cost scales with the knot count.
void knot_polish(const Problem& pr, std::vector<double>& y, double tol) {
  const std::size_t n = y.size();
  double cur = pr.objective(y);
  const std::vector<double> y_in = y;
  const double cur_in = cur;
  std::vector<double> dir(n);

  // The subgradient iterate is jagged: its majorant can keep thousands of
  // sites as vertices, making per-knot sweeps intractable. Restart from the
  // majorant restricted to per-leg quantile knots; the polish re-grows any
  // knots it needs through the coordinate moves below.
  {
    MajorantBuild b0 = pr.build(y);
    std::vector<LiftedPoint> pts;
    for (int l = 0; l < pr.k_legs; ++l) {
      const auto& ids = pr.leg_sites[l];
      if (ids.empty()) continue;
      const std::size_t m = std::min<std::size_t>(12, ids.size());
      for (std::size_t j = 0; j < m; ++j) {
        int id = ids[j * (ids.size() - 1) / (m > 1 ? m - 1 : 1)];
        double u = pr.sites[id].u;
        pts.push_back({l, u, b0.psi.log_value(l, u)});
      }
    }
    if (b0.psi.origin_in_domain())
      pts.push_back({-1, 0.0, b0.psi.origin_value});
    if (pts.size() >= 2) {
      SpiderConcaveFn coarse = least_concave_majorant(pr.k_legs, pts);
      std::vector<double> y2(n);
      for (std::size_t i = 0; i < n; ++i)
        y2[i] = pr.sites[i].leg < 0
                    ? coarse.origin_value
                    : coarse.log_value(pr.sites[i].leg, pr.sites[i].u);
      y = y2;
      cur = pr.objective(y2);
    }
  }

  for (int sweep = 0; sweep < 80; ++sweep) {
    double before = cur;
    MajorantBuild b = pr.build(y);

    // Hat at the origin: 1 at zero, tapering to 0 at each leg's first knot.
    if (b.psi.origin_in_domain()) {
      dir.assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const Site& s = pr.sites[i];
        if (s.leg < 0) {
          dir[i] = 1.0;
          continue;
        }
        const auto& L = b.psi.legs[s.leg];
        if (L.knots.empty() || L.domain_start > 0.0) continue;
        double first = L.knots.front().first;
        if (s.u < first) dir[i] = 1.0 - s.u / first;
      }
      cur = line_search(pr, y, dir, cur);
    }

    // Hat at each leg knot: 1 there, 0 at the neighboring knots.
    for (int l = 0; l < pr.k_legs; ++l) {
      const auto& L = b.psi.legs[l];
      if (L.knots.empty()) continue;
      std::vector<double> ku;
      if (L.domain_start == 0.0 && b.psi.origin_in_domain()) ku.push_back(0.0);
      // Guard against degenerate jagged hulls: sweep at most 40 knots.
      const std::size_t nk = L.knots.size();
      const std::size_t mk = std::min<std::size_t>(40, nk);
      for (std::size_t j = 0; j < mk; ++j)
        ku.push_back(L.knots[j * (nk - 1) / (mk > 1 ? mk - 1 : 1)].first);
      for (std::size_t j = ku.empty() || ku[0] != 0.0 ? 0 : 1; j < ku.size();
           ++j) {
        double c = ku[j];
        double lo = j > 0 ? ku[j - 1] : c;
        double hi = j + 1 < ku.size() ? ku[j + 1] : c;
        dir.assign(n, 0.0);
        for (int id : pr.leg_sites[l]) {
          double u = pr.sites[id].u;
          if (u == c)
            dir[id] = 1.0;
          else if (u > lo && u < c)
            dir[id] = (u - lo) / (c - lo);
          else if (u > c && u < hi)
            dir[id] = (hi - u) / (hi - c);
        }
        cur = line_search(pr, y, dir, cur);
      }
    }

    // Tilts: global and per-leg.
    for (int l = -1; l < pr.k_legs; ++l) {
      dir.assign(n, 0.0);
      bool any = false;
      for (std::size_t i = 0; i < n; ++i)
        if (l < 0 || pr.sites[i].leg == l) {
          dir[i] = pr.sites[i].u;
          any = any || dir[i] != 0.0;
        }
      if (any) cur = line_search(pr, y, dir, cur);
    }

    // Coordinates with the largest subgradient entries; raising an interior
    // site is the only move that grows the knot set.
    b = pr.build(y);
    std::vector<double> m = hat_mass(pr, b);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
      return std::abs(pr.sites[a].w - m[a]) > std::abs(pr.sites[c].w - m[c]);
    });
    for (std::size_t r = 0; r < std::min<std::size_t>(16, n); ++r) {
      dir.assign(n, 0.0);
      dir[order[r]] = 1.0;
      cur = line_search(pr, y, dir, cur);
    }

    if (cur - before < tol) break;
  }

  if (cur < cur_in) y = y_in;
}

}  // namespace

FitResult fit(const std::vector<Point>& sample, const FitOptions& opts) {
  if (sample.empty()) throw Error("empty-sample", "sample must be nonempty");
  const SpacePtr& space = sample.front().space();
  if (!space->is_spider())
    throw Error("bad-parameter", "log-concave MLE requires a spider space");
  for (const auto& x : sample)
    if (!x.same_space(sample.front()))
      throw Error("different-spaces", "sample points on different complexes");

  // Collapse duplicates to weighted sites.
  Problem pr;
  pr.k_legs = space->axis_count();
  pr.leg_sites.resize(pr.k_legs);
  std::vector<std::pair<int, double>> locs;
  for (const auto& x : sample) {
    if (x.is_origin())
      locs.emplace_back(-1, 0.0);
    else
      locs.emplace_back(x.coords()[0].first, x.coords()[0].second);
  }
  std::sort(locs.begin(), locs.end());
  const double wn = 1.0 / static_cast<double>(sample.size());
  for (const auto& [leg, u] : locs) {
    if (!pr.sites.empty() && pr.sites.back().leg == leg &&
        pr.sites.back().u == u) {
      pr.sites.back().w += wn;
      continue;
    }
    int id = static_cast<int>(pr.sites.size());
    pr.sites.push_back({leg, u, wn});
    if (leg < 0)
      pr.origin_site = id;
    else
      pr.leg_sites[leg].push_back(id);
  }
  if (pr.sites.size() < 2)
    throw Error("lcmle-nonexistent",
                "sample has a single support point; the hull is null");

  const std::size_t n = pr.sites.size();

  // Gaussian-shaped start keeps the early hulls small.
  double s2 = 0.0;
  for (const auto& s : pr.sites) s2 += s.w * s.u * s.u;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = -pr.sites[i].u * pr.sites[i].u / (2.0 * s2);

  double best_obj = snap_and_normalize(pr, y);
  std::vector<double> best_y = y;
  std::vector<double> avg(n, 0.0);
  int since_improve = 0;
  int t = 0;
  bool converged = false;

  for (t = 1; t <= opts.max_iter; ++t) {
    MajorantBuild b = pr.build(y);
    std::vector<double> m = hat_mass(pr, b);
    double gnorm = 0.0;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = pr.sites[i].w - m[i];
      gnorm += g[i] * g[i];
    }
    gnorm = std::sqrt(gnorm);
    if (gnorm < 1e-14) {
      converged = true;
      break;
    }
    double step = opts.step_scale / std::sqrt(static_cast<double>(t));
    for (std::size_t i = 0; i < n; ++i) y[i] += step * g[i] / gnorm;

    double obj = snap_and_normalize(pr, y);
    for (std::size_t i = 0; i < n; ++i) avg[i] += y[i];
    if (obj > best_obj + opts.tol) {
      best_obj = obj;
      best_y = y;
      since_improve = 0;
    } else {
      if (obj > best_obj) {
        best_obj = obj;
        best_y = y;
      }
      if (++since_improve >= opts.patience) {
        converged = true;
        break;
      }
    }
  }

  // Polyak average as an alternative candidate.
  if (t > 1) {
    for (auto& v : avg) v /= static_cast<double>(std::min(t, opts.max_iter));
    double obj = snap_and_normalize(pr, avg);
    if (obj > best_obj) {
      best_obj = obj;
      best_y = avg;
    }
  }

  if (n <= 64)
    polish(pr, best_y, opts.tol);
  else
    knot_polish(pr, best_y, opts.tol);
  best_obj = snap_and_normalize(pr, best_y);

  FitResult res;
  MajorantBuild b;
  res.objective = pr.objective(best_y, &b);
  double integral = integrate_exp(b.psi);
  b.psi.shift(-std::log(integral));  // exact unit mass
  res.psi = std::move(b.psi);
  res.integral = integrate_exp(res.psi);
  res.iterations = std::min(t, opts.max_iter);
  res.converged = converged;
  res.objective = best_obj;
  return res;
}

}  // namespace orthant
