#include "orthant/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orthant {

namespace {

Face intersect(const Face& a, const Face& b) {
  Face out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

Face unite(const Face& a, const Face& b) {
  Face out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

Face subtract(const Face& a, const Face& b) {
  Face out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

double block_norm2(const Point& p, const Face& block) {
  double s = 0.0;
  for (int axis : block) {
    double v = p.coord(axis);
    s += v * v;
  }
  return s;
}

// Disjointness across the common block and all parts of one side.
bool side_disjoint(const Face& common, const std::vector<Face>& parts) {
  Face seen = common;
  std::sort(seen.begin(), seen.end());
  for (const auto& part : parts) {
    for (int axis : part) {
      if (std::binary_search(seen.begin(), seen.end(), axis)) return false;
    }
    seen = unite(seen, part);
  }
  return true;
}

double support_f(const SupportPair& sp, const Point& x, const Point& y) {
  double s = 0.0;
  for (int axis : sp.common) {
    double d = x.coord(axis) - y.coord(axis);
    s += d * d;
  }
  for (std::size_t i = 0; i < sp.blocks(); ++i) {
    double a = std::sqrt(block_norm2(x, sp.a_parts[i]));
    double b = std::sqrt(block_norm2(y, sp.b_parts[i]));
    s += (a + b) * (a + b);
  }
  return std::sqrt(s);
}

}  // namespace

std::string to_string(GeodesicKind k) {
  switch (k) {
    case GeodesicKind::same_orthant: return "same-orthant";
    case GeodesicKind::cone: return "cone";
    case GeodesicKind::support_sequence: return "support-sequence";
  }
  return "?";
}

double cone_distance(const Point& x, const Point& y) {
  if (!x.same_space(y))
    throw Error("different-spaces", "points belong to different complexes");
  return x.norm() + y.norm();
}

bool is_proper(const SupportPair& sp, const Point& x, const Point& y) {
  if (sp.a_parts.size() != sp.b_parts.size() || sp.a_parts.empty())
    return false;
  const Face ex = x.active();
  const Face ey = y.active();
  const std::size_t k = sp.blocks();

  // (P1) shared block: the common axes active in x must be exactly those
  // active in y.
  if (intersect(sp.common, ex) != intersect(sp.common, ey)) return false;

  // (P1) later A-blocks vs earlier B-blocks: nonempty and compatible.
  const auto& space = *x.space();
  std::vector<Face> ax(k), by(k);
  for (std::size_t i = 0; i < k; ++i) {
    ax[i] = intersect(sp.a_parts[i], ex);
    by[i] = intersect(sp.b_parts[i], ey);
  }
  for (std::size_t i = 1; i < k; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (ax[i].empty() || by[j].empty()) return false;
      if (!space.has_face(unite(ax[i], by[j]))) return false;
    }
  }

  // (P2) nondecreasing transition ratios. A ratio with zero denominator and
  // positive numerator is +inf; 0/0 is rejected (only reachable at the ends,
  // where the block carries no mass on either side).
  std::vector<double> num(k), den(k);
  for (std::size_t i = 0; i < k; ++i) {
    num[i] = block_norm2(x, ax[i]);
    den[i] = block_norm2(y, by[i]);
    if (k >= 2 && num[i] == 0.0 && den[i] == 0.0) return false;
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (num[i] * den[i + 1] > num[i + 1] * den[i]) return false;
  }
  return true;
}

double path_length(const SupportPair& sp, const Point& x, const Point& y) {
  if (!x.same_space(y))
    throw Error("different-spaces", "points belong to different complexes");
  if (sp.a_parts.size() != sp.b_parts.size() || sp.a_parts.empty())
    throw Error("malformed-partition",
                "support pair needs equally many nonzero A and B blocks");
  if (!side_disjoint(sp.common, sp.a_parts) ||
      !side_disjoint(sp.common, sp.b_parts))
    throw Error("malformed-partition", "support pair blocks must be disjoint");
  if (is_proper(sp, x, y)) return support_f(sp, x, y);
  return cone_distance(x, y);
}

GeodesicResult distance(const Point& x, const Point& y) {
  if (!x.same_space(y))
    throw Error("different-spaces", "points belong to different complexes");
  const auto& space = *x.space();
  if (!space.is_flag())
    throw Error("non-flag",
                "complex is not a flag complex; the space is not CAT(0)");

  const Face ex = x.active();
  const Face ey = y.active();

  GeodesicResult best;
  best.distance = std::numeric_limits<double>::infinity();

  // Same-orthant case: straight segment inside one orthant.
  if (space.has_face(unite(ex, ey))) {
    double s = 0.0;
    for (int axis : unite(ex, ey)) {
      double d = x.coord(axis) - y.coord(axis);
      s += d * d;
    }
    best.distance = std::sqrt(s);
    best.kind = GeodesicKind::same_orthant;
  }

  // (P1) forces A_2..A_k to meet E(x) and B_1..B_{k-1} to meet E(y), so a
  // proper pair has at most min(|E(x)|, |E(y)|) + 1 blocks (A_1 and B_k may
  // be empty).
  const Face shared = intersect(ex, ey);
  const std::size_t ns = shared.size();
  const std::size_t kcap = std::min(ex.size(), ey.size()) + 1;

  for (std::size_t k = 1; k <= kcap; ++k) {
    for (std::size_t cmask = 0; cmask < (std::size_t(1) << ns); ++cmask) {
      Face common;
      for (std::size_t i = 0; i < ns; ++i)
        if (cmask & (std::size_t(1) << i)) common.push_back(shared[i]);
      const Face axs = subtract(ex, common);
      const Face bys = subtract(ey, common);

      // Assign each remaining axis of x (resp. y) to one of the k blocks.
      std::vector<std::size_t> aassign(axs.size(), 0), bassign(bys.size(), 0);
      bool adone = false;
      while (!adone) {
        std::fill(bassign.begin(), bassign.end(), 0);
        bool bdone = false;
        while (!bdone) {
          SupportPair sp;
          sp.common = common;
          sp.a_parts.assign(k, {});
          sp.b_parts.assign(k, {});
          for (std::size_t i = 0; i < axs.size(); ++i)
            sp.a_parts[aassign[i]].push_back(axs[i]);
          for (std::size_t i = 0; i < bys.size(); ++i)
            sp.b_parts[bassign[i]].push_back(bys[i]);

          if (is_proper(sp, x, y)) {
            double f = support_f(sp, x, y);
            if (f < best.distance) {
              best.distance = f;
              bool full_cone = common.empty() && k == 1;
              best.kind = full_cone ? GeodesicKind::cone
                                    : GeodesicKind::support_sequence;
              best.witness =
                  full_cone ? std::nullopt : std::optional<SupportPair>(sp);
            }
          }

          // Next b assignment.
          bdone = true;
          for (std::size_t i = 0; i < bassign.size(); ++i) {
            if (++bassign[i] < k) {
              bdone = false;
              break;
            }
            bassign[i] = 0;
          }
          if (bassign.empty()) break;
        }
        adone = true;
        for (std::size_t i = 0; i < aassign.size(); ++i) {
          if (++aassign[i] < k) {
            adone = false;
            break;
          }
          aassign[i] = 0;
        }
        if (aassign.empty()) break;
      }
    }
  }
  return best;
}

Point geodesic_point(const Point& x, const Point& y, double s) {
  if (s < 0.0 || s > 1.0)
    throw Error("bad-parameter", "geodesic parameter must lie in [0, 1]");
  GeodesicResult r = distance(x, y);
  if (r.distance == 0.0 || s == 0.0) return x;
  if (s == 1.0) return y;

  std::vector<std::pair<int, double>> coords;

  if (r.kind == GeodesicKind::same_orthant) {
    for (int axis : unite(x.active(), y.active())) {
      double v = (1.0 - s) * x.coord(axis) + s * y.coord(axis);
      coords.emplace_back(axis, v);
    }
    return Point::make_indexed(x.space(), coords);
  }

  SupportPair sp;
  if (r.witness) {
    sp = *r.witness;
  } else {
    sp.a_parts = {x.active()};
    sp.b_parts = {y.active()};
  }

  for (int axis : sp.common) {
    coords.emplace_back(axis, (1.0 - s) * x.coord(axis) + s * y.coord(axis));
  }
  for (std::size_t i = 0; i < sp.blocks(); ++i) {
    const double a = std::sqrt(block_norm2(x, sp.a_parts[i]));
    const double b = std::sqrt(block_norm2(y, sp.b_parts[i]));
    const double radial = s * (a + b) - a;
    if (radial < 0.0) {
      for (int axis : sp.a_parts[i])
        coords.emplace_back(axis, x.coord(axis) * (-radial) / a);
    } else if (radial > 0.0) {
      for (int axis : sp.b_parts[i])
        coords.emplace_back(axis, y.coord(axis) * radial / b);
    }
  }
  return Point::make_indexed(x.space(), coords);
}

}  // namespace orthant
