#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orthant/complex.hpp"

namespace orthant {

// Candidate geodesic combinatorics: an ordered partition pair of the
// endpoints' active axes. `common` is the shared block (axes kept active
// along the whole path); a_parts[i]/b_parts[i] are the axes dropped from x
// and picked up for y at the i-th transition. a_parts.front() and
// b_parts.back() may be empty; everything else must be nonempty to be proper.
struct SupportPair {
  Face common;
  std::vector<Face> a_parts;
  std::vector<Face> b_parts;

  std::size_t blocks() const { return a_parts.size(); }
};

enum class GeodesicKind { same_orthant, cone, support_sequence };

std::string to_string(GeodesicKind k);

struct GeodesicResult {
  double distance = 0.0;
  GeodesicKind kind = GeodesicKind::same_orthant;
  std::optional<SupportPair> witness;  // set when kind == support_sequence
};

// Upper bound on the geodesic distance: the two-segment path through the
// origin, |x| + |y|.
double cone_distance(const Point& x, const Point& y);

// Properness of a support pair: the shared block matches both active sets,
// later A-blocks are compatible with earlier B-blocks (union is a face),
// and the transition ratio chain is nondecreasing.
bool is_proper(const SupportPair& sp, const Point& x, const Point& y);

// Length of the path through the support sequence when proper; the cone
// distance otherwise. Throws on malformed (non-disjoint / non-covering)
// partitions.
double path_length(const SupportPair& sp, const Point& x, const Point& y);

// Exact geodesic distance: minimum of path_length over all support pairs of
// the active axes, plus the same-orthant Euclidean case. Requires a flag
// (CAT(0)) complex.
GeodesicResult distance(const Point& x, const Point& y);

// Point at parameter s in [0, 1] along the unique geodesic from x to y.
Point geodesic_point(const Point& x, const Point& y, double s);

}  // namespace orthant
