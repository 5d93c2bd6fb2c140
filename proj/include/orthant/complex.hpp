#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "orthant/error.hpp"

namespace orthant {

// A face is a sorted vector of axis indices.
using Face = std::vector<int>;

class OrthantComplex;
using SpacePtr = std::shared_ptr<const OrthantComplex>;

// Orthant space O(E, Omega): one nonnegative orthant per face of a
// simplicial complex over the axis set, glued along shared faces.
// Immutable after construction.
class OrthantComplex {
public:
  // Applies downward closure and inserts all singletons and the empty face.
  static SpacePtr build(const std::vector<std::string>& axes,
                        const std::vector<std::vector<std::string>>& faces);

  // k half-lines glued at the origin.
  static SpacePtr spider(int k);

  // The 4-taxon tree space: 10 cluster axes, 15 maximal 2-faces.
  static SpacePtr t4();

  // Three quarter-planes sharing one axis ("e"); the local picture of t4.
  static SpacePtr quarter_planes3();

  // "spider:k", "t4", "qp3".
  static SpacePtr named(const std::string& name);

  static SpacePtr from_json_text(const std::string& text);
  std::string to_json_text() const;

  const std::vector<std::string>& axes() const { return axes_; }
  int axis_count() const { return static_cast<int>(axes_.size()); }
  int axis_index(const std::string& name) const;  // -1 if unknown
  const std::string& axis_name(int i) const { return axes_[i]; }

  int dimension() const { return dim_; }
  const std::vector<Face>& maximal_faces() const { return maximal_; }
  std::size_t face_count() const { return faces_.size(); }

  bool has_face(const Face& sorted_axes) const {
    return faces_.count(sorted_axes) > 0;
  }

  // True iff every pairwise-compatible axis set is a face (CAT(0) criterion).
  bool is_flag() const { return flag_; }

  // True iff every maximal face is a singleton (a k-spider).
  bool is_spider() const { return dim_ == 1; }

private:
  OrthantComplex() = default;

  std::vector<std::string> axes_;
  std::map<std::string, int> axis_to_index_;
  std::set<Face> faces_;          // downward closed, contains {} and singletons
  std::vector<Face> maximal_;
  int dim_ = 0;
  bool flag_ = false;
};

// Canonical point: strictly positive coordinates on a face of Omega.
class Point {
public:
  // Drops zero coordinates and verifies the active axis set is a face.
  static Point make(SpacePtr space, const std::map<std::string, double>& coords);
  static Point make_indexed(SpacePtr space,
                            const std::vector<std::pair<int, double>>& coords);

  static Point origin(SpacePtr space) { return Point(std::move(space), {}); }

  const SpacePtr& space() const { return space_; }

  // Sorted by axis index; all values > 0.
  const std::vector<std::pair<int, double>>& coords() const { return coords_; }

  Face active() const;
  bool is_origin() const { return coords_.empty(); }
  double coord(int axis) const;  // 0 when the axis is inactive
  double norm() const;           // Euclidean norm of the coordinate vector

  bool same_space(const Point& other) const {
    return space_.get() == other.space_.get();
  }
  bool operator==(const Point& other) const;

  static Point from_json_text(SpacePtr space, const std::string& text);
  std::string to_json_text() const;

private:
  Point(SpacePtr space, std::vector<std::pair<int, double>> coords)
      : space_(std::move(space)), coords_(std::move(coords)) {}

  SpacePtr space_;
  std::vector<std::pair<int, double>> coords_;
};

// Axis-aligned integration domain: one box per maximal face
// (lower/upper bound per axis of that face, in face-axis order).
struct BorelBoxSet {
  struct Box {
    Face face;
    std::vector<double> lower;
    std::vector<double> upper;
  };
  std::vector<Box> boxes;

  // One box per maximal face, [0, radius] on every axis.
  static BorelBoxSet cube(const OrthantComplex& c, double radius);

  // One box per maximal face covering d(center, .) <= radius coordinatewise,
  // clipped to the nonnegative orthant.
  static BorelBoxSet around(const Point& center, double radius);
};

// Integral of f against the reference measure nu restricted to the domain:
// the sum over maximal faces of per-orthant Lebesgue integrals.
// Relative error <= tol on smooth integrands; throws on non-convergence.
double integrate(const SpacePtr& c, const std::function<double(const Point&)>& f,
                 const BorelBoxSet& domain, double tol);

}  // namespace orthant
