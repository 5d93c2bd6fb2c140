#include "orthant/complex.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace orthant {

namespace {

// All subsets of a (small) face.
void insert_downward(std::set<Face>& faces, const Face& f) {
  const std::size_t n = f.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    Face g;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t(1) << i)) g.push_back(f[i]);
    faces.insert(std::move(g));
  }
}

bool is_pairwise_compatible(const std::set<Face>& faces, const Face& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (!faces.count(Face{s[i], s[j]})) return false;
  return true;
}

}  // namespace

SpacePtr OrthantComplex::build(
    const std::vector<std::string>& axes,
    const std::vector<std::vector<std::string>>& faces) {
  if (axes.empty()) throw Error("empty-axes", "axis set must be nonempty");

  auto c = std::shared_ptr<OrthantComplex>(new OrthantComplex());
  c->axes_ = axes;
  for (int i = 0; i < static_cast<int>(axes.size()); ++i) {
    if (!c->axis_to_index_.emplace(axes[i], i).second)
      throw Error("duplicate-axis", "duplicate axis identifier: " + axes[i]);
  }

  c->faces_.insert(Face{});
  for (int i = 0; i < c->axis_count(); ++i) c->faces_.insert(Face{i});
  for (const auto& fs : faces) {
    Face f;
    for (const auto& name : fs) {
      int idx = c->axis_index(name);
      if (idx < 0) throw Error("unknown-axis", "face uses unknown axis: " + name);
      f.push_back(idx);
    }
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    insert_downward(c->faces_, f);
  }

  c->dim_ = 0;
  for (const auto& f : c->faces_)
    c->dim_ = std::max(c->dim_, static_cast<int>(f.size()));
  for (const auto& f : c->faces_)
    if (static_cast<int>(f.size()) == c->dim_) c->maximal_.push_back(f);

  // Flag check: every pairwise-compatible axis subset must be a face.
  // Exponential in |axes|; the library targets |axes| <= 12.
  c->flag_ = true;
  const int n = c->axis_count();
  for (std::size_t mask = 0; mask < (std::size_t(1) << n) && c->flag_; ++mask) {
    Face s;
    for (int i = 0; i < n; ++i)
      if (mask & (std::size_t(1) << i)) s.push_back(i);
    if (s.size() < 3) continue;  // pairs and below are faces iff stored
    if (is_pairwise_compatible(c->faces_, s) && !c->faces_.count(s))
      c->flag_ = false;
  }
  return c;
}

SpacePtr OrthantComplex::spider(int k) {
  if (k < 1) throw Error("bad-parameter", "spider needs k >= 1 legs");
  std::vector<std::string> axes;
  std::vector<std::vector<std::string>> faces;
  for (int i = 0; i < k; ++i) {
    axes.push_back(std::to_string(i));
    faces.push_back({axes.back()});
  }
  return build(axes, faces);
}

SpacePtr OrthantComplex::t4() {
  // Axes are the nontrivial leaf clusters of {A,B,C,D}; two clusters are
  // compatible iff nested or disjoint, giving the 15 tree topologies.
  std::vector<std::string> clusters = {"AB",  "AC",  "AD",  "BC",  "BD",
                                       "CD",  "ABC", "ABD", "ACD", "BCD"};
  auto contains = [](const std::string& big, const std::string& small) {
    for (char ch : small)
      if (big.find(ch) == std::string::npos) return false;
    return true;
  };
  auto disjoint = [](const std::string& a, const std::string& b) {
    for (char ch : a)
      if (b.find(ch) != std::string::npos) return false;
    return true;
  };
  std::vector<std::vector<std::string>> faces;
  for (std::size_t i = 0; i < clusters.size(); ++i)
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      const auto& a = clusters[i];
      const auto& b = clusters[j];
      if (disjoint(a, b) || contains(a, b) || contains(b, a))
        faces.push_back({a, b});
    }
  return build(clusters, faces);
}

SpacePtr OrthantComplex::quarter_planes3() {
  return build({"e", "a", "b", "c"}, {{"e", "a"}, {"e", "b"}, {"e", "c"}});
}

SpacePtr OrthantComplex::named(const std::string& name) {
  if (name.rfind("spider:", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(name.substr(7));
    } catch (const std::exception&) {
      throw Error("bad-space", "malformed spider spec: " + name);
    }
    return spider(k);
  }
  if (name == "t4") return t4();
  if (name == "qp3") return quarter_planes3();
  throw Error("bad-space", "unknown space name: " + name);
}

SpacePtr OrthantComplex::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<std::string> axes = j.at("axes").get<std::vector<std::string>>();
  std::vector<std::vector<std::string>> faces =
      j.at("faces").get<std::vector<std::vector<std::string>>>();
  return build(axes, faces);
}

std::string OrthantComplex::to_json_text() const {
  nlohmann::json j;
  j["axes"] = axes_;
  nlohmann::json faces = nlohmann::json::array();
  for (const auto& f : faces_) {
    if (f.empty()) continue;
    std::vector<std::string> names;
    for (int i : f) names.push_back(axes_[i]);
    faces.push_back(names);
  }
  j["faces"] = faces;
  return j.dump();
}

int OrthantComplex::axis_index(const std::string& name) const {
  auto it = axis_to_index_.find(name);
  return it == axis_to_index_.end() ? -1 : it->second;
}

Point Point::make(SpacePtr space, const std::map<std::string, double>& coords) {
  std::vector<std::pair<int, double>> indexed;
  for (const auto& [name, v] : coords) {
    int idx = space->axis_index(name);
    if (idx < 0) throw Error("unknown-axis", "point uses unknown axis: " + name);
    indexed.emplace_back(idx, v);
  }
  return make_indexed(std::move(space), indexed);
}

Point Point::make_indexed(SpacePtr space,
                          const std::vector<std::pair<int, double>>& coords) {
  std::vector<std::pair<int, double>> canonical;
  for (const auto& [idx, v] : coords) {
    if (v < 0.0 || !std::isfinite(v))
      throw Error("negative-coordinate",
                  "coordinate on axis " + space->axis_name(idx) +
                      " must be finite and >= 0");
    if (v > 0.0) canonical.emplace_back(idx, v);
  }
  std::sort(canonical.begin(), canonical.end());
  for (std::size_t i = 1; i < canonical.size(); ++i)
    if (canonical[i].first == canonical[i - 1].first)
      throw Error("duplicate-axis", "repeated axis in point coordinates");

  Face act;
  for (const auto& [idx, _] : canonical) act.push_back(idx);
  if (!space->has_face(act))
    throw Error("not-a-face", "active axis set is not a face of the complex");
  return Point(std::move(space), std::move(canonical));
}

Face Point::active() const {
  Face f;
  for (const auto& [idx, _] : coords_) f.push_back(idx);
  return f;
}

double Point::coord(int axis) const {
  for (const auto& [idx, v] : coords_)
    if (idx == axis) return v;
  return 0.0;
}

double Point::norm() const {
  double s = 0.0;
  for (const auto& [_, v] : coords_) s += v * v;
  return std::sqrt(s);
}

bool Point::operator==(const Point& other) const {
  return space_.get() == other.space_.get() && coords_ == other.coords_;
}

Point Point::from_json_text(SpacePtr space, const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const nlohmann::json& m = j.contains("coords") ? j.at("coords") : j;
  std::map<std::string, double> coords;
  for (auto it = m.begin(); it != m.end(); ++it)
    coords[it.key()] = it.value().get<double>();
  return make(std::move(space), coords);
}

std::string Point::to_json_text() const {
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [idx, v] : coords_) m[space_->axis_name(idx)] = v;
  nlohmann::json j;
  j["coords"] = m;
  return j.dump();
}

BorelBoxSet BorelBoxSet::cube(const OrthantComplex& c, double radius) {
  BorelBoxSet d;
  for (const auto& f : c.maximal_faces()) {
    Box b;
    b.face = f;
    b.lower.assign(f.size(), 0.0);
    b.upper.assign(f.size(), radius);
    d.boxes.push_back(std::move(b));
  }
  return d;
}

BorelBoxSet BorelBoxSet::around(const Point& center, double radius) {
  BorelBoxSet d;
  for (const auto& f : center.space()->maximal_faces()) {
    Box b;
    b.face = f;
    for (int axis : f) {
      double c = center.coord(axis);
      b.lower.push_back(std::max(0.0, c - radius));
      b.upper.push_back(c + radius);
    }
    d.boxes.push_back(std::move(b));
  }
  return d;
}

}  // namespace orthant
