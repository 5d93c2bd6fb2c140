#include <doctest.h>

#include <cmath>
#include <vector>

#include "orthant/geodesic.hpp"
#include "orthant/rng.hpp"

#include "oracles.hpp"

using namespace orthant;

namespace {

Point random_point(const SpacePtr& s, CounterRng& rng) {
  const auto& maxf = s->maximal_faces();
  const Face& f = maxf[rng.next_u64() % maxf.size()];
  std::vector<std::pair<int, double>> coords;
  for (int a : f) {
    if (rng.next_double() < 0.3) continue;  // drop to a boundary face often
    coords.emplace_back(a, 0.05 + 2.0 * rng.next_double());
  }
  return Point::make_indexed(s, coords);
}

std::vector<SpacePtr> test_spaces() {
  return {OrthantComplex::spider(3), OrthantComplex::spider(5),
          OrthantComplex::quarter_planes3(), OrthantComplex::t4()};
}

}  // namespace

TEST_CASE("cone distance") {
  SpacePtr qp = OrthantComplex::quarter_planes3();
  Point x = Point::make(qp, {{"e", 3.0}, {"a", 4.0}});
  CHECK(cone_distance(x, Point::origin(qp)) == doctest::Approx(5.0));
  CHECK(cone_distance(Point::origin(qp), Point::origin(qp)) == 0.0);

  SpacePtr sp = OrthantComplex::spider(3);
  Point a = Point::make(sp, {{"0", 5.0}});
  Point b = Point::make(sp, {{"1", 2.0}});
  CHECK(cone_distance(a, b) == doctest::Approx(7.0));
  CHECK_THROWS_AS(cone_distance(a, Point::origin(qp)), Error);
}

TEST_CASE("properness of support pairs") {
  SpacePtr sp = OrthantComplex::spider(3);
  Point x = Point::make(sp, {{"1", 0.5}});
  Point y = Point::make(sp, {{"2", 0.6}});
  int l1 = sp->axis_index("1"), l2 = sp->axis_index("2");

  SupportPair cone_pair{{}, {{l1}}, {{l2}}};
  CHECK(is_proper(cone_pair, x, y));

  SupportPair bad_common{{l1}, {{}}, {{l2}}};
  CHECK_FALSE(is_proper(bad_common, x, y));

  SpacePtr qp = OrthantComplex::quarter_planes3();
  Point u = Point::make(qp, {{"e", 1.0}, {"a", 1.0}});
  Point v = Point::make(qp, {{"e", 1.0}, {"c", 1.0}});
  int e = qp->axis_index("e"), a = qp->axis_index("a"), c = qp->axis_index("c");
  SupportPair shared{{e}, {{a}}, {{c}}};
  CHECK(is_proper(shared, u, v));
}

TEST_CASE("path length of explicit pairs") {
  SpacePtr sp = OrthantComplex::spider(3);
  Point x = Point::make(sp, {{"1", 0.5}});
  Point y = Point::make(sp, {{"2", 0.6}});
  int l1 = sp->axis_index("1"), l2 = sp->axis_index("2");
  CHECK(path_length({{}, {{l1}}, {{l2}}}, x, y) == doctest::Approx(1.1));

  SpacePtr qp = OrthantComplex::quarter_planes3();
  Point u = Point::make(qp, {{"e", 1.0}, {"a", 1.0}});
  Point v = Point::make(qp, {{"e", 1.0}, {"c", 1.0}});
  int e = qp->axis_index("e"), a = qp->axis_index("a"), c = qp->axis_index("c");
  CHECK(path_length({{e}, {{a}}, {{c}}}, u, v) == doctest::Approx(2.0));

  // (P1) holds but the ratio chain decreases, forcing the cone penalty.
  Point p = Point::make(qp, {{"e", 0.1}, {"a", 2.0}});
  Point q = Point::make(qp, {{"e", 0.5}, {"c", 0.1}});
  SupportPair reversed{{}, {{a}, {e}}, {{e}, {c}}};
  CHECK_FALSE(is_proper(reversed, p, q));
  CHECK(path_length(reversed, p, q) == doctest::Approx(cone_distance(p, q)));

  SupportPair overlapping{{e}, {{e}}, {{c}}};
  CHECK_THROWS_AS(path_length(overlapping, u, v), Error);
}

TEST_CASE("distance on spiders and quarter planes") {
  SpacePtr sp = OrthantComplex::spider(3);
  Point x = Point::make(sp, {{"0", 0.5}});
  Point y = Point::make(sp, {{"1", 0.6}});

  GeodesicResult same = distance(x, x);
  CHECK(same.distance == 0.0);

  GeodesicResult r = distance(x, y);
  CHECK(r.distance == doctest::Approx(1.1));
  CHECK(r.kind == GeodesicKind::cone);

  GeodesicResult leg = distance(x, Point::make(sp, {{"0", 1.7}}));
  CHECK(leg.distance == doctest::Approx(1.2));
  CHECK(leg.kind == GeodesicKind::same_orthant);

  SpacePtr qp = OrthantComplex::quarter_planes3();
  Point u = Point::make(qp, {{"e", 1.0}, {"a", 1.0}});
  Point v = Point::make(qp, {{"e", 1.0}, {"c", 1.0}});
  GeodesicResult rq = distance(u, v);
  CHECK(rq.distance == doctest::Approx(2.0));
  CHECK(rq.kind == GeodesicKind::support_sequence);
  REQUIRE(rq.witness.has_value());
  CHECK(rq.witness->common == Face{qp->axis_index("e")});
  CHECK(rq.distance < cone_distance(u, v));
}

TEST_CASE("distance requires a flag complex") {
  SpacePtr hollow =
      OrthantComplex::build({"1", "2", "3"}, {{"1", "2"}, {"2", "3"}, {"1", "3"}});
  Point x = Point::make(hollow, {{"1", 1.0}});
  CHECK_THROWS_AS(distance(x, x), Error);
}

TEST_CASE("brute-force oracle agreement") {
  for (const auto& space : test_spaces()) {
    CounterRng rng = CounterRng::substream(11, space->axis_count());
    for (int i = 0; i < 200; ++i) {
      Point x = random_point(space, rng);
      Point y = random_point(space, rng);
      double got = distance(x, y).distance;
      double want = oracles::brute_force_distance(x, y);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("metric axioms on random point sets") {
  for (const auto& space : test_spaces()) {
    CounterRng rng = CounterRng::substream(23, space->axis_count());
    std::vector<Point> pts;
    for (int i = 0; i < 12; ++i) pts.push_back(random_point(space, rng));

    for (const auto& a : pts)
      for (const auto& b : pts) {
        double dab = distance(a, b).distance;
        CHECK(dab == distance(b, a).distance);
        CHECK(dab <= cone_distance(a, b) + 1e-12);
        if (a == b)
          CHECK(dab == 0.0);
        else
          CHECK(dab > 0.0);
      }

    int triples = 0;
    for (const auto& a : pts)
      for (const auto& b : pts)
        for (const auto& c : pts) {
          ++triples;
          CHECK(distance(a, c).distance <=
                distance(a, b).distance + distance(b, c).distance + 1e-12);
        }
    CHECK(triples >= 1000);
  }
}

TEST_CASE("spider distances equal the cone bound across legs") {
  SpacePtr sp = OrthantComplex::spider(4);
  CounterRng rng(99);
  for (int i = 0; i < 50; ++i) {
    int la = static_cast<int>(rng.next_u64() % 4);
    int lb = static_cast<int>(rng.next_u64() % 4);
    Point a = Point::make_indexed(sp, {{la, 0.1 + rng.next_double()}});
    Point b = Point::make_indexed(sp, {{lb, 0.1 + rng.next_double()}});
    double d = distance(a, b).distance;
    if (la == lb)
      CHECK(d == doctest::Approx(std::abs(a.norm() - b.norm())));
    else
      CHECK(d == doctest::Approx(cone_distance(a, b)));
  }
}

TEST_CASE("geodesic points") {
  SpacePtr sp = OrthantComplex::spider(3);
  Point x = Point::make(sp, {{"0", 0.5}});
  Point y = Point::make(sp, {{"1", 0.6}});

  CHECK(geodesic_point(x, y, 0.0) == x);
  CHECK(geodesic_point(x, y, 1.0) == y);
  CHECK(geodesic_point(x, y, 0.5 / 1.1).is_origin());

  Point mid = geodesic_point(x, y, 0.75);
  CHECK(mid.coord(sp->axis_index("1")) == doctest::Approx(0.325));
  CHECK(mid.coord(sp->axis_index("0")) == 0.0);

  CHECK_THROWS_AS(geodesic_point(x, y, -0.1), Error);
  CHECK_THROWS_AS(geodesic_point(x, y, 1.1), Error);
}

TEST_CASE("geodesics have constant speed") {
  for (const auto& space : test_spaces()) {
    CounterRng rng = CounterRng::substream(37, space->axis_count());
    for (int i = 0; i < 25; ++i) {
      Point x = random_point(space, rng);
      Point y = random_point(space, rng);
      double d = distance(x, y).distance;
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (double t : {0.1, 0.6, 1.0}) {
          Point gs = geodesic_point(x, y, s);
          Point gt = geodesic_point(x, y, t);
          CHECK(distance(gs, gt).distance ==
                doctest::Approx(std::abs(s - t) * d).epsilon(1e-9));
        }
    }
  }
}

TEST_CASE("joint convexity of the metric") {
  for (const auto& space : test_spaces()) {
    CounterRng rng = CounterRng::substream(53, space->axis_count());
    for (int i = 0; i < 25; ++i) {
      Point x0 = random_point(space, rng), x1 = random_point(space, rng);
      Point y0 = random_point(space, rng), y1 = random_point(space, rng);
      double d0 = distance(x0, y0).distance;
      double d1 = distance(x1, y1).distance;
      for (double t : {0.25, 0.5, 0.75}) {
        Point gx = geodesic_point(x0, x1, t);
        Point gy = geodesic_point(y0, y1, t);
        CHECK(distance(gx, gy).distance <= (1 - t) * d0 + t * d1 + 1e-9);
      }
    }
  }
}
