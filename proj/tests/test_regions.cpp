#include <cmath>
#include <random>

#include "doctest.h"
#include "sectorkit/error.hpp"
#include "sectorkit/regions.hpp"

using namespace sectorkit;

namespace {

// 1+1 diamonds in light-cone coordinates u = t + x, v = t - x: the closed
// diamond is the box [u-, u+] x [v-, v+].
struct Box {
  long u0, u1, v0, v1;
};

Box box_of(long t0, long x0, long t1, long x1) { return {t0 + x0, t1 + x1, t0 - x0, t1 - x1}; }

bool box_inside(const Box& a, const Box& b) { return b.u0 <= a.u0 && a.u1 <= b.u1 && b.v0 <= a.v0 && a.v1 <= b.v1; }

// spacelike separated: one box strictly left of the other
bool box_disjoint(const Box& a, const Box& b) {
  return (a.u1 < b.u0 && a.v0 > b.v1) || (b.u1 < a.u0 && b.v0 > a.v1);
}

double angle(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (int i = 0; i < 3; ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::acos(std::clamp(d / std::sqrt(na * nb), -1.0, 1.0));
}

}  // namespace

TEST_CASE("double cones against light-cone boxes") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<long> c(-6, 6), h(1, 4);
  int tested = 0;
  for (int it = 0; it < 4000; ++it) {
    long t = c(rng), x = c(rng), s = h(rng), t2 = c(rng), x2 = c(rng), s2 = h(rng);
    if ((t + x) % 2 || (t2 + x2) % 2) continue;
    // apexes (t - s, x) and (t + s, x)
    Region a = make_double_cone({Q(t - s), Q(x)}, {Q(t + s), Q(x)});
    Region b = make_double_cone({Q(t2 - s2), Q(x2)}, {Q(t2 + s2), Q(x2)});
    Box A = box_of(t - s, x, t + s, x), B = box_of(t2 - s2, x2, t2 + s2, x2);
    CHECK(contained_in(a, b) == box_inside(A, B));
    CHECK(includes(a, b) == (box_inside(A, B) && a.key() != b.key()));
    // boundary contact is lightlike, not spacelike
    bool touching = A.u1 == B.u0 || B.u1 == A.u0 || A.v0 == B.v1 || B.v0 == A.v1;
    if (!touching) CHECK(causally_disjoint(a, b) == box_disjoint(A, B));
    CHECK(causally_disjoint(a, b) == causally_disjoint(b, a));
    ++tested;
  }
  CHECK(tested > 500);
}

TEST_CASE("slice balls") {
  Region a = make_slice_ball({0, 0}, Q(1, 2)), b = make_slice_ball({0, 0}, 1), c = make_slice_ball({2, 0}, Q(1, 2));
  CHECK(includes(a, b));
  CHECK(!includes(b, a));
  CHECK(contained_in(a, a));
  CHECK(!includes(a, a));
  CHECK(causally_disjoint(a, c));
  CHECK(!causally_disjoint(b, make_slice_ball({2, 0}, 1)));  // touching closures
  CHECK(a.id == "B(0,0;1/2)");
  // radius zero balls are points
  Region p = make_slice_ball({0, 0}, 0);
  CHECK(includes(p, a));
  CHECK_THROWS_AS(make_slice_ball({0}, -1), Error);
  CHECK_THROWS_AS(contained_in(make_slice_ball({0, 0}, 1, 0), make_slice_ball({0, 0}, 1, 1)), Error);
  try {
    (void)includes(a, make_slice_ball({0, 0, 0}, 1));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::ChartMismatch);
  }
}

TEST_CASE("circle arcs") {
  Region a = make_circle_cap(0, Q(1, 24)), b = make_circle_cap(Q(1, 48), Q(1, 12));
  CHECK(includes(a, b));
  CHECK(causally_disjoint(a, make_circle_cap(Q(1, 2), Q(1, 24))));
  // wraps around the origin
  CHECK(includes(make_circle_cap(Q(47, 48), Q(1, 96)), a));
  CHECK(make_circle_cap(Q(5, 4), Q(1, 8)).key() == make_circle_cap(Q(1, 4), Q(1, 8)).key());
  CHECK_THROWS_AS(make_circle_cap(0, Q(1, 2)), Error);
}

TEST_CASE("sphere caps against a floating point oracle") {
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> c(-3, 3);
  std::vector<Q> cosines{Q(99, 100), Q(4, 5), Q(1, 2), Q(12, 25), Q(1, 10), Q(-1, 5)};
  std::uniform_int_distribution<size_t> pick(0, cosines.size() - 1);
  int tested = 0;
  for (int it = 0; it < 3000; ++it) {
    std::vector<long> u{c(rng), c(rng), c(rng)}, v{c(rng), c(rng), c(rng)};
    if (!(u[0] || u[1] || u[2]) || !(v[0] || v[1] || v[2])) continue;
    Q ca = cosines[pick(rng)], cb = cosines[pick(rng)];
    Region a = make_sphere_cap({Q(u[0]), Q(u[1]), Q(u[2])}, Surd::rational(ca));
    Region b = make_sphere_cap({Q(v[0]), Q(v[1]), Q(v[2])}, Surd::rational(cb));
    double ra = std::acos(ca.get_d()), rb = std::acos(cb.get_d());
    double d = angle({double(u[0]), double(u[1]), double(u[2])}, {double(v[0]), double(v[1]), double(v[2])});
    const double eps = 1e-9;
    if (std::abs(d + ra - rb) > eps) CHECK(contained_in(a, b) == (d + ra < rb));
    if (std::abs(d - ra - rb) > eps && ra + rb < M_PI - eps) CHECK(causally_disjoint(a, b) == (d > ra + rb));
    ++tested;
  }
  CHECK(tested > 2000);
  // exact cosines from the table
  CHECK(cos_pi_fraction(Q(1, 3)) == Surd::rational(Q(1, 2)));
  CHECK(cos_pi_fraction(Q(2, 3)) == Surd::rational(Q(-1, 2)));
  CHECK(cos_pi_fraction(Q(1, 6)).square() == Q(3, 4));
  CHECK_THROWS_AS(cos_pi_fraction(Q(1, 5)), Error);
}

TEST_CASE("symmetry groups") {
  CHECK(hyperoctahedral_group(2).size() == 8);
  CHECK(hyperoctahedral_group(3).size() == 48);
  CHECK(octahedral_rotations().size() == 24);
  CHECK(circle_rotations(12).size() == 12);
  // closure under composition
  for (const auto& G : {hyperoctahedral_group(2), octahedral_rotations(), circle_rotations(6)})
    for (const auto& g : G)
      for (const auto& h : G) {
        Symmetry gh = g.compose(h);
        bool found = false;
        for (const auto& k : G) found = found || k.same_action(gh);
        CHECK(found);
      }
  // composition acts as composition on points
  auto G = hyperoctahedral_group(2);
  Point p{{Q(1), Q(2)}, Chart{ChartKind::Slice, 2}};
  for (const auto& g : G)
    for (const auto& h : G) CHECK(g.compose(h).apply(p) == g.apply(h.apply(p)));
  for (const auto& g : G) CHECK(Symmetry::from_json(g.to_json()).same_action(g));
}

TEST_CASE("symmetries preserve the relations") {
  auto fam = sample_family(json::parse(R"({"model":"SliceBall","dim":2,"box":[-1,1],"group":"dihedral",
      "layers":[{"cells":0,"radius":"0"},{"cells":1,"radius":"3/5"}]})"));
  REQUIRE(fam.group.size() == 8);
  for (const auto& g : fam.group)
    for (const auto& a : fam.regions)
      for (const auto& b : fam.regions) {
        Region ga = act(g, a), gb = act(g, b);
        CHECK(includes(a, b) == includes(ga, gb));
        CHECK(causally_disjoint(a, b) == causally_disjoint(ga, gb));
      }
}

TEST_CASE("sampled families") {
  auto fam = sample_family(json::parse(R"({"model":"SliceBall","dim":1,"box":[-3,3],"collar":"1",
      "layers":[{"cells":0,"radius":"0"},{"cells":1,"radius":"3/5"}]})"));
  CHECK(fam.regions.size() == 13);
  CHECK(fam.num_levels == 2);
  long collar = 0;
  for (auto c : fam.collar) collar += c;
  CHECK(collar > 0);
  auto back = family_from_json(family_to_json(fam));
  REQUIRE(back.regions.size() == fam.regions.size());
  for (size_t i = 0; i < fam.regions.size(); ++i) {
    CHECK(back.regions[i].key() == fam.regions[i].key());
    CHECK(back.level[i] == fam.level[i]);
  }
  auto circle = sample_family(json::parse(R"({"model":"DirectionCap","chart":"circle","group":"rotations",
      "layers":[{"n":12,"radius_pi":"1/24"}]})"));
  CHECK(circle.group.size() == 12);

  auto expect_kind = [](const char* params, ErrorKind k) {
    try {
      (void)sample_family(json::parse(params));
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind == k);
    }
  };
  // a half-offset layer is not closed under the 12-fold rotations of the first
  expect_kind(R"({"model":"DirectionCap","chart":"circle","group":"rotations","n":24,
      "layers":[{"n":12,"radius_pi":"1/24"}]})", ErrorKind::NotClosed);
  expect_kind(R"({"model":"SliceBall","dim":1,"box":[0,0],"layers":[{"cells":1,"radius":"1"}]})",
              ErrorKind::EmptyFamily);
  expect_kind(R"({"model":"Hypercone","dim":1,"box":[0,1],"radii":["1"]})", ErrorKind::ConfigInvalid);
}
