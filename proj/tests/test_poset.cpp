#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sectorkit/error.hpp"
#include "sectorkit/poset.hpp"

using namespace sectorkit;

namespace {

IndexPoset from_params(const char* s) { return build_poset(sample_family(json::parse(s))); }

const char* kCircle = R"({"model":"DirectionCap","chart":"circle","group":"rotations",
    "layers":[{"n":12,"radius_pi":"1/24"},{"n":12,"offset":"1/24","radius_pi":"1/6"}]})";
const char* kSphere = R"({"model":"DirectionCap","chart":"sphere","group":"octahedral",
    "layers":[{"orbits":[[1,0,0],[1,1,0],[1,1,1]],"cos":"99/100"},{"orbits":[[2,1,0],[2,2,1]],"cos":"4/5"},
              {"orbits":[[2,1,1]],"cos":"12/25"}]})";
const char* kCones = R"({"model":"ApexDoubleCone","dim":1,"box":[-3,3],"collar":"1",
    "layers":[{"cells":0,"radius":"1/5"},{"cells":1,"radius":"3/5"},{"cells":0,"radius":"6/5"}]})";

// Rank and torsion primes read off F_p dimensions: dim H1(F_p) = rank + #{t : p | t}.
void check_h1_against_order_complex(const IndexPoset& P) {
  auto h = h1_components(P);
  REQUIRE(h.size() == 1);
  long rank = oracle::order_complex_h1(P, 1000003);
  CHECK(h[0].rank == rank);
  for (long p : {2L, 3L, 5L}) {
    long divisible = 0;
    for (long t : h[0].torsion) divisible += t % p == 0;
    CHECK(oracle::order_complex_h1(P, p) == rank + divisible);
  }
  auto alt = h1_components_all_supports(P);
  REQUIRE(alt.size() == 1);
  CHECK(alt[0] == h[0]);
}

std::string verdict_of(const AxiomReport& r, const char* k) { return to_string(r.at(k).verdict); }

}  // namespace

TEST_CASE("relations follow the region predicates") {
  auto fam = sample_family(json::parse(kCones));
  auto P = build_poset(fam);
  REQUIRE(P.size() == fam.regions.size());
  for (size_t i = 0; i < P.size(); ++i) {
    const Region& a = P.regions[i];
    CHECK(a.id == P.elements[i]);
    if (i) CHECK(P.elements[i - 1] < P.elements[i]);
    for (size_t j = 0; j < P.size(); ++j) {
      const Region& b = P.regions[j];
      CHECK(static_cast<bool>(P.lt[i][j]) == includes(a, b));
      CHECK(static_cast<bool>(P.leq[i][j]) == contained_in(a, b));
      CHECK(static_cast<bool>(P.perp[i][j]) == causally_disjoint(a, b));
    }
  }
  CHECK_NOTHROW(validate_poset(P));
  CHECK_THROWS_AS(P.index_of("nope"), Error);
}

TEST_CASE("validation catches broken relations") {
  BitMatrix leq{{1, 1, 0}, {0, 1, 1}, {0, 0, 1}}, lt{{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}, perp(3, std::vector<uint8_t>(3));
  try {
    make_poset({"a", "b", "c"}, leq, lt, perp);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::InvariantViolation);
    CHECK(std::string(e.what()).find("transitive") != std::string::npos);
  }
  leq[0][2] = 1;
  CHECK_NOTHROW(make_poset({"a", "b", "c"}, leq, lt, perp));
  // a ⊥ c inherited by nothing below a violates K2
  BitMatrix p2(3, std::vector<uint8_t>(3));
  p2[1][2] = p2[2][1] = 1;
  BitMatrix l2{{1, 1, 0}, {0, 1, 0}, {0, 0, 1}}, s2{{0, 1, 0}, {0, 0, 0}, {0, 0, 0}};
  CHECK_THROWS_AS(make_poset({"a", "b", "c"}, l2, s2, p2), Error);
  auto P = make_poset({"a", "b", "c"}, l2, s2, p2, {}, {}, false);
  CHECK(check_axioms(P).at("K2").verdict == Verdict::Fails);
  CHECK(witness_confirms_failure(P, check_axioms(P).at("K2")));
  CHECK_THROWS_AS(make_poset({"a", "a", "c"}, l2, s2, BitMatrix(3, std::vector<uint8_t>(3))), Error);
  CHECK_THROWS_AS(make_poset({"a", "b"}, l2, s2, p2), Error);
}

TEST_CASE("canonical supports are least minimal upper bounds") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto P = oracle::set_poset(oracle::random_sets(rng, 7, 9, false));
    int n = static_cast<int>(P.size());
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        std::vector<int> minimal;
        for (int u = 0; u < n; ++u) {
          if (!P.leq[a][u] || !P.leq[b][u]) continue;
          bool is_min = true;
          for (int v = 0; v < n; ++v)
            if (v != u && P.leq[a][v] && P.leq[b][v] && P.leq[v][u]) is_min = false;
          if (is_min) minimal.push_back(u);
        }
        int s = canonical_support(P, {a, b});
        if (minimal.empty()) {
          CHECK(s == -1);
          CHECK(!edge_support(P, a, b));
        } else {
          CHECK(s == minimal.front());
          CHECK(edge_support(P, a, b) == s);
        }
        if (P.leq[a][b]) CHECK(s == b);
      }
  }
}

TEST_CASE("K6 against comparability components") {
  std::mt19937 rng(17);
  int fails = 0, holds = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto P = oracle::set_poset(oracle::random_sets(rng, 8, 6 + trial % 7, trial % 2 == 0), trial % 2 == 0, 8);
    auto r = check_axioms(P, {1000, false});
    bool expected = oracle::k6_holds(P);
    CHECK(verdict_of(r, "K6") == (expected ? "holds" : "fails"));
    if (!expected) {
      CHECK(witness_confirms_failure(P, r.at("K6")));
      ++fails;
    } else {
      ++holds;
    }
    CHECK(r.at("K2").verdict == Verdict::Holds);
    CHECK(r.at("K5").verdict == Verdict::Holds);
    // K6 holding means every single complement is connected
    for (size_t o = 0; o < P.size() && expected; ++o) CHECK(complement_connected(P, static_cast<int>(o)));
  }
  CHECK(fails > 0);
  CHECK(holds > 0);
}

TEST_CASE("low dimension breaks K6, higher dimension keeps it") {
  auto cones = from_params(kCones);
  auto r = check_axioms(cones, {1000, false});
  CHECK(r.at("K6").verdict == Verdict::Fails);
  CHECK(witness_confirms_failure(cones, r.at("K6")));
  REQUIRE(r.at("K6").witness.size() == 3);
  auto o = cones.index_of(r.at("K6").witness[0]);
  std::vector<int> split;
  CHECK(!complement_connected(cones, o, &split));
  CHECK(split.size() == 2);

  auto grid = from_params(R"({"model":"SliceBall","dim":2,"box":[-2,2],"group":"dihedral","collar":"1",
      "layers":[{"cells":0,"radius":"0"},{"cells":1,"radius":"3/5"},{"cells":2,"radius":"6/5"}]})");
  auto g = check_axioms(grid, {1000, false});
  CHECK(g.at("K6").verdict == Verdict::HoldsRelative);
  for (const char* k : {"K1", "K2", "K3", "K4", "K5"}) CHECK(g.at(k).verdict != Verdict::Fails);
}

TEST_CASE("H1 of known spaces") {
  SUBCASE("circle") {
    auto P = from_params(kCircle);
    check_h1_against_order_complex(P);
    CHECK(h1(P).rank == 1);
    CHECK(h1(P).torsion.empty());
    auto pi = pi1_trivial(P, 0);
    CHECK(pi.verdict == Pi1Verdict::Nontrivial);
    REQUIRE(pi.loop.size() > 2);
    CHECK(pi.loop.front() == pi.loop.back());
    auto r = check_axioms(P);
    CHECK(r.at("K7").verdict == Verdict::Fails);
  }
  SUBCASE("sphere") {
    auto P = from_params(kSphere);
    check_h1_against_order_complex(P);
    CHECK(h1(P).rank == 0);
    CHECK(h1(P).torsion.empty());
    CHECK(pi1_trivial(P, 0).verdict == Pi1Verdict::Trivial);
  }
  SUBCASE("projective plane") {
    auto P = oracle::set_poset(oracle::faces_of(oracle::rp2_triangles()));
    check_h1_against_order_complex(P);
    CHECK(h1(P).rank == 0);
    CHECK(h1(P).torsion == std::vector<long>{2});
    CHECK(pi1_trivial(P, 0).verdict == Pi1Verdict::Nontrivial);
  }
  SUBCASE("torus") {
    auto P = oracle::set_poset(oracle::faces_of(oracle::torus_triangles()));
    check_h1_against_order_complex(P);
    CHECK(h1(P).rank == 2);
  }
  SUBCASE("cone point") {
    auto sets = oracle::faces_of(oracle::torus_triangles());
    sets.push_back({0, 1, 2, 3, 4, 5, 6});
    auto P = oracle::set_poset(sets);
    CHECK(h1(P).rank == 0);
    CHECK(pi1_trivial(P, 0).verdict == Pi1Verdict::Trivial);
  }
  SUBCASE("double cones in two dimensions") {
    check_h1_against_order_complex(from_params(kCones));
  }
}

TEST_CASE("H1 on random posets") {
  std::mt19937 rng(23);
  int tested = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto P = oracle::set_poset(oracle::random_sets(rng, 7, 12 + trial % 9, false));
    auto comps = h1_components(P);
    auto alt = h1_components_all_supports(P);
    REQUIRE(comps.size() == alt.size());
    for (size_t i = 0; i < comps.size(); ++i) CHECK(comps[i] == alt[i]);
    if (comps.size() != 1) {
      CHECK_THROWS_AS(h1(P), Error);
      continue;
    }
    check_h1_against_order_complex(P);
    ++tested;
  }
  CHECK(tested > 10);
}

TEST_CASE("invariants do not depend on element names") {
  std::mt19937 rng(41);
  auto base = oracle::set_poset(oracle::faces_of(oracle::rp2_triangles()));
  size_t n = base.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::string> ids(n);
  BitMatrix leq(n, std::vector<uint8_t>(n)), lt = leq, perp = leq;
  for (size_t i = 0; i < n; ++i) {
    ids[i] = "x" + std::to_string(1000 + perm[i]);
    for (size_t j = 0; j < n; ++j) {
      leq[i][j] = base.leq[i][j];
      lt[i][j] = base.lt[i][j];
      perp[i][j] = base.perp[i][j];
    }
  }
  auto P = make_poset(ids, leq, lt, perp);
  CHECK(h1(P) == h1(base));
  CHECK(pi1_trivial(P, 0).verdict == pi1_trivial(base, 0).verdict);
  auto a = check_axioms(P), b = check_axioms(base);
  for (const char* k : {"K1", "K2", "K3", "K4", "K5", "K6", "K7"}) CHECK(verdict_of(a, k) == verdict_of(b, k));
}

TEST_CASE("symmetry tables") {
  auto P = from_params(kCircle);
  size_t G = P.group_ids.size();
  REQUIRE(G == 12);
  for (size_t g = 0; g < G; ++g)
    for (size_t h = 0; h < G; ++h)
      for (size_t i = 0; i < P.size(); ++i) CHECK(P.action[P.mult[g][h]][i] == P.action[g][P.action[h][i]]);
  for (size_t g = 0; g < G; ++g) CHECK(P.mult[g][P.inverse[g]] == P.identity);
  CHECK_THROWS_AS(P.group_index("rot5/7"), Error);
}

TEST_CASE("serialization round trip") {
  auto P = from_params(kCircle);
  auto Q2 = poset_from_json(poset_to_json(P));
  CHECK(Q2.elements == P.elements);
  CHECK(Q2.leq == P.leq);
  CHECK(Q2.perp == P.perp);
  CHECK(Q2.action == P.action);
  CHECK(h1(Q2) == h1(P));
  json bad = poset_to_json(P);
  bad["leq"] = json::array();
  CHECK_THROWS_AS(poset_from_json(bad), Error);
  auto rep = report_to_json(check_axioms(P));
  CHECK(rep.is_object());
}
