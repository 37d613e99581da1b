#include <random>

#include "doctest.h"
#include "sectorkit/cocycle.hpp"
#include "sectorkit/error.hpp"

using namespace sectorkit;

namespace {

std::shared_ptr<const Net> grid_net(NetModel model = NetModel::EvenZ2) {
  static std::shared_ptr<const IndexPoset> P = std::make_shared<IndexPoset>(build_poset(sample_family(json::parse(
      R"({"model":"SliceBall","dim":2,"box":[-1,1],"group":"dihedral",
          "layers":[{"cells":0,"radius":"0"},{"cells":1,"radius":"3/5"},{"cells":2,"radius":"6/5"}]})"))));
  return std::make_shared<Net>(make_net(P, model, -1, 1));
}

std::shared_ptr<const Net> chain_net() {
  auto P = std::make_shared<IndexPoset>(build_poset(sample_family(json::parse(
      R"({"model":"SliceBall","dim":1,"box":[-3,3],"collar":"1",
          "layers":[{"cells":0,"radius":"0"},{"cells":1,"radius":"3/5"}]})"))));
  return std::make_shared<Net>(make_net(P, NetModel::EvenFermion, -3, 3));
}

VerifyOptions quick() {
  VerifyOptions o;
  o.homotopy_pairs = 20;
  o.covariance_samples = 20;
  o.seed = 5;
  return o;
}

// X_b(λ) = χ(λ) F_{s(∂0b)} F_{s(∂1b)}, written out without the library formula
PauliElement expected_value(const std::vector<int>& site, const std::vector<int>& chi, Charge c,
                            const Simplex& b, int g) {
  return PauliElement(GaussQ(chi[g])) * charged_string(c, site[b.d0()]) *
         charged_string(c, site[b.d1()]);
}

}  // namespace

TEST_CASE("characters are homomorphisms") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  for (const char* name : {"trivial", "det", "perm", "det*perm"}) {
    auto chi = character(P, name);
    REQUIRE(chi.size() == P.group_ids.size());
    for (size_t g = 0; g < chi.size(); ++g) {
      CHECK((chi[g] == 1 || chi[g] == -1));
      for (size_t h = 0; h < chi.size(); ++h) CHECK(chi[P.mult[g][h]] == chi[g] * chi[h]);
    }
  }
  // det of a signed permutation: product of signs times parity
  auto det = character(P, "det");
  for (size_t g = 0; g < P.symmetries.size(); ++g) {
    const auto& s = P.symmetries[g];
    int v = s.perm[0] == 0 ? 1 : -1;
    for (int x : s.signs) v *= x;
    CHECK(det[g] == v);
  }
  CHECK_THROWS_AS(character(P, "sign"), Error);
}

TEST_CASE("site assignment is equivariant") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  auto s = site_assignment(*net);
  for (size_t o = 0; o < P.size(); ++o) {
    CHECK(std::count(net->site_map[o].begin(), net->site_map[o].end(), s[o]) == 1);
    for (size_t g = 0; g < P.group_ids.size(); ++g) CHECK(s[P.action[g][o]] == net->rep[g][s[o]]);
  }
}

TEST_CASE("charge pairs are cocycles") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  auto site = site_assignment(*net);
  for (const char* name : {"trivial", "det", "perm", "det*perm"}) {
    CAPTURE(std::string(name));
    auto chi = character(P, name);
    auto X = charge_pair(net, Charge::Boson, chi);
    auto rep = verify_cocycle(X, quick());
    CHECK(rep.ok());
    for (const char* c : {"values", "cocycle_identity", "degenerate", "homotopy", "path_covariance"}) {
      CHECK(rep.at(c).holds);
      CHECK(rep.at(c).instances > 0);
    }
    CHECK(rep.at("homotopy").instances >= 20);
    for (const auto& b : canonical_edges(P))
      for (size_t g = 0; g < P.group_ids.size(); ++g)
        CHECK(X.value(b, static_cast<int>(g)) == expected_value(site, chi, Charge::Boson, b, static_cast<int>(g)));
  }
  // the identity at λ = e, written out directly
  auto X = charge_pair(net, Charge::Boson, character(P, "det"));
  std::mt19937 rng(3);
  auto tri = canonical_triangles(P);
  std::uniform_int_distribution<size_t> pick(0, tri.size() - 1);
  for (int it = 0; it < 200; ++it) {
    const Simplex& c = tri[pick(rng)];
    CHECK(X.value(face(c, 0)) * X.value(face(c, 2)) == X.value(face(c, 1)));
  }
  for (size_t o = 0; o < P.size(); ++o) CHECK(X.object_value(static_cast<int>(o), P.identity) == PauliElement(GaussQ(1)));
}

TEST_CASE("fault injection is caught with a witness") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  auto X = charge_pair(net, Charge::Boson, character(P, "trivial"));
  auto edges = canonical_edges(P);
  Simplex b;
  for (const auto& e : edges)
    if (!e.degenerate_edge()) {
      b = e;
      break;
    }
  SUBCASE("non-unitary value") {
    auto Y = X.with_value(P.identity, b, X.value(b) * GaussQ(2));
    auto r = verify_cocycle(Y, quick());
    CHECK(!r.ok());
    CHECK(!r.at("values").holds);
    CHECK(!r.at("values").witness.is_null());
  }
  SUBCASE("sign flip") {
    auto Y = X.with_value(P.identity, b, X.value(b) * GaussQ(-1));
    auto r = verify_cocycle(Y, quick());
    CHECK(!r.ok());
    CHECK(!r.at("cocycle_identity").holds);
    CHECK(r.at("cocycle_identity").witness.is_object());
  }
  SUBCASE("value outside the support") {
    PauliElement far(PauliString::Z(net->nsites - 1) ^ PauliString::Z(0));
    auto Y = X.with_value(P.identity, b, far);
    CHECK(!verify_cocycle(Y, quick()).ok());
  }
}

TEST_CASE("bosonic statistics and conjugates") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  auto X = charge_pair(net, Charge::Boson, character(P, "det"));
  StatisticsOptions so;
  so.elements = 6;
  auto s = statistics(X, so);
  CHECK(s.simple);
  REQUIRE(s.chi);
  CHECK(*s.chi == 1);
  REQUIRE(s.dimension);
  CHECK(*s.dimension == 1);
  CHECK(!s.path_dependent);
  CHECK(s.samples >= 10);
  CHECK(s.irreducible);

  auto Xbar = conjugate(X, so);
  CHECK(verify_cocycle(Xbar, quick()).ok());
  auto I = identity_cocycle(net);
  CHECK(same_values(tensor(X, Xbar), I));
  CHECK(same_values(tensor(Xbar, X), I));
  auto r = constant_arrow(I, tensor(Xbar, X), GaussQ(1));
  auto rbar = constant_arrow(I, tensor(X, Xbar), GaussQ(1));
  CHECK(verify_intertwiner(r).holds);
  CHECK(check_conjugate_equations(X, Xbar, r, rbar).holds);
  auto space = intertwiner_space(X, X);
  REQUIRE(space.computed);
  CHECK(space.dim == 1);

  // trivial object
  auto si = statistics(I, so);
  CHECK(si.simple);
  CHECK(*si.chi == 1);
  CHECK(*si.dimension == 1);
  CHECK(same_values(conjugate(I, so), I));
}

TEST_CASE("permutation symmetry of ε") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  auto X = charge_pair(net, Charge::Boson, character(P, "det"));
  auto Y = charge_pair(net, Charge::Boson, character(P, "perm"));
  for (int a = 0; a < static_cast<int>(P.size()); a += 5) {
    auto pairs = epsilon_paths(P, a, 3);
    REQUIRE(!pairs.empty());
    for (const auto& pq : pairs) {
      PathPair qp{pq.q, pq.p};
      CHECK(epsilon(Y, X, a, qp) * epsilon(X, Y, a, pq) == PauliElement(GaussQ(1)));
      CHECK(epsilon(X, X, a, pq) == PauliElement(GaussQ(1)));
    }
  }
  auto e = epsilon_arrow(X, Y);
  CHECK(verify_intertwiner(e).holds);
  CHECK(is_unitary(e));
}

TEST_CASE("tensor products") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  auto X = charge_pair(net, Charge::Boson, character(P, "det"));
  auto Y = charge_pair(net, Charge::Boson, character(P, "perm"));
  auto I = identity_cocycle(net);
  auto XY = tensor(X, Y);
  CHECK(verify_cocycle(XY, quick()).ok());
  CHECK(same_values(tensor(X, I), X));
  CHECK(same_values(tensor(I, X), X));
  CHECK(same_values(tensor(tensor(X, Y), X), tensor(X, tensor(Y, X))));
  auto t = tensor_arrows(identity_arrow(X), identity_arrow(Y));
  CHECK(verify_intertwiner(t).holds);
  auto other = grid_net();
  CHECK_THROWS_AS(tensor(X, charge_pair(other, Charge::Boson, character(P, "det"))), Error);
}

TEST_CASE("arrows") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  auto X = charge_pair(net, Charge::Boson, character(P, "det"));
  auto id = identity_arrow(X);
  CHECK(verify_intertwiner(id).holds);
  CHECK(is_unitary(id));
  auto i = constant_arrow(X, X, GaussQ::i_pow(1));
  CHECK(verify_intertwiner(i).holds);
  auto c = compose(i, adjoint(i));
  for (const auto& v : c.value) CHECK(v == PauliElement(GaussQ(1)));
  auto Y = charge_pair(net, Charge::Boson, character(P, "perm"));
  CHECK(!verify_intertwiner(constant_arrow(X, Y, GaussQ(1))).holds);
  CHECK_THROWS_AS(compose(constant_arrow(X, Y, GaussQ(1)), constant_arrow(X, Y, GaussQ(1))), Error);
  auto space = intertwiner_space(X, Y);
  REQUIRE(space.computed);
  for (const auto& t : space.basis) CHECK(verify_intertwiner(t).holds);
}

TEST_CASE("subobjects and direct sums need isometries") {
  auto net = grid_net();
  const IndexPoset& P = net->P();
  auto X = charge_pair(net, Charge::Boson, character(P, "trivial"));
  auto sub = subobject(X, identity_arrow(X), {});
  CHECK(verify_cocycle(sub.Y, quick()).ok());
  CHECK(verify_intertwiner(sub.w).holds);
  CHECK(is_unitary(sub.w));

  auto zero = constant_arrow(X, X, GaussQ(0));
  CHECK_THROWS_AS(subobject(X, zero, {}), Error);
  // a proper projection has no isometry onto it in finite dimensions
  std::map<int, std::pair<PauliElement, PauliElement>> w;
  PauliElement one(GaussQ(1));
  for (size_t a = 0; a < P.size(); ++a) {
    int k = net->algebra(static_cast<int>(a)).sites[0];
    PauliElement e = (one + PauliElement(PauliString::X(k))) * GaussQ(Q(1, 2));
    w[static_cast<int>(a)] = {e, one - e};
  }
  try {
    direct_sum(X, X, w);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::WitnessInvalid);
  }
  try {
    direct_sum(X, X, {});
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::BorchersUnavailable);
  }
}

TEST_CASE("fermionic chain") {
  auto net = chain_net();
  const IndexPoset& P = net->P();
  auto F = charge_pair(net, Charge::Fermion, character(P, "trivial"));
  CHECK(verify_cocycle(F, quick()).ok());
  auto s = statistics(F);
  CHECK(s.simple);
  REQUIRE(s.chi);
  CHECK(*s.chi == -1);
  CHECK(s.annotated);
  CHECK(!s.path_dependent);
  CHECK(!s.note.empty());
  // both lateral choices of the target pair
  int a = static_cast<int>(P.size()) / 2;
  auto pairs = epsilon_paths(P, a, 40);
  bool left_right = false, right_left = false;
  for (const auto& pq : pairs) {
    CHECK(epsilon(F, F, a, pq) == PauliElement(GaussQ(-1)));
    int l = pq.p.end, r = pq.q.end;
    auto centre = [&](int o) { return net->site_coords[site_assignment(*net)[o]][0]; };
    if (centre(l) < centre(r)) left_right = true;
    if (centre(l) > centre(r)) right_left = true;
  }
  CHECK(left_right);
  CHECK(right_left);
}

TEST_CASE("a central qubit makes ε non-scalar") {
  auto base = chain_net();
  auto P = base->poset;
  int g = base->nsites;
  std::vector<std::vector<int>> sites = base->site_map;
  std::vector<std::vector<PauliString>> gens(P->size());
  for (size_t o = 0; o < P->size(); ++o) {
    sites[o].push_back(g);
    gens[o] = base->algebra(static_cast<int>(o)).space.basis();
    gens[o].push_back(PauliString::Z(g));
  }
  auto net = std::make_shared<Net>(make_net(P, NetModel::Synthetic, g + 1, sites, {}, gens));
  auto s = site_assignment(*base);
  PauliElement one(GaussQ(1)), Zg(PauliString::Z(g));
  PauliElement P0 = (one + Zg) * GaussQ(Q(1, 2)), P1 = (one - Zg) * GaussQ(Q(1, 2));
  CovariantCocycle X(net,
                     [=](const Simplex& b, int) {
                       return P0 + P1 * charged_string(Charge::Fermion, s[b.d0()]) *
                                       charged_string(Charge::Fermion, s[b.d1()]);
                     },
                     json{{"kind", "synthetic"}});
  CHECK(verify_cocycle(X, quick()).ok());
  auto st = statistics(X);
  CHECK(!st.simple);
  CHECK(!st.chi);
  try {
    conjugate(X);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::NotSimple);
  }
  int a = static_cast<int>(P->size()) / 2;
  PauliElement eps = epsilon(X, X, a);
  CHECK(!eps.is_scalar());
  CHECK((eps == Zg || eps == Zg * GaussQ(-1)));
}

TEST_CASE("serialization round trips") {
  SUBCASE("grid") {
    auto net = grid_net();
    auto X = charge_pair(net, Charge::Boson, character(net->P(), "det"));
    auto Y = cocycle_from_json(net, cocycle_to_json(X));
    CHECK(same_values(X, Y));
  }
  SUBCASE("circle, whose group ids contain a slash") {
    auto P = std::make_shared<IndexPoset>(build_poset(sample_family(json::parse(
        R"({"model":"DirectionCap","chart":"circle","group":"rotations",
            "layers":[{"n":12,"radius_pi":"1/24"},{"n":12,"offset":"1/24","radius_pi":"1/6"}]})"))));
    // one site per small arc, large arcs hold the two small arcs inside them
    std::vector<int> small;
    for (size_t o = 0; o < P->size(); ++o)
      if (P->elements[o].find("1/48") != std::string::npos) small.push_back(static_cast<int>(o));
    REQUIRE(small.size() == 12);
    std::vector<std::vector<int>> site_map(P->size());
    for (size_t o = 0; o < P->size(); ++o)
      for (int k = 0; k < 12; ++k)
        if (P->leq[small[k]][o]) site_map[o].push_back(k);
    std::vector<std::vector<int>> rep(P->group_ids.size(), std::vector<int>(12));
    for (size_t g = 0; g < rep.size(); ++g)
      for (int k = 0; k < 12; ++k)
        rep[g][k] = static_cast<int>(std::find(small.begin(), small.end(), P->action[g][small[k]]) - small.begin());
    auto net = std::make_shared<Net>(make_net(P, NetModel::Full, 12, site_map, rep));
    CHECK(P->group_ids[1].find('/') != std::string::npos);
    auto X = charge_pair(net, Charge::Boson, character(*P, "trivial"));
    CHECK(verify_cocycle(X, quick()).ok());
    auto Y = cocycle_from_json(net, cocycle_to_json(X));
    CHECK(same_values(X, Y));
    json broken = cocycle_to_json(X);
    broken["values"] = json::object({{"nope/x|y|z", "( 1/1 + 0/1 i ) I"}});
    CHECK_THROWS_AS(cocycle_from_json(net, broken), Error);
  }
}
