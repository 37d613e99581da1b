// Acceptance gate: one PASS/FAIL line per criterion. argv[1] is the CLI binary.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "dense.hpp"
#include "sectorkit/error.hpp"
#include "sectorkit/scenario.hpp"

using namespace sectorkit;
namespace fs = std::filesystem;

namespace {

// limits, seconds
constexpr double kLimitK6 = 10, kLimitTopology = 30, kLimitCocycle = 60, kLimitLaws = 120, kLimitRoundTrip = 60,
                 kLimitCommutant = 120;
constexpr size_t kMaxElementsK6 = 300;
constexpr int kMaxQubits = 25, kMinHomotopy = 50, kMinPathCovariance = 50, kMinPathPairs = 10, kRandomAlgebras = 20, kOracleSites = 4;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void criterion(int k, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d %s: %s (%.1fs)%s\n", k, title.c_str(), o.pass ? "PASS" : "FAIL", seconds_since(t0),
              o.detail.str().c_str());
  std::fflush(stdout);
}

fs::path source_dir() { return fs::path(SECTORKIT_SOURCE_DIR); }

Scenario bundled(const std::string& name) {
  std::ifstream in(source_dir() / "scenarios" / (name + ".json"));
  return parse_scenario(json::parse(in));
}

std::shared_ptr<const IndexPoset> poset_of(const json& family) {
  return std::make_shared<const IndexPoset>(build_poset(sample_family(family)));
}

std::shared_ptr<const Net> net_of(const Scenario& sc) {
  return std::make_shared<const Net>(make_net(poset_of(sc.family), sc.model, sc.box_lo, sc.box_hi));
}

VerifyOptions sampling(const Scenario& sc) {
  VerifyOptions v;
  v.homotopy_pairs = std::max(sc.homotopy_pairs, kMinHomotopy);
  v.covariance_samples = std::max(sc.covariance_samples, kMinPathCovariance);
  v.seed = sc.seed;
  return v;
}

CovariantCocycle grid_boson(const std::shared_ptr<const Net>& net, const std::string& chi = "det") {
  return charge_pair(net, Charge::Boson, character(net->P(), chi));
}

// dense relative duality: commutant of the outside inside the global algebra
bool dense_duality(const Net& net, int o) {
  const IndexPoset& P = net.P();
  int n = net.nsites;
  Subspace gs = net.global_algebra().space;
  std::vector<dense::Mat> elems, outside;
  for (const auto& s : dense::all_strings(n))
    if (gs.contains(s)) elems.push_back(dense::expand(s, n));
  for (size_t a = 0; a < P.size(); ++a)
    if (P.perp[o][a])
      for (const auto& b : net.algebra(a).space.basis()) outside.push_back(dense::expand(b, n));
  return dense::commutant_dim(elems, outside) == (1L << net.algebra(o).space.dim());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& cmd) {
  int st = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <sectorkit binary>\n");
    return 2;
  }
  const std::string cli = argv[1];

  criterion(1, "K6 in low and high dimension", [](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto plane = poset_of(json::parse(R"({"model":"ApexDoubleCone","dim":1,"box":[-3,3],"collar":"1",
        "layers":[{"cells":0,"radius":"1/5"},{"cells":1,"radius":"3/5"},{"cells":0,"radius":"6/5"}]})"));
    AxiomBudget b;
    b.check_k7 = false;
    AxiomReport low = check_axioms(*plane, b);
    const AxiomResult& k6 = low.at("K6");
    o.detail << " 2D double cones: " << plane->size() << " elements, K6 " << to_string(k6.verdict);
    o.require(plane->size() <= kMaxElementsK6, "2D sample size");
    o.require(k6.verdict == Verdict::Fails, "K6 fails in 2D");
    o.require(witness_confirms_failure(*plane, k6), "2D witness confirms");
    double t_low = seconds_since(t0);

    auto t1 = std::chrono::steady_clock::now();
    auto slice = poset_of(json::parse(R"({"model":"SliceBall","dim":3,"box":[-2,2],"group":"hyperoctahedral",
        "collar":"1","layers":[{"cells":0,"radius":"0"},{"cells":3,"radius":"9/10"}]})"));
    AxiomReport high = check_axioms(*slice, b);
    Verdict v = high.at("K6").verdict;
    o.detail << "; 3D slice: " << slice->size() << " elements, K6 " << to_string(v);
    o.require(slice->size() <= kMaxElementsK6, "3D sample size");
    o.require(v == Verdict::Holds || v == Verdict::HoldsRelative, "K6 holds in 3D");
    double t_high = seconds_since(t1);
    o.require(t_low <= kLimitK6 && t_high <= kLimitK6, "time limit");
  });

  criterion(2, "circle and sphere invariants", [](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto circle = poset_of(bundled("arc-circle").family);
    H1Invariants hc = h1(*circle);
    o.detail << " circle: H1 rank " << hc.rank << ", torsion " << hc.torsion.size();
    o.require(h1_components(*circle).size() == 1, "circle connected");
    o.require(hc.rank == 1 && hc.torsion.empty(), "circle H1 = Z");
    auto sphere = poset_of(bundled("cap-sphere").family);
    H1Invariants hs = h1(*sphere);
    Pi1Result pi = pi1_trivial(*sphere, 0);
    o.detail << "; sphere: H1 rank " << hs.rank << ", torsion " << hs.torsion.size() << ", pi1 " << to_string(pi.verdict);
    o.require(hs.rank == 0 && hs.torsion.empty(), "sphere H1 = 0");
    o.require(pi.verdict == Pi1Verdict::Trivial, "sphere pi1 trivial");
    o.require(seconds_since(t0) <= kLimitTopology, "time limit");
  });

  Scenario grid = bundled("grid-boson");
  std::shared_ptr<const Net> gnet;

  criterion(3, "cocycle identity on the grid", [&](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    gnet = net_of(grid);
    o.detail << " " << gnet->nsites << " qubits, " << gnet->P().size() << " elements, "
             << gnet->P().group_ids.size() << " symmetries";
    o.require(gnet->nsites <= kMaxQubits, "qubit count");
    int characters = 0;
    for (const char* chi : {"det", "perm"}) {
      CocycleReport r = verify_cocycle(grid_boson(gnet, chi), sampling(grid));
      ++characters;
      for (const char* c : {"values", "cocycle_identity", "degenerate", "well_defined"})
        o.require(r.at(c).holds && r.at(c).instances > 0, std::string(chi) + " " + c);
      o.require(r.at("homotopy").holds && r.at("homotopy").instances >= kMinHomotopy, std::string(chi) + " homotopy");
      o.require(r.at("path_covariance").holds && r.at("path_covariance").instances >= kMinPathCovariance, std::string(chi) + " path_covariance");
      o.detail << "; " << chi << ": identity on " << r.at("cocycle_identity").instances << ", homotopy "
               << r.at("homotopy").instances << ", path covariance " << r.at("path_covariance").instances;
    }
    o.require(characters >= 2, "two characters");
    o.require(seconds_since(t0) <= kLimitCocycle, "time limit");
  });

  criterion(4, "statistics", [&](Outcome& o) {
    if (!gnet) gnet = net_of(grid);
    StatisticsOptions so;
    so.path_pairs = kMinPathPairs;
    StatisticsReport st = statistics(grid_boson(gnet), so);
    o.detail << " boson: simple " << st.simple << ", chi " << st.chi.value_or(0) << ", d " << st.dimension.value_or(0)
             << ", " << st.samples << " samples";
    o.require(st.simple && st.chi == 1 && st.dimension == 1 && !st.path_dependent, "boson (+1, 1)");
    o.require(st.samples >= kMinPathPairs, "boson path pairs");

    Scenario chain = bundled("chain-fermion");
    auto cnet = net_of(chain);
    const IndexPoset& P = cnet->P();
    CovariantCocycle F = charge_pair(cnet, Charge::Fermion, character(P, "trivial"));
    AxiomBudget b;
    b.check_k7 = false;
    bool k6_fails = check_axioms(P, b).at("K6").verdict == Verdict::Fails;
    StatisticsReport sf = statistics(F, so);
    // ε for the partner on either side, both path orders
    auto x = [&](int e) { return std::get<SliceBall>(P.regions[e].shape).center.coords.back(); };
    int left = 0, right = 0, bad = 0;
    const PauliElement minus(GaussQ(-1));
    for (size_t a = 0; a < P.size(); ++a)
      for (const auto& pq : epsilon_paths(P, static_cast<int>(a), kMinPathPairs)) {
        for (const PathPair& c : {pq, PathPair{pq.q, pq.p}}) {
          (x(c.p.end) < x(c.q.end) ? left : right)++;
          if (epsilon(F, F, static_cast<int>(a), c) != minus) ++bad;
        }
      }
    o.detail << "; fermion: chi " << sf.chi.value_or(0) << ", p left of q " << left << ", right " << right
             << ", off values " << bad << ", annotated " << sf.annotated << ", K6 fails " << k6_fails;
    o.require(sf.chi == -1 && bad == 0 && left > 0 && right > 0, "fermion ε = -1 both sides");
    o.require(sf.annotated && k6_fails, "annotated with K6 failing");
  });

  criterion(5, "conjugation", [&](Outcome& o) {
    if (!gnet) gnet = net_of(grid);
    CovariantCocycle X = grid_boson(gnet);
    CovariantCocycle Xb = conjugate(X);
    CocycleReport vb = verify_cocycle(Xb, sampling(grid));
    CovariantCocycle I = identity_cocycle(gnet);
    bool left = same_values(tensor(X, Xb), I), right = same_values(tensor(Xb, X), I);
    Intertwiner r = constant_arrow(I, tensor(Xb, X), GaussQ(1)), rbar = constant_arrow(I, tensor(X, Xb), GaussQ(1));
    CheckResult eqs = check_conjugate_equations(X, Xb, r, rbar);
    IntertwinerSpace xx = intertwiner_space(X, X);
    o.detail << " conjugate cocycle " << (vb.ok() ? "holds" : "fails") << ", X⊗X̄ = I " << left << ", X̄⊗X = I "
             << right << ", equations " << eqs.holds << ", dim (X,X) " << xx.dim;
    o.require(vb.ok(), "conjugate is a cocycle");
    o.require(left && right, "products are the identity");
    o.require(eqs.holds, "conjugate equations with r = r̄ = 1");
    o.require(xx.computed && xx.dim == 1, "(X,X) scalar");
  });

  criterion(6, "morphism laws", [&](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    if (!gnet) gnet = net_of(grid);
    MorphismReport r = check_morphism_laws(grid_boson(gnet));
    for (const auto& c : r.checks) {
      o.detail << " " << c.check << " " << c.instances;
      o.require(c.holds && c.instances > 0, c.check);
    }
    o.require(r.checks.size() == 9, "all laws checked");
    o.require(seconds_since(t0) <= kLimitLaws, "time limit");
  });

  criterion(7, "functor round trips", [&](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    if (!gnet) gnet = net_of(grid);
    const IndexPoset& P = gnet->P();
    CovariantCocycle X = grid_boson(gnet);
    RoundTrip rt = functor_roundtrip(X, P.index_of(grid.pole), P.index_of(grid.other_pole));
    o.detail << " pole " << P.elements[rt.pole] << " -> " << P.elements[rt.other_pole] << ", exact " << rt.exact;
    o.require(rt.verify.ok(), "round trip is a cocycle");
    o.require(rt.to_input.found && verify_intertwiner(*rt.to_input.arrow).holds && is_unitary(*rt.to_input.arrow),
              "unitary arrow to the input");
    o.require(rt.between_poles.found && verify_intertwiner(*rt.between_poles.arrow).holds &&
                  is_unitary(*rt.between_poles.arrow),
              "unitary arrow between poles");
    if (rt.to_input.found) o.detail << ", equivalence via " << rt.to_input.candidate;
    if (rt.between_poles.found) o.detail << ", pole change via " << rt.between_poles.candidate;
    o.require(rt.ok(), "round trip verdict");
    o.require(seconds_since(t0) <= kLimitRoundTrip, "time limit");
  });

  criterion(8, "commutants against dense matrices", [](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> bit(0, 1);
    int agree = 0;
    for (int trial = 0; trial < kRandomAlgebras; ++trial) {
      int n = 1 + trial % kOracleSites;
      std::vector<PauliString> gens;
      for (int k = 0; k < 1 + trial % 3; ++k) {
        PauliString s;
        for (int j = 0; j < n; ++j) {
          s.set_x(j, bit(rng));
          s.set_z(j, bit(rng));
        }
        gens.push_back(s);
      }
      std::vector<int> sites(n);
      for (int j = 0; j < n; ++j) sites[j] = j;
      NetAlgebra all = generated_algebra(n, dense::all_strings(n), sites);
      NetAlgebra C = commutant(generated_algebra(n, gens, sites), all);
      std::vector<dense::Mat> G;
      for (const auto& g : gens) G.push_back(dense::expand(g, n));
      if (dense::commutant_dim(dense::matrix_units(n), G) == (1L << C.space.dim())) ++agree;
    }
    o.detail << " " << agree << "/" << kRandomAlgebras << " commutants agree";
    o.require(agree == kRandomAlgebras, "commutant dimensions");

    auto P = poset_of(json::parse(R"({"model":"SliceBall","dim":1,"box":[0,3],
        "layers":[{"cells":0,"radius":"0"},{"cells":1,"radius":"3/5"},{"cells":2,"radius":"6/5"}]})"));
    int verdicts = 0, same = 0;
    for (auto model : {NetModel::Full, NetModel::EvenZ2, NetModel::EvenFermion}) {
      Net net = make_net(P, model, 0, 3);
      for (size_t e = 0; e < P->size(); ++e) {
        ++verdicts;
        if (relative_duality_holds(net, static_cast<int>(e)) == dense_duality(net, static_cast<int>(e))) ++same;
      }
    }
    o.detail << "; duality verdicts " << same << "/" << verdicts;
    o.require(same == verdicts, "duality verdicts");
    o.require(seconds_since(t0) <= kLimitCommutant, "time limit");
  });

  criterion(9, "deterministic reports", [&](Outcome& o) {
    fs::path tmp = fs::temp_directory_path() / ("sectorkit-acceptance-" + std::to_string(::getpid()));
    int same = 0, total = 0;
    for (const auto& entry : fs::directory_iterator(source_dir() / "scenarios")) {
      if (entry.path().extension() != ".json") continue;
      std::string name = entry.path().stem().string();
      ++total;
      std::string bytes[2];
      for (int k = 0; k < 2; ++k) {
        fs::path out = tmp / name / std::to_string(k);
        int rc = run(cli + " all --config " + entry.path().string() + " --out " + out.string());
        o.require(rc == 0, name + " exit code " + std::to_string(rc));
        bytes[k] = slurp(out / "report.json");
      }
      if (!bytes[0].empty() && bytes[0] == bytes[1]) ++same;
      else o.require(false, name + " differs");
    }
    fs::remove_all(tmp);
    o.detail << " " << same << "/" << total << " scenarios byte-identical";
    o.require(total > 0, "scenarios found");
  });

  std::printf("%s: %d criteria failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
