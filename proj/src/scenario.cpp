#include "sectorkit/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "sectorkit/error.hpp"

namespace sectorkit {

const char* to_string(Subcommand s) {
  switch (s) {
    case Subcommand::PosetCheck: return "poset-check";
    case Subcommand::NetCheck: return "net-check";
    case Subcommand::CocycleVerify: return "cocycle-verify";
    case Subcommand::Statistics: return "statistics";
    case Subcommand::FunctorRoundtrip: return "functor-roundtrip";
    case Subcommand::All: return "all";
  }
  return "?";
}

Subcommand parse_subcommand(const std::string& s) {
  for (auto c : {Subcommand::PosetCheck, Subcommand::NetCheck, Subcommand::CocycleVerify, Subcommand::Statistics,
                 Subcommand::FunctorRoundtrip, Subcommand::All})
    if (s == to_string(c)) return c;
  throw Error(ErrorKind::ConfigInvalid, "unknown subcommand '" + s + "'");
}

// ---- config ------------------------------------------------------------------------

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::ConfigInvalid, (path.empty() ? "/" : path) + ": " + msg);
}

// message without the "Kind: " prefix, for re-raising under a schema path
std::string bare(const Error& e) {
  std::string w = e.what(), k = std::string(to_string(e.kind)) + ": ";
  return w.rfind(k, 0) == 0 ? w.substr(k.size()) : w;
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) invalid(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* x : keys) known = known || k == x;
    if (!known) invalid(path + "/" + k, "unknown key");
  }
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) invalid(path + "/" + key, "required");
  return j.at(key);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) invalid(path, "expected a string");
  return j.get<std::string>();
}

long get_int(const json& j, const std::string& path, long lo = 0) {
  if (!j.is_number_integer()) invalid(path, "expected an integer");
  long v = j.get<long>();
  if (v < lo) invalid(path, "must be at least " + std::to_string(lo));
  return v;
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) invalid(path, "expected true or false");
  return j.get<bool>();
}

}  // namespace

Scenario parse_scenario(const json& c) {
  only_keys(c, "", {"name", "description", "seed", "family", "net", "cocycles", "samples", "budgets", "roundtrip",
                    "morphism_laws", "conclusive", "expect"});
  Scenario sc;
  sc.name = get_string(need(c, "name", ""), "/name");
  if (!need(c, "seed", "").is_number_unsigned()) invalid("/seed", "expected a non-negative integer");
  sc.seed = c.at("seed").get<uint64_t>();
  sc.family = need(c, "family", "");
  if (!sc.family.is_object()) invalid("/family", "expected an object");

  if (c.contains("net")) {
    const json& n = c.at("net");
    only_keys(n, "/net", {"model", "box"});
    try {
      sc.model = parse_net_model(get_string(need(n, "model", "/net"), "/net/model"));
    } catch (const Error& e) {
      if (e.kind != ErrorKind::ConfigInvalid) throw;
      invalid("/net/model", bare(e));
    }
    const json* box = n.contains("box") ? &n.at("box") : (sc.family.contains("box") ? &sc.family.at("box") : nullptr);
    std::string bpath = n.contains("box") ? "/net/box" : "/family/box";
    if (!box) invalid("/net/box", "required when the family has no box");
    if (!box->is_array() || box->size() != 2) invalid(bpath, "expected [lo, hi]");
    sc.box_lo = get_int((*box)[0], bpath + "/0", -1000000);
    sc.box_hi = get_int((*box)[1], bpath + "/1", sc.box_lo);
    sc.has_net = true;
  }

  if (c.contains("cocycles")) {
    const json& a = c.at("cocycles");
    if (!a.is_array()) invalid("/cocycles", "expected an array");
    std::set<std::string> names;
    for (size_t i = 0; i < a.size(); ++i) {
      std::string p = "/cocycles/" + std::to_string(i);
      only_keys(a[i], p, {"name", "charge", "character"});
      CocycleSpec s;
      s.name = get_string(need(a[i], "name", p), p + "/name");
      if (!names.insert(s.name).second) invalid(p + "/name", "duplicate name");
      std::string ch = get_string(need(a[i], "charge", p), p + "/charge");
      if (ch == "boson")
        s.charge = Charge::Boson;
      else if (ch == "fermion")
        s.charge = Charge::Fermion;
      else
        invalid(p + "/charge", "expected boson or fermion");
      if (a[i].contains("character")) s.character = get_string(a[i].at("character"), p + "/character");
      sc.cocycles.push_back(s);
    }
    if (!sc.cocycles.empty() && !sc.has_net) invalid("/net", "cocycles need a net");
  }

  if (c.contains("samples")) {
    const json& s = c.at("samples");
    only_keys(s, "/samples", {"homotopy_pairs", "path_covariance", "path_pairs", "probe_pairs"});
    if (s.contains("homotopy_pairs")) sc.homotopy_pairs = static_cast<int>(get_int(s["homotopy_pairs"], "/samples/homotopy_pairs"));
    if (s.contains("path_covariance")) sc.covariance_samples = static_cast<int>(get_int(s["path_covariance"], "/samples/path_covariance"));
    if (s.contains("path_pairs")) sc.path_pairs = static_cast<int>(get_int(s["path_pairs"], "/samples/path_pairs", 1));
    if (s.contains("probe_pairs")) sc.probe_pairs = static_cast<int>(get_int(s["probe_pairs"], "/samples/probe_pairs"));
  }
  if (c.contains("budgets")) {
    const json& b = c.at("budgets");
    only_keys(b, "/budgets", {"homotopy", "cosets"});
    if (b.contains("homotopy")) sc.budget_homotopy = get_int(b["homotopy"], "/budgets/homotopy", 1);
    if (b.contains("cosets")) sc.budget_cosets = get_int(b["cosets"], "/budgets/cosets", 1);
  }
  if (c.contains("roundtrip")) {
    const json& r = c.at("roundtrip");
    only_keys(r, "/roundtrip", {"pole", "other_pole"});
    if (r.contains("pole")) sc.pole = get_string(r["pole"], "/roundtrip/pole");
    if (r.contains("other_pole")) sc.other_pole = get_string(r["other_pole"], "/roundtrip/other_pole");
  }
  if (c.contains("morphism_laws")) sc.morphism_laws = get_bool(c["morphism_laws"], "/morphism_laws");
  if (c.contains("conclusive")) sc.conclusive = get_bool(c["conclusive"], "/conclusive");
  if (c.contains("expect")) {
    sc.expect = c.at("expect");
    only_keys(sc.expect, "/expect",
              {"axioms", "components", "h1_rank", "h1_torsion", "pi1", "net", "cocycles", "statistics", "conjugation",
               "roundtrip", "morphism_laws"});
    if (sc.expect.contains("axioms")) {
      only_keys(sc.expect["axioms"], "/expect/axioms", {"K1", "K2", "K3", "K4", "K5", "K6", "K7"});
      for (const auto& [k, v] : sc.expect["axioms"].items()) {
        std::string s = get_string(v, "/expect/axioms/" + k);
        if (s != "holds" && s != "fails" && s != "holds-relative-to-sample" && s != "unknown")
          invalid("/expect/axioms/" + k, "unknown verdict '" + s + "'");
      }
    }
    for (const char* k : {"cocycles", "statistics", "conjugation", "roundtrip", "morphism_laws"}) {
      if (!sc.expect.contains(k)) continue;
      if (!sc.expect[k].is_object()) invalid(std::string("/expect/") + k, "expected an object keyed by cocycle name");
    }
  }
  return sc;
}

// ---- running -------------------------------------------------------------------------

namespace {

struct Expectations {
  json entries = json::array();
  bool mismatch = false;

  void add(const std::string& key, const json& expected, const json& observed, bool match) {
    entries.push_back({{"key", key}, {"expected", expected}, {"observed", observed}, {"match", match}});
    mismatch = mismatch || !match;
  }
};

std::string verdict_word(bool holds) { return holds ? "holds" : "fails"; }

json homotopy_probe(const IndexPoset& P, uint64_t seed, int pairs, long cap, long* unresolved) {
  json out = {{"pairs", 0}, {"homotopic", 0}, {"unresolved", 0}};
  const int n = static_cast<int>(P.size());
  if (n < 2 || pairs <= 0) return out;
  std::mt19937_64 rng(seed);
  long tried = 0, found = 0, open = 0;
  for (int k = 0; k < 4 * pairs && tried < pairs; ++k) {
    int a = static_cast<int>(rng() % n), m = static_cast<int>(rng() % n), o = static_cast<int>(rng() % n);
    Path p, q;
    try {
      p = canonical_path(P, a, o);
      q = compose(canonical_path(P, m, o), canonical_path(P, a, m));
    } catch (const Error&) {
      continue;
    }
    if (p == q) continue;
    ++tried;
    if (homotopic(p, q, P, cap).found)
      ++found;
    else
      ++open;
  }
  *unresolved += open;
  out = {{"pairs", tried}, {"homotopic", found}, {"unresolved", open}};
  return out;
}

}  // namespace

RunResult run_scenario(const Scenario& sc, Subcommand cmd, const RunOptions& opt) {
  const long budget_h = opt.budget_homotopy > 0 ? opt.budget_homotopy : sc.budget_homotopy;
  const long budget_c = opt.budget_cosets > 0 ? opt.budget_cosets : sc.budget_cosets;
  const bool all = cmd == Subcommand::All;
  const int rank = static_cast<int>(cmd);
  const bool want_net = all || (rank >= static_cast<int>(Subcommand::NetCheck));
  const bool want_cocycles = all || rank >= static_cast<int>(Subcommand::CocycleVerify);
  const bool want_stats = all || cmd == Subcommand::Statistics;
  const bool want_roundtrip = all || cmd == Subcommand::FunctorRoundtrip;
  const bool want_poset_suite = all || cmd == Subcommand::PosetCheck;

  json report = {{"schema", kReportSchema}, {"scenario", sc.name}, {"subcommand", to_string(cmd)}, {"seed", sc.seed}};
  std::ostringstream sum;
  sum << "scenario " << sc.name << " (" << to_string(cmd) << ", seed " << sc.seed << ")\n";
  Expectations ex;
  long unknowns = 0;
  const json& E = sc.expect;

  // poset
  std::shared_ptr<IndexPoset> P;
  try {
    P = std::make_shared<IndexPoset>(build_poset(sample_family(sc.family)));
  } catch (const Error& e) {
    if (e.kind == ErrorKind::ConfigInvalid || e.kind == ErrorKind::ParseError) invalid("/family", bare(e));
    throw;
  }
  long collar = std::count(P->collar.begin(), P->collar.end(), 1);
  json pj = {{"elements", P->size()}, {"levels", P->num_levels}, {"collar_elements", collar},
             {"group", P->group_ids}};
  sum << "poset: " << P->size() << " elements, " << P->group_ids.size() << " symmetries\n";

  AxiomBudget ab;
  ab.coset_rows = budget_c;
  ab.check_k7 = want_poset_suite;
  AxiomReport axioms = check_axioms(*P, ab);
  pj["axioms"] = report_to_json(axioms);
  json wit = json::object();
  for (const auto& r : axioms.results)
    if (r.verdict == Verdict::Fails) wit[r.axiom] = witness_confirms_failure(*P, r);
  pj["failure_witnesses_confirmed"] = wit;
  for (const auto& r : axioms.results) {
    sum << "  " << r.axiom << " " << to_string(r.verdict);
    if (!r.witness.empty()) {
      sum << " [";
      for (size_t i = 0; i < r.witness.size(); ++i) sum << (i ? ", " : "") << r.witness[i];
      sum << "]";
    }
    sum << "\n";
    if (r.verdict == Verdict::Unknown && (r.axiom != "K7" || want_poset_suite)) ++unknowns;
  }
  if (E.contains("axioms"))
    for (const auto& [k, v] : E["axioms"].items()) {
      std::string obs = to_string(axioms.at(k).verdict);
      std::string want = v.get<std::string>();
      bool match = obs == want || (want == "holds" && obs == std::string(to_string(Verdict::HoldsRelative)));
      if (obs == "fails" && wit.contains(k)) match = match && wit[k].get<bool>();
      if (k == "K7" && !want_poset_suite) continue;
      ex.add("axioms." + k, v, obs, match);
    }

  if (want_poset_suite) {
    auto comps = h1_components(*P);
    json h = json::array();
    for (const auto& c : comps) h.push_back(h1_to_json(c));
    pj["h1"] = h;
    pj["components"] = comps.size();
    sum << "  components " << comps.size();
    for (const auto& c : comps) {
      sum << "; H1 rank " << c.rank << " torsion [";
      for (size_t i = 0; i < c.torsion.size(); ++i) sum << (i ? "," : "") << c.torsion[i];
      sum << "]";
    }
    sum << "\n";
    if (opt.h1_all_supports) {
      auto alt = h1_components_all_supports(*P);
      json a = json::array();
      for (const auto& c : alt) a.push_back(h1_to_json(c));
      bool agree = alt.size() == comps.size() && std::equal(alt.begin(), alt.end(), comps.begin());
      pj["h1_all_supports"] = {{"h1", a}, {"agrees", agree}};
      sum << "  H1 over all supports " << (agree ? "agrees" : "DIFFERS") << "\n";
    }
    if (comps.size() == 1) {
      Pi1Result pi = pi1_trivial(*P, 0, budget_c);
      pj["pi1"] = {{"verdict", to_string(pi.verdict)}, {"cosets", pi.cosets}};
      if (!pi.loop.empty()) {
        json loop = json::array();
        for (int v : pi.loop) loop.push_back(P->elements[v]);
        pj["pi1"]["loop"] = loop;
      }
      sum << "  pi1 " << to_string(pi.verdict) << "\n";
      if (pi.verdict == Pi1Verdict::Unknown) ++unknowns;
      if (E.contains("pi1")) ex.add("pi1", E["pi1"], to_string(pi.verdict), E["pi1"] == to_string(pi.verdict));
      pj["homotopy_probe"] = homotopy_probe(*P, sc.seed, sc.probe_pairs, budget_h, &unknowns);
      sum << "  homotopy probe " << pj["homotopy_probe"]["homotopic"] << "/" << pj["homotopy_probe"]["pairs"]
          << " homotopic within " << budget_h << " states\n";
    }
    if (E.contains("components")) ex.add("components", E["components"], comps.size(), E["components"] == comps.size());
    if (E.contains("h1_rank")) {
      json obs = comps.size() == 1 ? json(comps[0].rank) : json(nullptr);
      ex.add("h1_rank", E["h1_rank"], obs, obs == E["h1_rank"]);
    }
    if (E.contains("h1_torsion")) {
      json obs = comps.size() == 1 ? json(comps[0].torsion) : json(nullptr);
      ex.add("h1_torsion", E["h1_torsion"], obs, obs == E["h1_torsion"]);
    }
  }
  report["poset"] = pj;

  // net
  std::shared_ptr<const Net> net;
  if (want_net && sc.has_net) {
    net = std::make_shared<const Net>(make_net(P, sc.model, sc.box_lo, sc.box_hi));
    NetReport nr = check_net(*net);
    report["net"] = net_report_to_json(*net, nr);
    sum << "net: " << to_string(sc.model) << ", " << net->nsites << " sites\n";
    for (const auto& c : nr.checks) sum << "  " << c.property << " " << verdict_word(c.holds) << "\n";
    if (E.contains("net"))
      for (const auto& [k, v] : E["net"].items()) {
        const NetCheck* found = nullptr;
        for (const auto& c : nr.checks)
          if (c.property == k) found = &c;
        json obs = found ? json(verdict_word(found->holds)) : json(nullptr);
        ex.add("net." + k, v, obs, obs == v);
      }
  } else if (want_net) {
    report["net"] = {{"skipped", "no net configured"}};
  }

  // cocycles and the suites built on them
  std::vector<std::pair<std::string, CovariantCocycle>> cocycles;
  if (want_cocycles && net) {
    json cj = json::object();
    VerifyOptions vo;
    vo.homotopy_pairs = sc.homotopy_pairs;
    vo.covariance_samples = sc.covariance_samples;
    vo.seed = sc.seed;
    vo.jobs = opt.jobs;
    for (size_t ci = 0; ci < sc.cocycles.size(); ++ci) {
      const CocycleSpec& s = sc.cocycles[ci];
      std::vector<int> chi;
      try {
        chi = character(*P, s.character);
      } catch (const Error& e) {
        if (e.kind == ErrorKind::ConfigInvalid) invalid("/cocycles/" + std::to_string(ci) + "/character", bare(e));
        throw;
      }
      CovariantCocycle X = charge_pair(net, s.charge, chi);
      CocycleReport r = verify_cocycle(X, vo);
      cj[s.name] = {{"charge", to_string(s.charge)},
                    {"character", s.character},
                    {"provenance", X.provenance()},
                    {"checks", cocycle_report_to_json(r)},
                    {"verdict", verdict_word(r.ok())}};
      sum << "cocycle " << s.name << " (" << to_string(s.charge) << ", " << s.character << "): " << verdict_word(r.ok())
          << "\n";
      for (const auto& c : r.checks) sum << "  " << c.check << " " << verdict_word(c.holds) << " (" << c.instances << ")\n";
      if (E.contains("cocycles") && E["cocycles"].contains(s.name))
        ex.add("cocycles." + s.name, E["cocycles"][s.name], verdict_word(r.ok()), E["cocycles"][s.name] == verdict_word(r.ok()));
      cocycles.emplace_back(s.name, X);
    }
    report["cocycles"] = cj;
  }

  if (want_stats && net) {
    json sj = json::object(), conj = json::object();
    for (const auto& [name, X] : cocycles) {
      StatisticsOptions so;
      so.path_pairs = sc.path_pairs;
      so.axioms = &axioms;
      StatisticsReport st = statistics(X, so);
      sj[name] = statistics_to_json(st);
      sum << "statistics " << name << ": simple " << (st.simple ? "yes" : "no");
      if (st.chi) sum << ", chi " << *st.chi;
      if (st.dimension) sum << ", d " << *st.dimension;
      sum << ", " << st.samples << " samples" << (st.path_dependent ? ", path dependent" : "")
          << (st.annotated ? ", K6 fails (annotated)" : "") << "\n";
      if (E.contains("statistics") && E["statistics"].contains(name))
        for (const auto& [k, v] : E["statistics"][name].items()) {
          json obs = sj[name].contains(k) ? sj[name][k] : sj[name]["path_dependence"].value(k, json(nullptr));
          if (k == "path_dependent") obs = st.path_dependent;
          ex.add("statistics." + name + "." + k, v, obs, obs == v);
        }

      json c;
      if (!st.simple || st.path_dependent) {
        c = {{"skipped", st.path_dependent ? "PathDependent" : "NotSimple"}};
      } else {
        CovariantCocycle Xb = conjugate(X, so);
        VerifyOptions vo;
        vo.homotopy_pairs = sc.homotopy_pairs;
        vo.covariance_samples = sc.covariance_samples;
        vo.seed = sc.seed;
        vo.jobs = opt.jobs;
        CocycleReport vb = verify_cocycle(Xb, vo);
        CovariantCocycle I = identity_cocycle(net);
        bool left = same_values(tensor(X, Xb), I), right = same_values(tensor(Xb, X), I);
        Intertwiner r = constant_arrow(I, tensor(Xb, X), GaussQ(1));
        Intertwiner rbar = constant_arrow(I, tensor(X, Xb), GaussQ(1));
        CheckResult eqs = check_conjugate_equations(X, Xb, r, rbar);
        auto space = intertwiner_space(X, X);
        bool ok = vb.ok() && left && right && eqs.holds && space.computed && space.dim == 1;
        c = {{"conjugate_cocycle", cocycle_report_to_json(vb)},
             {"x_tensor_xbar_is_identity", left},
             {"xbar_tensor_x_is_identity", right},
             {"conjugate_equations", check_to_json(eqs)},
             {"self_intertwiner_dimension", space.computed ? json(space.dim) : json("unknown")},
             {"verdict", verdict_word(ok)}};
        sum << "conjugation " << name << ": " << verdict_word(ok) << "\n";
      }
      conj[name] = c;
      if (E.contains("conjugation") && E["conjugation"].contains(name)) {
        json obs = c.contains("verdict") ? c["verdict"] : c["skipped"];
        ex.add("conjugation." + name, E["conjugation"][name], obs, obs == E["conjugation"][name]);
      }
    }
    report["statistics"] = sj;
    report["conjugation"] = conj;
  }

  if (want_roundtrip && net) {
    json rj = json::object(), lj = json::object();
    auto element = [&](const std::string& id, const char* path) {
      if (id.empty()) return -1;
      auto it = std::find(P->elements.begin(), P->elements.end(), id);
      if (it == P->elements.end()) invalid(path, "no element '" + id + "'");
      return static_cast<int>(it - P->elements.begin());
    };
    int pole = element(sc.pole, "/roundtrip/pole");
    int other = element(sc.other_pole, "/roundtrip/other_pole");
    for (const auto& [name, X] : cocycles) {
      json r;
      std::string verdict;
      try {
        LocalizeOptions lo;
        lo.axioms = &axioms;
        localize(X, pole < 0 ? 0 : pole, lo);
        RoundTrip rt = functor_roundtrip(X, pole, other, opt.jobs);
        r = roundtrip_to_json(*P, rt);
        verdict = verdict_word(rt.ok());
      } catch (const Error& e) {
        if (e.kind != ErrorKind::PosetUnsuitable) throw;
        r = {{"skipped", e.what()}};
        verdict = "skipped";
      }
      rj[name] = r;
      sum << "roundtrip " << name << ": " << verdict << "\n";
      if (E.contains("roundtrip") && E["roundtrip"].contains(name))
        ex.add("roundtrip." + name, E["roundtrip"][name], verdict, E["roundtrip"][name] == verdict);
      if (sc.morphism_laws && verdict != "skipped") {
        LawOptions lopt;
        lopt.jobs = opt.jobs;
        MorphismReport mr = check_morphism_laws(X, lopt);
        lj[name] = {{"checks", morphism_report_to_json(mr)}, {"verdict", verdict_word(mr.ok())}};
        sum << "morphism laws " << name << ": " << verdict_word(mr.ok()) << "\n";
        for (const auto& c : mr.checks) sum << "  " << c.check << " " << verdict_word(c.holds) << " (" << c.instances << ")\n";
        if (E.contains("morphism_laws") && E["morphism_laws"].contains(name))
          ex.add("morphism_laws." + name, E["morphism_laws"][name], verdict_word(mr.ok()),
                 E["morphism_laws"][name] == verdict_word(mr.ok()));
      }
    }
    report["roundtrip"] = rj;
    if (sc.morphism_laws) report["morphism_laws"] = lj;
  }

  if (sc.conclusive && unknowns > 0) ex.add("conclusive", true, false, false);
  report["expectations"] = ex.entries;
  report["unknown_verdicts"] = unknowns;
  report["verdict"] = ex.mismatch ? "mismatch" : "ok";
  long matched = 0;
  for (const auto& e : ex.entries) matched += e["match"].get<bool>();
  sum << "expectations: " << matched << "/" << ex.entries.size() << " matched\n";
  for (const auto& e : ex.entries)
    if (!e["match"].get<bool>())
      sum << "  MISMATCH " << e["key"].get<std::string>() << ": expected " << e["expected"].dump() << ", observed "
          << e["observed"].dump() << "\n";
  sum << "verdict: " << report["verdict"].get<std::string>() << "\n";
  return {report, sum.str(), ex.mismatch ? 1 : 0};
}

void write_outputs(const RunResult& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream rep(std::filesystem::path(out_dir) / "report.json", std::ios::binary);
  rep << r.report.dump(2) << "\n";
  std::ofstream sum(std::filesystem::path(out_dir) / "summary.txt", std::ios::binary);
  sum << r.summary;
  if (!rep || !sum) throw Error(ErrorKind::InvariantViolation, "cannot write outputs to " + out_dir);
}

}  // namespace sectorkit
