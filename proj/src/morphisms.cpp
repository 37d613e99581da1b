#include "sectorkit/morphisms.hpp"

#include <algorithm>

#include "parallel.hpp"
#include "sectorkit/error.hpp"

namespace sectorkit {

using detail::first_failure;

namespace {

CheckResult make_check(const std::string& name, long instances, long fail, const std::function<json(long)>& witness) {
  CheckResult r;
  r.check = name;
  r.instances = instances;
  r.holds = fail < 0;
  if (fail >= 0) r.witness = witness(fail);
  return r;
}

template <class F>
auto guarded(F body) {
  return [body](long i) {
    try {
      return body(i);
    } catch (const Error&) {
      return true;
    }
  };
}

std::vector<std::vector<PauliElement>> algebra_bases(const Net& net) {
  std::vector<std::vector<PauliElement>> out;
  for (size_t a = 0; a < net.P().size(); ++a) out.push_back(net.algebra(static_cast<int>(a)).basis_elements());
  return out;
}

std::vector<int> partners(const IndexPoset& P, int a) {
  std::vector<int> out;
  for (size_t c = 0; c < P.size(); ++c)
    if (P.perp[a][c]) out.push_back(static_cast<int>(c));
  return out;
}

// up to k entries of v other than the first, evenly spaced
std::vector<int> spread(const std::vector<int>& v, int k) {
  std::vector<int> out;
  if (v.size() <= 1 || k <= 0) return out;
  size_t rest = v.size() - 1, take = std::min<size_t>(k, rest);
  for (size_t i = 0; i < take; ++i) out.push_back(v[1 + i * rest / take]);
  return out;
}

}  // namespace

// ---- localized morphisms ---------------------------------------------------------

LocalizedMorphism::LocalizedMorphism(CovariantCocycle X, int o) : X_(std::move(X)), o_(o) {
  if (o < 0 || o >= static_cast<int>(X_.P().size())) throw Error(ErrorKind::IndexOutOfRange, "element index");
}

PauliElement LocalizedMorphism::apply(int a, const PauliElement& A) const { return rho(X_, o_, a, A); }

PauliElement LocalizedMorphism::apply(const std::vector<int>& regions, const PauliElement& A) const {
  const IndexPoset& P = X_.P();
  const Net& net = X_.net();
  if (regions.empty()) throw Error(ErrorKind::ShapeMismatch, "no regions given");
  Subspace V(net.nsites);
  for (int a : regions) V = V + net.algebra(a).space;
  for (const auto& [s, c] : A.terms())
    if (!V.contains(s)) throw Error(ErrorKind::SupportViolation, s.str() + " is outside the algebra of the regions");
  if (A.is_scalar()) return A;
  for (size_t c = 0; c < P.size(); ++c) {
    bool ok = true;
    for (int a : regions) ok = ok && P.perp[a][c];
    if (ok) {
      PauliElement W = X_.transport(o_, static_cast<int>(c));
      return W * A * W.adjoint();
    }
  }
  throw Error(ErrorKind::NoCommonDisjoint, "no element is disjoint from all regions");
}

CovarianceOp LocalizedMorphism::u_rho(int g) const {
  const IndexPoset& P = X_.P();
  int lo = P.action[g][o_];
  return {X_.transport(o_, lo) * X_.net().alpha(g, X_.object_value(o_, g)), g};
}

LocalizedMorphism localize(const CovariantCocycle& X, int o, const LocalizeOptions& opt) {
  const IndexPoset& P = X.P();
  if (opt.strict) {
    AxiomReport local;
    const AxiomReport* ax = opt.axioms;
    if (!ax) {
      AxiomBudget b;
      b.check_k7 = false;
      local = check_axioms(P, b);
      ax = &local;
    }
    for (const char* k : {"K4", "K6"}) {
      const auto& r = ax->at(k);
      if (r.verdict == Verdict::Fails) {
        std::string w;
        for (const auto& id : r.witness) w += (w.empty() ? "" : ", ") + id;
        throw Error(ErrorKind::PosetUnsuitable, std::string(k) + " fails (" + w + ")");
      }
    }
  }
  LocalizedMorphism m(X, o);
  const Net& net = X.net();
  for (size_t a = 0; a < P.size(); ++a) {
    auto ps = partners(P, static_cast<int>(a));
    if (ps.empty()) continue;
    auto alts = spread(ps, opt.alternatives);
    for (const auto& A : net.algebra(static_cast<int>(a)).basis_elements()) {
      PauliElement ref = rho_via(X, o, static_cast<int>(a), ps[0], A);
      for (int c : alts)
        if (rho_via(X, o, static_cast<int>(a), c, A) != ref)
          throw Error(ErrorKind::InvariantViolation, "ρ at " + P.elements[a] + " depends on the disjoint element (" +
                                                         P.elements[ps[0]] + " vs " + P.elements[c] + ")");
    }
  }
  return m;
}

PauliElement transport(const CovariantCocycle& X, int o_hat, int o) { return X.transport(o_hat, o); }

// ---- Δ laws -------------------------------------------------------------------------

bool MorphismReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.holds; });
}

const CheckResult& MorphismReport::at(const std::string& check) const {
  for (const auto& c : checks)
    if (c.check == check) return c;
  throw Error(ErrorKind::UnknownElement, "no check named " + check);
}

CheckResult check_group_law(const DeltaObject& D, int jobs) {
  const IndexPoset& P = D.P();
  const long n = static_cast<long>(P.size()), G = static_cast<long>(P.action.size());
  long count = n * G * G;
  long f = first_failure(count, jobs, guarded([&](long i) {
    int o = static_cast<int>(i / (G * G)), l = static_cast<int>((i / G) % G), s = static_cast<int>(i % G);
    CovarianceOp ul = D.covariance(o, l), us = D.covariance(o, s), uls = D.covariance(o, P.mult[l][s]);
    return ul.W * D.net->alpha(l, us.W) != uls.W || !ul.W.is_unitary();
  }));
  return make_check("group_law", count, f, [&](long i) {
    return json{{"o", P.elements[i / (G * G)]}, {"lambda", P.group_ids[(i / G) % G]}, {"sigma", P.group_ids[i % G]}};
  });
}

CheckResult check_covariance(const DeltaObject& D, int jobs) {
  const IndexPoset& P = D.P();
  const Net& net = *D.net;
  auto bases = algebra_bases(net);
  const long n = static_cast<long>(P.size()), G = static_cast<long>(P.action.size());
  long count = n * n * G;
  long f = first_failure(count, jobs, guarded([&](long i) {
    int o = static_cast<int>(i / (n * G)), a = static_cast<int>((i / G) % n), g = static_cast<int>(i % G);
    PauliElement W = D.covariance(o, g).W;
    int la = P.action[g][a];
    for (const auto& A : bases[a])
      if (W * net.alpha(g, D.apply(o, a, A)) != D.apply(o, la, net.alpha(g, A)) * W) return true;
    return false;
  }));
  return make_check("covariance", count, f, [&](long i) {
    return json{{"o", P.elements[i / (n * G)]}, {"a", P.elements[(i / G) % n]}, {"lambda", P.group_ids[i % G]}};
  });
}

namespace {

CheckResult transport_intertwining(const DeltaObject& D, const std::vector<std::pair<int, int>>& pairs, int jobs) {
  const IndexPoset& P = D.P();
  auto bases = algebra_bases(*D.net);
  const long n = static_cast<long>(P.size());
  long count = static_cast<long>(pairs.size()) * n;
  long f = first_failure(count, jobs, guarded([&](long i) {
    auto [x, y] = pairs[i / n];
    int a = static_cast<int>(i % n);
    PauliElement v = D.transport(x, y);
    for (const auto& A : bases[a])
      if (v * D.apply(y, a, A) != D.apply(x, a, A) * v) return true;
    return false;
  }));
  return make_check("transport", count, f, [&](long i) {
    auto [x, y] = pairs[i / n];
    return json{{"to", P.elements[x]}, {"from", P.elements[y]}, {"a", P.elements[i % n]}};
  });
}

}  // namespace

CheckResult check_transport(const DeltaObject& D, int jobs) {
  // adjacent pairs; with the transport law this covers every pair
  const IndexPoset& P = D.P();
  std::vector<std::pair<int, int>> pairs;
  for (size_t y = 0; y < P.size(); ++y)
    for (int x : neighbors(P, static_cast<int>(y))) pairs.emplace_back(x, static_cast<int>(y));
  return transport_intertwining(D, pairs, jobs);
}

CheckResult check_transport_law(const DeltaObject& D, int jobs) {
  const IndexPoset& P = D.P();
  const long n = static_cast<long>(P.size());
  long count = n * n * n;
  long f = first_failure(count, jobs, guarded([&](long i) {
    int x = static_cast<int>(i / (n * n)), y = static_cast<int>((i / n) % n), z = static_cast<int>(i % n);
    return D.transport(x, y) * D.transport(y, z) != D.transport(x, z);
  }));
  return make_check("transport_law", count, f, [&](long i) {
    return json{{"x", P.elements[i / (n * n)]}, {"y", P.elements[(i / n) % n]}, {"z", P.elements[i % n]}};
  });
}

MorphismReport verify_delta(const DeltaObject& D, int jobs) {
  MorphismReport r;
  r.checks.push_back(check_transport_law(D, jobs));
  r.checks.push_back(check_transport(D, jobs));
  r.checks.push_back(check_group_law(D, jobs));
  r.checks.push_back(check_covariance(D, jobs));
  return r;
}

CheckResult verify_delta_arrow(const DeltaArrow& t, int jobs) {
  const DeltaObject& R = t.source;
  const DeltaObject& S = t.target;
  const IndexPoset& P = R.P();
  const Net& net = *R.net;
  if (t.value.size() != P.size()) throw Error(ErrorKind::ShapeMismatch, "arrow does not cover the poset");
  auto bases = algebra_bases(net);
  const long n = static_cast<long>(P.size()), G = static_cast<long>(P.action.size());
  // per o: membership, then every a, then every λ
  long count = n * (1 + n + G);
  long f = first_failure(count, jobs, guarded([&](long i) {
    int o = static_cast<int>(i / (1 + n + G));
    long k = i % (1 + n + G);
    const PauliElement& to = t.value[o];
    if (k == 0) return !net.algebra(o).contains(to);
    if (k <= n) {
      int a = static_cast<int>(k - 1);
      for (const auto& A : bases[a])
        if (to * R.apply(o, a, A) != S.apply(o, a, A) * to) return true;
      return false;
    }
    int g = static_cast<int>(k - 1 - n);
    return to * R.covariance(o, g).W != S.covariance(o, g).W * net.alpha(g, to);
  }));
  return make_check("delta_arrow", count, f, [&](long i) {
    int o = static_cast<int>(i / (1 + n + G));
    long k = i % (1 + n + G);
    json w = {{"o", P.elements[o]}};
    if (k == 0)
      w["reason"] = "component outside the local algebra";
    else if (k <= n)
      w["a"] = P.elements[k - 1];
    else
      w["lambda"] = P.group_ids[k - 1 - n];
    return w;
  });
}

MorphismReport check_morphism_laws(const CovariantCocycle& X, const LawOptions& opt) {
  const IndexPoset& P = X.P();
  const Net& net = X.net();
  DeltaObject D = functor_Z_to_D(X);
  auto bases = algebra_bases(net);
  const long n = static_cast<long>(P.size()), G = static_cast<long>(P.action.size());
  MorphismReport rep;

  // ρ_{a'} restricted to 𝒜(a) is ρ_a
  {
    std::vector<std::pair<int, int>> inc;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (P.lt[a][b]) inc.emplace_back(a, b);
    long count = static_cast<long>(inc.size()) * n;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      auto [a, b] = inc[i / n];
      int o = static_cast<int>(i % n);
      for (const auto& A : bases[a])
        if (D.apply(o, b, A) != D.apply(o, a, A)) return true;
      return false;
    }));
    rep.checks.push_back(make_check("consistency", count, f, [&](long i) {
      return json{{"a", P.elements[inc[i / n].first]}, {"a_prime", P.elements[inc[i / n].second]}, {"o", P.elements[i % n]}};
    }));
  }
  // (i) a ⊥ o
  {
    long count = n * n;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      int o = static_cast<int>(i / n), a = static_cast<int>(i % n);
      if (!P.perp[a][o]) return false;
      for (const auto& A : bases[a])
        if (D.apply(o, a, A) != A) return true;
      return false;
    }));
    rep.checks.push_back(make_check("localization", count, f, [&](long i) {
      return json{{"o", P.elements[i / n]}, {"a", P.elements[i % n]}};
    }));
  }
  // (ii) o ⊆ õ
  {
    long count = n * n;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      int o = static_cast<int>(i / n), t = static_cast<int>(i % n);
      if (!P.leq[o][t]) return false;
      for (const auto& A : bases[t])
        if (!net.algebra(t).contains(D.apply(o, t, A))) return true;
      return false;
    }));
    rep.checks.push_back(make_check("stability", count, f, [&](long i) {
      return json{{"o", P.elements[i / n]}, {"o_tilde", P.elements[i % n]}};
    }));
  }
  // (iii)
  if (opt.all_transport_pairs) {
    std::vector<std::pair<int, int>> pairs;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) pairs.emplace_back(x, y);
    rep.checks.push_back(transport_intertwining(D, pairs, opt.jobs));
  } else {
    rep.checks.push_back(check_transport(D, opt.jobs));
  }
  rep.checks.push_back(check_transport_law(D, opt.jobs));
  // (iv) ad X_b(λ) ∘ ρ^{∂1b}_a = α⁻¹ ∘ ρ^{λ∂0b}_{λa} ∘ α
  {
    auto edges = canonical_edges(P);
    long count = static_cast<long>(edges.size()) * G * n;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      const Simplex& b = edges[i / (G * n)];
      int g = static_cast<int>((i / n) % G), a = static_cast<int>(i % n);
      PauliElement x = X.value(b, g), xs = x.adjoint();
      int top = P.action[g][b.d0()], la = P.action[g][a];
      for (const auto& A : bases[a])
        if (x * D.apply(b.d1(), a, A) * xs != net.alpha_inv(g, D.apply(top, la, net.alpha(g, A)))) return true;
      return false;
    }));
    rep.checks.push_back(make_check("cocycle_conjugation", count, f, [&](long i) {
      return json{{"simplex", simplex_to_json(P, edges[i / (G * n)])},
                  {"lambda", P.group_ids[(i / n) % G]},
                  {"a", P.elements[i % n]}};
    }));
  }
  rep.checks.push_back(check_group_law(D, opt.jobs));
  rep.checks.push_back(check_covariance(D, opt.jobs));
  // the choice of ã
  {
    long count = n * n;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      int o = static_cast<int>(i / n), a = static_cast<int>(i % n);
      auto ps = partners(P, a);
      if (ps.empty()) return false;
      for (const auto& A : bases[a]) {
        PauliElement ref = rho_via(X, o, a, ps[0], A);
        for (int c : spread(ps, opt.alternatives))
          if (rho_via(X, o, a, c, A) != ref) return true;
      }
      return false;
    }));
    rep.checks.push_back(make_check("choice_independence", count, f, [&](long i) {
      return json{{"o", P.elements[i / n]}, {"a", P.elements[i % n]}};
    }));
  }
  return rep;
}

// ---- functors ------------------------------------------------------------------------

DeltaObject functor_Z_to_D(const CovariantCocycle& X) {
  DeltaObject D;
  D.net = X.net_ptr();
  D.apply = [X](int o, int a, const PauliElement& A) { return rho(X, o, a, A); };
  D.transport = [X](int to, int from) { return X.transport(to, from); };
  D.covariance = [X](int o, int g) { return LocalizedMorphism(X, o).u_rho(g); };
  D.provenance = json{{"kind", "from-cocycle"}, {"cocycle", X.provenance()}};
  return D;
}

DeltaArrow functor_Z_to_D(const Intertwiner& t) {
  return {functor_Z_to_D(t.source), functor_Z_to_D(t.target), t.value};
}

CovariantCocycle functor_D_to_Z(const DeltaObject& D, int pole, bool verify, int jobs) {
  const IndexPoset& P = D.P();
  if (pole < 0 || pole >= static_cast<int>(P.size())) throw Error(ErrorKind::IndexOutOfRange, "pole");
  if (verify) {
    MorphismReport r = verify_delta(D, jobs);
    for (const auto& c : r.checks)
      if (!c.holds) throw Error(ErrorKind::AxiomsFail, c.check + " fails at " + c.witness.dump());
  }
  const Net* net = D.net.get();
  auto f = [D, pole, net](const Simplex& b, int g) {
    int top = net->P().action[g][b.d0()];
    return net->alpha_inv(g, D.transport(top, pole) * D.covariance(pole, g).W) * D.transport(pole, b.d1());
  };
  json prov = {{"kind", "pole-constructed"}, {"pole", P.elements[pole]}, {"morphism", D.provenance}};
  return CovariantCocycle(D.net, f, std::move(prov));
}

Intertwiner functor_D_to_Z(const DeltaArrow& t, int pole) {
  CovariantCocycle X = functor_D_to_Z(t.source, pole, false);
  CovariantCocycle Y = functor_D_to_Z(t.target, pole, false);
  Intertwiner r{X, Y, {}};
  for (size_t o = 0; o < t.value.size(); ++o)
    r.value.push_back(t.target.transport(static_cast<int>(o), pole) * t.value[pole] *
                      t.source.transport(pole, static_cast<int>(o)));
  return r;
}

// ---- equivalences ----------------------------------------------------------------------

ArrowSearch find_unitary_arrow(const CovariantCocycle& X, const CovariantCocycle& Y, const std::vector<int>& poles) {
  ArrowSearch s;
  const IndexPoset& P = X.P();
  auto accept = [&](Intertwiner t, const std::string& name) {
    ++s.tried;
    if (!is_unitary(t) || !verify_intertwiner(t).holds) return false;
    s.found = true;
    s.arrow = std::move(t);
    s.candidate = name;
    return true;
  };
  for (int k = 0; k < 4; ++k)
    if (accept(constant_arrow(X, Y, GaussQ::i_pow(k)), "constant i^" + std::to_string(k))) return s;
  std::vector<int> ps = poles.empty() ? std::vector<int>{0} : poles;
  for (int a : ps) {
    Intertwiner t{X, Y, {}};
    try {
      for (size_t o = 0; o < P.size(); ++o)
        t.value.push_back(Y.transport(static_cast<int>(o), a) * X.transport(a, static_cast<int>(o)));
    } catch (const Error&) {
      continue;
    }
    if (accept(std::move(t), "transport through " + P.elements[a])) return s;
  }
  auto space = intertwiner_space(X, Y);
  for (size_t i = 0; i < space.basis.size(); ++i)
    if (accept(space.basis[i], "basis vector " + std::to_string(i))) return s;
  return s;
}

bool RoundTrip::ok() const { return verify.ok() && delta.ok() && to_input.found && between_poles.found; }

RoundTrip functor_roundtrip(const CovariantCocycle& X, int pole, int other_pole, int jobs) {
  const IndexPoset& P = X.P();
  RoundTrip r;
  r.pole = pole < 0 ? 0 : pole;
  r.other_pole = other_pole < 0 ? static_cast<int>(P.size()) - 1 : other_pole;
  DeltaObject D = functor_Z_to_D(X);
  r.delta = verify_delta(D, jobs);
  CovariantCocycle Y = functor_D_to_Z(D, r.pole, false);
  VerifyOptions vo;
  vo.jobs = jobs;
  r.verify = verify_cocycle(Y, vo);
  r.exact = same_values(X, Y);
  r.to_input = find_unitary_arrow(X, Y, {r.pole});
  CovariantCocycle Y2 = functor_D_to_Z(D, r.other_pole, false);
  r.between_poles = find_unitary_arrow(Y, Y2, {r.pole, r.other_pole});
  return r;
}

json morphism_report_to_json(const MorphismReport& r) {
  json a = json::array();
  for (const auto& c : r.checks) a.push_back(check_to_json(c));
  return a;
}

json roundtrip_to_json(const IndexPoset& P, const RoundTrip& r) {
  auto search = [&](const ArrowSearch& s) {
    json j = {{"found", s.found}, {"candidates_tried", s.tried}};
    if (s.found) {
      j["candidate"] = s.candidate;
      json comp = json::object();
      for (size_t o = 0; o < s.arrow->value.size(); ++o) comp[P.elements[o]] = s.arrow->value[o].str();
      j["components"] = comp;
    }
    return j;
  };
  return json{{"pole", P.elements[r.pole]},
              {"other_pole", P.elements[r.other_pole]},
              {"delta_laws", morphism_report_to_json(r.delta)},
              {"roundtrip_cocycle", cocycle_report_to_json(r.verify)},
              {"exact", r.exact},
              {"equivalence", search(r.to_input)},
              {"pole_change", search(r.between_poles)},
              {"verdict", r.ok() ? "holds" : "fails"}};
}

}  // namespace sectorkit
