#include "sectorkit/cocycle.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <random>
#include <set>

#include "sectorkit/error.hpp"
#include "parallel.hpp"

namespace sectorkit {

// ---- cocycle storage ----------------------------------------------------------

struct CovariantCocycle::State {
  Formula f;
  json provenance;
  std::mutex m;
  std::map<std::array<int, 4>, PauliElement> memo;
  std::map<std::pair<int, int>, PauliElement> transport;
};

CovariantCocycle::CovariantCocycle(std::shared_ptr<const Net> net, Formula f, json provenance)
    : net_(std::move(net)), state_(std::make_shared<State>()) {
  state_->f = std::move(f);
  state_->provenance = std::move(provenance);
}

const json& CovariantCocycle::provenance() const { return state_->provenance; }

PauliElement CovariantCocycle::value(const Simplex& b, int g) const {
  if (b.dim != 1) throw Error(ErrorKind::ShapeMismatch, "cocycles take 1-simplices");
  if (g < 0 || g >= static_cast<int>(P().action.size())) throw Error(ErrorKind::IndexOutOfRange, "symmetry index");
  std::array<int, 4> key{g, b.d1(), b.d0(), b.support};
  {
    std::lock_guard<std::mutex> lock(state_->m);
    auto it = state_->memo.find(key);
    if (it != state_->memo.end()) return it->second;
  }
  PauliElement v = state_->f(b, g);
  std::lock_guard<std::mutex> lock(state_->m);
  return state_->memo.emplace(key, std::move(v)).first->second;
}

PauliElement CovariantCocycle::edge(int from, int to, int g) const {
  auto s = edge_support(P(), from, to);
  if (!s) throw Error(ErrorKind::InvalidPath, "no 1-simplex from " + P().elements[from] + " to " + P().elements[to]);
  return value(make_edge(P(), from, to, *s), g);
}

PauliElement CovariantCocycle::object_value(int o, int g) const { return value(make_edge(P(), o, o, o), g); }

PauliElement CovariantCocycle::transport(int to, int from) const {
  std::pair<int, int> key{to, from};
  {
    std::lock_guard<std::mutex> lock(state_->m);
    auto it = state_->transport.find(key);
    if (it != state_->transport.end()) return it->second;
  }
  PauliElement v = evaluate_path(*this, canonical_path(P(), from, to));
  std::lock_guard<std::mutex> lock(state_->m);
  return state_->transport.emplace(key, std::move(v)).first->second;
}

CovariantCocycle CovariantCocycle::with_value(int g, const Simplex& b, const PauliElement& v) const {
  CovariantCocycle base = *this;
  Formula f = [base, g, b, v](const Simplex& x, int h) {
    if (h == g && x == b) return v;
    return base.value(x, h);
  };
  json prov = {{"kind", "synthetic"}, {"construction", "modified"}, {"base", provenance()}};
  return CovariantCocycle(net_, std::move(f), std::move(prov));
}

PauliElement evaluate_path(const CovariantCocycle& X, const Path& p) {
  validate_path(X.P(), p);
  PauliElement out(GaussQ(1));
  for (const auto& b : p.edges) out = X.value(b) * out;
  return out;
}

PauliElement evaluate_object(const CovariantCocycle& X, int o, int g) { return X.object_value(o, g); }

// ---- constructors -------------------------------------------------------------

CovariantCocycle identity_cocycle(std::shared_ptr<const Net> net) {
  return CovariantCocycle(
      std::move(net), [](const Simplex&, int) { return PauliElement(GaussQ(1)); }, json{{"kind", "identity"}});
}

namespace {

int perm_sign(const std::vector<int>& perm) {
  int s = 1;
  for (size_t i = 0; i < perm.size(); ++i)
    for (size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) s = -s;
  return s;
}

}  // namespace

std::vector<int> character(const IndexPoset& P, const std::string& name) {
  const size_t G = P.action.size();
  std::vector<int> chi(G, 1);
  if (name != "trivial") {
    bool signed_perm = P.symmetries.size() == G;
    for (const auto& s : P.symmetries) signed_perm = signed_perm && s.kind == SymmetryKind::SignedPermutation;
    if (!signed_perm) throw Error(ErrorKind::ConfigInvalid, "character '" + name + "' needs a signed permutation group");
    for (size_t g = 0; g < G; ++g) {
      const auto& s = P.symmetries[g];
      int det = perm_sign(s.perm);
      for (int x : s.signs) det *= x;
      int per = perm_sign(s.perm);
      if (name == "det")
        chi[g] = det;
      else if (name == "perm")
        chi[g] = per;
      else if (name == "det*perm")
        chi[g] = det * per;
      else
        throw Error(ErrorKind::ConfigInvalid, "unknown character '" + name + "'");
    }
  }
  for (size_t g = 0; g < G; ++g)
    for (size_t h = 0; h < G; ++h)
      if (chi[P.mult[g][h]] != chi[g] * chi[h])
        throw Error(ErrorKind::InvariantViolation, "'" + name + "' is not a character of this group");
  return chi;
}

std::vector<int> site_assignment(const Net& net) {
  const IndexPoset& P = net.P();
  const int n = static_cast<int>(P.size());
  std::vector<int> s(n, -1);
  for (int o = 0; o < n; ++o) {
    if (s[o] >= 0) continue;
    int pick = -1;
    for (int k : net.site_map[o]) {
      bool fixed = true;
      for (size_t g = 0; g < P.action.size() && fixed; ++g)
        if (P.action[g][o] == o && net.rep[g][k] != k) fixed = false;
      if (fixed) {
        pick = k;
        break;
      }
    }
    if (pick < 0) throw Error(ErrorKind::InvariantViolation, "no site of " + P.elements[o] + " is fixed by its stabiliser");
    for (size_t g = 0; g < P.action.size(); ++g) {
      int img = P.action[g][o], site = net.rep[g][pick];
      if (s[img] >= 0 && s[img] != site) throw Error(ErrorKind::InvariantViolation, "inconsistent site assignment");
      s[img] = site;
    }
  }
  return s;
}

const char* to_string(Charge c) { return c == Charge::Boson ? "boson" : "fermion"; }

PauliElement charged_string(Charge c, int site) {
  if (c == Charge::Boson) return PauliElement(PauliString::Z(site));
  PauliString p = PauliString::X(site);
  for (int k = 0; k < site; ++k) p.set_z(k, true);
  return PauliElement(p);
}

CovariantCocycle charge_pair(std::shared_ptr<const Net> net, Charge c, const std::vector<int>& chi) {
  const IndexPoset& P = net->P();
  if (chi.size() != P.action.size()) throw Error(ErrorKind::ShapeMismatch, "character does not cover the group");
  std::vector<int> s = site_assignment(*net);
  std::vector<PauliElement> F;
  for (int k = 0; k < net->nsites; ++k) F.push_back(charged_string(c, k));
  json sites = json::object(), ch = json::object();
  for (size_t o = 0; o < P.size(); ++o) sites[P.elements[o]] = s[o] + 1;
  for (size_t g = 0; g < chi.size(); ++g) ch[P.group_ids[g]] = chi[g];
  json prov = {{"kind", "charge-pair"}, {"charge", to_string(c)}, {"sites", sites}, {"character", ch}};
  auto f = [s, F, chi](const Simplex& b, int g) {
    return F[s[b.d0()]] * F[s[b.d1()]] * GaussQ(chi[g]);
  };
  return CovariantCocycle(std::move(net), f, std::move(prov));
}

CovariantCocycle table_cocycle(std::shared_ptr<const Net> net, std::map<std::pair<int, Simplex>, PauliElement> values,
                               json provenance) {
  auto table = std::make_shared<const std::map<std::pair<int, Simplex>, PauliElement>>(std::move(values));
  const IndexPoset* P = &net->P();
  auto f = [table, P](const Simplex& b, int g) {
    auto it = table->find({g, b});
    if (it != table->end()) return it->second;
    auto s = edge_support(*P, b.d1(), b.d0());
    if (s) {
      it = table->find({g, make_edge(*P, b.d1(), b.d0(), *s)});
      if (it != table->end()) return it->second;
    }
    throw Error(ErrorKind::ConfigInvalid, "cocycle table has no value for " + P->group_ids[g] + "/" +
                                              simplex_key(*P, b));
  };
  return CovariantCocycle(std::move(net), f, std::move(provenance));
}

// ---- verification -------------------------------------------------------------

bool CocycleReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.holds; });
}

const CheckResult& CocycleReport::at(const std::string& check) const {
  for (const auto& c : checks)
    if (c.check == check) return c;
  throw Error(ErrorKind::UnknownElement, "no check named " + check);
}

namespace {

using detail::first_failure;

Path random_walk(const IndexPoset& P, std::mt19937_64& rng, int length) {
  const int n = static_cast<int>(P.size());
  for (int attempt = 0; attempt < 64; ++attempt) {
    int start = static_cast<int>(rng() % n);
    std::vector<int> verts{start};
    for (int k = 0; k < length; ++k) {
      auto nb = neighbors(P, verts.back());
      if (nb.empty()) break;
      verts.push_back(nb[rng() % nb.size()]);
    }
    if (static_cast<int>(verts.size()) == length + 1) return path_through(P, verts);
  }
  throw Error(ErrorKind::Disconnected, "poset has no edges to sample paths from");
}

CheckResult check(const std::string& name, long instances, long fail, const std::function<json(long)>& witness) {
  CheckResult r;
  r.check = name;
  r.instances = instances;
  r.holds = fail < 0;
  if (fail >= 0) r.witness = witness(fail);
  return r;
}

}  // namespace

CocycleReport verify_cocycle(const CovariantCocycle& X, const VerifyOptions& opt) {
  const IndexPoset& P = X.P();
  const Net& net = X.net();
  const long G = static_cast<long>(P.action.size());
  const int e = P.identity;
  const PauliElement one(GaussQ(1));
  CocycleReport rep;

  auto guarded = [](auto&& body) {
    return [body](long i) {
      try {
        return body(i);
      } catch (const Error&) {
        return true;
      }
    };
  };

  auto edges = canonical_edges(P);
  {
    long count = static_cast<long>(edges.size()) * G;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      const Simplex& b = edges[i / G];
      PauliElement v = X.value(b, static_cast<int>(i % G));
      return !(v.is_unitary() && net.algebra(b.support).contains(v));
    }));
    rep.checks.push_back(check("values", count, f, [&](long i) {
      return json{{"simplex", simplex_to_json(P, edges[i / G])}, {"lambda", P.group_ids[i % G]}};
    }));
  }

  auto tris = canonical_triangles(P);
  {
    long count = static_cast<long>(tris.size()) * G * G;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      const Simplex& c = tris[i / (G * G)];
      int sigma = static_cast<int>((i / G) % G), lambda = static_cast<int>(i % G);
      PauliElement lhs = X.value(face(c, 1), P.mult[sigma][lambda]);
      PauliElement rhs = net.alpha_inv(lambda, X.value(act(P, lambda, face(c, 0)), sigma)) * X.value(face(c, 2), lambda);
      return lhs != rhs;
    }));
    rep.checks.push_back(check("cocycle_identity", count, f, [&](long i) {
      return json{{"simplex", simplex_to_json(P, tris[i / (G * G)])},
                  {"sigma", P.group_ids[(i / G) % G]},
                  {"lambda", P.group_ids[i % G]}};
    }));
  }
  {
    long count = static_cast<long>(tris.size());
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      const Simplex& c = tris[i];
      return X.value(face(c, 0)) * X.value(face(c, 2)) != X.value(face(c, 1));
    }));
    rep.checks.push_back(check("roberts", count, f, [&](long i) { return json{{"simplex", simplex_to_json(P, tris[i])}}; }));
  }

  // degenerate simplices (o, o; c) for every c ⊇ o
  std::vector<std::pair<int, int>> degen;
  for (size_t o = 0; o < P.size(); ++o)
    for (size_t c = 0; c < P.size(); ++c)
      if (P.leq[o][c]) degen.emplace_back(static_cast<int>(o), static_cast<int>(c));
  {
    long count = static_cast<long>(degen.size());
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      auto [o, c] = degen[i];
      return X.value(make_edge(P, o, o, c), e) != one;
    }));
    rep.checks.push_back(check("degenerate", count, f, [&](long i) {
      return json{{"simplex", simplex_to_json(P, make_edge(P, degen[i].first, degen[i].first, degen[i].second))}};
    }));
  }
  {
    long count = static_cast<long>(degen.size()) * G;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      auto [o, c] = degen[i / G];
      int g = static_cast<int>(i % G);
      return X.value(make_edge(P, o, o, c), g) != X.object_value(o, g);
    }));
    rep.checks.push_back(check("well_defined", count, f, [&](long i) {
      auto [o, c] = degen[i / G];
      return json{{"element", P.elements[o]}, {"support", P.elements[c]}, {"lambda", P.group_ids[i % G]}};
    }));
  }

  // homotopic pairs, each witnessed by the moves that produced it
  {
    std::mt19937_64 rng(opt.seed);
    std::vector<std::pair<Path, Path>> pairs;
    for (int k = 0; k < opt.homotopy_pairs; ++k) {
      Path p = random_walk(P, rng, 2 + static_cast<int>(rng() % 3));
      Path q = p;
      int moves = 1 + static_cast<int>(rng() % 4);
      for (int m = 0; m < moves; ++m) {
        auto mv = deformation_moves(P, q);
        if (mv.empty()) break;
        q = apply_move(P, q, mv[rng() % mv.size()]);
      }
      pairs.emplace_back(std::move(p), std::move(q));
    }
    long count = static_cast<long>(pairs.size());
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      return evaluate_path(X, pairs[i].first) != evaluate_path(X, pairs[i].second);
    }));
    rep.checks.push_back(check("homotopy", count, f, [&](long i) {
      return json{{"p", path_to_json(P, pairs[i].first)}, {"q", path_to_json(P, pairs[i].second)}};
    }));
  }

  // X_{λp} U(λ) X_o(λ) = U(λ) X_õ(λ) X_p, with U A = α(A) U moved to the right
  {
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<Path> paths;
    for (int k = 0; k < opt.covariance_samples; ++k) paths.push_back(random_walk(P, rng, 1 + static_cast<int>(rng() % 3)));
    long count = static_cast<long>(paths.size()) * G;
    long f = first_failure(count, opt.jobs, guarded([&](long i) {
      const Path& p = paths[i / G];
      int g = static_cast<int>(i % G);
      PauliElement lhs = evaluate_path(X, act(P, g, p)) * net.alpha(g, X.object_value(p.start, g));
      PauliElement rhs = net.alpha(g, X.object_value(p.end, g) * evaluate_path(X, p));
      return lhs != rhs;
    }));
    rep.checks.push_back(check("path_covariance", count, f, [&](long i) {
      return json{{"path", path_to_json(P, paths[i / G])}, {"lambda", P.group_ids[i % G]}};
    }));
  }
  return rep;
}

// ---- morphisms ------------------------------------------------------------------

int disjoint_partner(const IndexPoset& P, int a) {
  for (size_t c = 0; c < P.size(); ++c)
    if (P.perp[a][c]) return static_cast<int>(c);
  return -1;
}

PauliElement rho_via(const CovariantCocycle& X, int o, int a, int partner, const PauliElement& A) {
  const IndexPoset& P = X.P();
  if (!X.net().algebra(a).contains(A)) throw Error(ErrorKind::SupportViolation, "operator is not in the algebra of " + P.elements[a]);
  if (A.is_scalar()) return A;
  if (!P.perp[a][partner]) throw Error(ErrorKind::InvariantViolation, P.elements[partner] + " is not disjoint from " + P.elements[a]);
  PauliElement W = X.transport(o, partner);
  return W * A * W.adjoint();
}

PauliElement rho(const CovariantCocycle& X, int o, int a, const PauliElement& A) {
  if (A.is_scalar()) return A;
  int partner = disjoint_partner(X.P(), a);
  if (partner < 0) throw Error(ErrorKind::NoDisjointTargets, "nothing is disjoint from " + X.P().elements[a]);
  return rho_via(X, o, a, partner, A);
}

// ---- arrows -----------------------------------------------------------------------

Intertwiner identity_arrow(const CovariantCocycle& X) { return constant_arrow(X, X, GaussQ(1)); }

Intertwiner constant_arrow(const CovariantCocycle& X, const CovariantCocycle& Y, const GaussQ& c) {
  return {X, Y, std::vector<PauliElement>(X.P().size(), PauliElement(c))};
}

CheckResult verify_intertwiner(const Intertwiner& t) {
  const CovariantCocycle& X = t.source;
  const CovariantCocycle& Y = t.target;
  const IndexPoset& P = X.P();
  const Net& net = X.net();
  if (&X.net() != &Y.net() || t.value.size() != P.size()) throw Error(ErrorKind::ShapeMismatch, "arrow does not match its objects");
  CheckResult r;
  r.check = "intertwiner";
  for (size_t a = 0; a < P.size(); ++a)
    if (!net.algebra(static_cast<int>(a)).contains(t.value[a])) {
      r.holds = false;
      r.witness = {{"element", P.elements[a]}, {"reason", "component outside the local algebra"}};
      r.instances = static_cast<long>(a) + 1;
      return r;
    }
  auto edges = canonical_edges(P);
  const long G = static_cast<long>(P.action.size());
  r.instances = static_cast<long>(P.size() + edges.size() * G);
  for (size_t i = 0; i < edges.size(); ++i)
    for (int g = 0; g < G; ++g) {
      const Simplex& b = edges[i];
      PauliElement lhs = net.alpha_inv(g, t.value[P.action[g][b.d0()]]) * X.value(b, g);
      PauliElement rhs = Y.value(b, g) * t.value[b.d1()];
      if (lhs != rhs) {
        r.holds = false;
        r.witness = {{"simplex", simplex_to_json(P, b)}, {"lambda", P.group_ids[g]}};
        return r;
      }
    }
  return r;
}

bool same_values(const CovariantCocycle& X, const CovariantCocycle& Y) {
  if (X.same(Y)) return true;
  if (&X.net() != &Y.net()) return false;
  const long G = static_cast<long>(X.P().action.size());
  for (const auto& b : canonical_edges(X.P()))
    for (int g = 0; g < G; ++g)
      if (X.value(b, g) != Y.value(b, g)) return false;
  return true;
}

Intertwiner compose(const Intertwiner& t, const Intertwiner& s) {
  if (t.value.size() != s.value.size() || !same_values(s.target, t.source))
    throw Error(ErrorKind::ShapeMismatch, "arrows do not compose");
  Intertwiner r{s.source, t.target, {}};
  for (size_t a = 0; a < t.value.size(); ++a) r.value.push_back(t.value[a] * s.value[a]);
  return r;
}

Intertwiner adjoint(const Intertwiner& t) {
  Intertwiner r{t.target, t.source, {}};
  for (const auto& v : t.value) r.value.push_back(v.adjoint());
  return r;
}

bool is_unitary(const Intertwiner& t) {
  return std::all_of(t.value.begin(), t.value.end(), [](const PauliElement& v) { return v.is_unitary(); });
}

namespace {

std::optional<int> unit_phase(const GaussQ& c) {
  for (int k = 0; k < 4; ++k)
    if (c == GaussQ::i_pow(k)) return k;
  return std::nullopt;
}

// c_u = i^{pot[u]} c_{root}; a component forced to zero is marked on its root
struct PhaseUnionFind {
  std::vector<int> parent, pot;
  std::vector<uint8_t> zero;
  explicit PhaseUnionFind(size_t n) : parent(n), pot(n, 0), zero(n, 0) {
    for (size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  }
  std::pair<int, int> find(int u) {
    int ph = 0, v = u;
    while (parent[v] != v) {
      ph += pot[v];
      v = parent[v];
    }
    // compress
    int root = v, acc = ph;
    v = u;
    while (parent[v] != v) {
      int next = parent[v], p = pot[v];
      parent[v] = root;
      pot[v] = ((acc % 4) + 4) % 4;
      acc -= p;
      v = next;
    }
    return {root, ((ph % 4) + 4) % 4};
  }
  // c_u = i^k c_w
  void unite(int u, int w, int k) {
    auto [ru, pu] = find(u);
    auto [rw, pw] = find(w);
    int rel = (((k + pw - pu) % 4) + 4) % 4;
    if (ru == rw) {
      if (rel != 0) zero[ru] = 1;
      return;
    }
    parent[ru] = rw;
    pot[ru] = rel;
    zero[rw] = zero[rw] | zero[ru];
  }
  void kill(int u) { zero[find(u).first] = 1; }
};

std::vector<PauliString> group_strings(const Subspace& V) {
  std::vector<PauliString> out{PauliString{}};
  for (const auto& b : V.basis()) {
    size_t n = out.size();
    for (size_t i = 0; i < n; ++i) out.push_back(out[i] ^ b);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

IntertwinerSpace intertwiner_space(const CovariantCocycle& X, const CovariantCocycle& Y, size_t max_basis) {
  IntertwinerSpace out;
  const IndexPoset& P = X.P();
  const Net& net = X.net();
  if (&X.net() != &Y.net()) throw Error(ErrorKind::NetMismatch, "cocycles live on different nets");
  const int n = static_cast<int>(P.size());
  std::vector<std::vector<PauliString>> strings(n);
  std::vector<int> offset(n + 1, 0);
  for (int a = 0; a < n; ++a) {
    if (net.algebra(a).space.dim() > 20) {
      out.reason = "local algebra too large";
      return out;
    }
    strings[a] = group_strings(net.algebra(a).space);
    offset[a + 1] = offset[a] + static_cast<int>(strings[a].size());
  }
  auto index = [&](int a, const PauliString& s) -> int {
    auto it = std::lower_bound(strings[a].begin(), strings[a].end(), s);
    if (it == strings[a].end() || *it != s) return -1;
    return offset[a] + static_cast<int>(it - strings[a].begin());
  };

  PhaseUnionFind uf(offset[n]);
  const int G = static_cast<int>(P.action.size());
  for (const auto& b : canonical_edges(P)) {
    for (int g = 0; g < G; ++g) {
      PauliElement xv = X.value(b, g), yv = Y.value(b, g);
      if (!xv.is_monomial() || !yv.is_monomial()) {
        out.reason = "values are not single Pauli strings";
        return out;
      }
      auto kx = unit_phase(xv.terms()[0].second), ky = unit_phase(yv.terms()[0].second);
      if (!kx || !ky) {
        out.reason = "phases outside {1, i, -1, -i}";
        return out;
      }
      const PauliString& Sx = xv.terms()[0].first;
      const PauliString& Sy = yv.terms()[0].first;
      int L = P.action[g][b.d0()], R = b.d1();
      const auto& inv = net.rep[P.inverse[g]];
      const auto& fwd = net.rep[g];
      // α⁻¹(s) X = Y r  with  r = α⁻¹(s) ⊕ Sx ⊕ Sy
      for (const auto& s : strings[L]) {
        PauliString u = s.permuted(inv);
        PauliString r = u ^ Sx ^ Sy;
        int us = index(L, s), ur = index(R, r);
        if (ur < 0) {
          uf.kill(us);
          continue;
        }
        int k = *ky + Sy.product_phase(r) - *kx - u.product_phase(Sx);
        uf.unite(us, ur, k);
      }
      for (const auto& r : strings[R]) {
        PauliString s = (r ^ Sx ^ Sy).permuted(fwd);
        if (index(L, s) < 0) uf.kill(index(R, r));
      }
    }
  }

  std::map<int, size_t> roots;  // root -> basis slot
  for (int u = 0; u < offset[n]; ++u) {
    auto [r, ph] = uf.find(u);
    if (uf.zero[r]) continue;
    if (!roots.count(r)) {
      roots[r] = roots.size();
      ++out.dim;
    }
  }
  out.computed = true;
  std::vector<std::vector<std::vector<PauliElement::Term>>> fields;
  for (int a = 0; a < n; ++a)
    for (size_t i = 0; i < strings[a].size(); ++i) {
      int u = offset[a] + static_cast<int>(i);
      auto [r, ph] = uf.find(u);
      if (uf.zero[r]) continue;
      size_t slot = roots[r];
      if (slot >= max_basis) continue;
      if (fields.size() <= slot) fields.resize(slot + 1, std::vector<std::vector<PauliElement::Term>>(n));
      fields[slot][a].emplace_back(strings[a][i], GaussQ::i_pow(ph));
    }
  for (auto& f : fields) {
    Intertwiner t{X, Y, {}};
    for (int a = 0; a < n; ++a) t.value.push_back(PauliElement::from_terms(std::move(f[a])));
    out.basis.push_back(std::move(t));
  }
  return out;
}

// ---- subobjects and direct sums ----------------------------------------------------

int inner_choice(const IndexPoset& P, int a) {
  for (size_t o = 0; o < P.size(); ++o)
    if (P.lt[o][a]) return static_cast<int>(o);
  return a;
}

Subobject subobject(const CovariantCocycle& X, const Intertwiner& e, const std::map<int, PauliElement>& witnesses) {
  const IndexPoset& P = X.P();
  const Net& net = X.net();
  if (e.value.size() != P.size()) throw Error(ErrorKind::ShapeMismatch, "projection does not cover the poset");
  for (const auto& v : e.value)
    if (!v.is_projection()) throw Error(ErrorKind::NotAProjection, v.str());
  if (!verify_intertwiner(e).holds) throw Error(ErrorKind::InvariantViolation, "projection is not in (X,X)");
  const PauliElement one(GaussQ(1));
  std::vector<PauliElement> w(P.size());
  for (size_t a = 0; a < P.size(); ++a) {
    int k = inner_choice(P, static_cast<int>(a));
    const PauliElement& E = e.value[k];
    PauliElement v;
    auto it = witnesses.find(static_cast<int>(a));
    if (it != witnesses.end())
      v = it->second;
    else if (E == one)
      v = one;
    else
      throw Error(ErrorKind::BorchersUnavailable, "no isometry supplied for " + P.elements[a]);
    if (!net.algebra(static_cast<int>(a)).contains(v) || v.adjoint() * v != one || v * v.adjoint() != E)
      throw Error(ErrorKind::WitnessInvalid, "witness for " + P.elements[a] + " is not an isometry onto e");
    w[a] = X.value(make_edge(P, k, static_cast<int>(a), static_cast<int>(a))) * v;
  }
  const Net* np = &net;
  auto f = [X, w, np](const Simplex& b, int g) {
    int L = np->P().action[g][b.d0()];
    return np->alpha_inv(g, w[L].adjoint()) * X.value(b, g) * w[b.d1()];
  };
  CovariantCocycle Y(X.net_ptr(), f, json{{"kind", "synthetic"}, {"construction", "subobject"}});
  return {Y, Intertwiner{Y, X, w}};
}

DirectSum direct_sum(const CovariantCocycle& X, const CovariantCocycle& Y,
                     const std::map<int, std::pair<PauliElement, PauliElement>>& witnesses) {
  const IndexPoset& P = X.P();
  const Net& net = X.net();
  if (&X.net() != &Y.net()) throw Error(ErrorKind::NetMismatch, "cocycles live on different nets");
  const PauliElement one(GaussQ(1));
  std::vector<PauliElement> v(P.size()), w(P.size());
  for (size_t a = 0; a < P.size(); ++a) {
    auto it = witnesses.find(static_cast<int>(a));
    if (it == witnesses.end()) throw Error(ErrorKind::BorchersUnavailable, "no isometries supplied for " + P.elements[a]);
    const auto& [va, wa] = it->second;
    const auto& alg = net.algebra(static_cast<int>(a));
    if (!alg.contains(va) || !alg.contains(wa) || va.adjoint() * va != one || wa.adjoint() * wa != one ||
        va * va.adjoint() + wa * wa.adjoint() != one)
      throw Error(ErrorKind::WitnessInvalid, "isometries for " + P.elements[a] + " do not split the identity");
    v[a] = va;
    w[a] = wa;
  }
  const Net* np = &net;
  auto f = [X, Y, v, w, np](const Simplex& b, int g) {
    int L = np->P().action[g][b.d0()], R = b.d1();
    return np->alpha_inv(g, v[L]) * X.value(b, g) * v[R].adjoint() + np->alpha_inv(g, w[L]) * Y.value(b, g) * w[R].adjoint();
  };
  CovariantCocycle Z(X.net_ptr(), f, json{{"kind", "synthetic"}, {"construction", "direct_sum"}});
  return {Z, Intertwiner{X, Z, v}, Intertwiner{Y, Z, w}};
}

// ---- tensor structure ---------------------------------------------------------------

CovariantCocycle tensor(const CovariantCocycle& X, const CovariantCocycle& Y) {
  if (&X.net() != &Y.net()) throw Error(ErrorKind::NetMismatch, "cocycles live on different nets");
  auto f = [X, Y](const Simplex& b, int g) { return X.value(b, g) * rho(X, b.d1(), b.support, Y.value(b, g)); };
  return CovariantCocycle(X.net_ptr(), f,
                          json{{"kind", "synthetic"}, {"construction", "tensor"}, {"left", X.provenance()},
                               {"right", Y.provenance()}});
}

Intertwiner tensor_arrows(const Intertwiner& t, const Intertwiner& s) {
  if (&t.source.net() != &s.source.net()) throw Error(ErrorKind::NetMismatch, "arrows live on different nets");
  Intertwiner r{tensor(t.source, s.source), tensor(t.target, s.target), {}};
  for (size_t a = 0; a < t.value.size(); ++a)
    r.value.push_back(t.value[a] * rho(t.source, static_cast<int>(a), static_cast<int>(a), s.value[a]));
  return r;
}

Path pad_path(const IndexPoset& P, const Path& p, size_t length, bool at_front) {
  Path out = p;
  while (out.edges.size() < length) {
    if (at_front)
      out.edges.insert(out.edges.begin(), make_edge(P, p.start, p.start, p.start));
    else
      out.edges.push_back(make_edge(P, p.end, p.end, p.end));
  }
  return out;
}

PauliElement extended_product(const CovariantCocycle& X, const CovariantCocycle& Y, const Path& p, const Path& q) {
  const IndexPoset& P = X.P();
  validate_path(P, p);
  validate_path(P, q);
  size_t n = std::max(p.length(), q.length());
  Path pp = pad_path(P, p, n), qq = pad_path(P, q, n);
  PauliElement out(GaussQ(1));
  for (size_t k = 0; k < n; ++k) {
    const Simplex& b = pp.edges[k];
    const Simplex& d = qq.edges[k];
    out = X.value(b) * rho(X, b.d1(), d.support, Y.value(d)) * out;
  }
  return out;
}

std::vector<PathPair> epsilon_paths(const IndexPoset& P, int a, size_t limit) {
  const int n = static_cast<int>(P.size());
  std::vector<int> dist(n);
  for (int o = 0; o < n; ++o) dist[o] = skeleton_distance(P, a, o);
  std::vector<std::array<int, 4>> cand;  // total, longer, o1, o2
  for (int o1 = 0; o1 < n; ++o1) {
    if (dist[o1] < 0) continue;
    for (int o2 = 0; o2 < n; ++o2)
      if (dist[o2] >= 0 && P.perp[o1][o2]) cand.push_back({dist[o1] + dist[o2], std::max(dist[o1], dist[o2]), o1, o2});
  }
  std::sort(cand.begin(), cand.end());
  std::vector<PathPair> out;
  if (cand.empty() || limit == 0) return out;
  // spread the picks over the sorted list so that distinct regions get used
  size_t take = std::min(limit, cand.size());
  for (size_t k = 0; k < take; ++k) {
    const auto& c = cand[k * cand.size() / take];
    out.push_back({canonical_path(P, a, c[2]), canonical_path(P, a, c[3])});
  }
  return out;
}

PauliElement epsilon(const CovariantCocycle& X, const CovariantCocycle& Y, int a, const PathPair& pq) {
  const IndexPoset& P = X.P();
  if (pq.p.start != a || pq.q.start != a) throw Error(ErrorKind::EndpointMismatch, "paths must start at " + P.elements[a]);
  if (!P.perp[pq.p.end][pq.q.end]) throw Error(ErrorKind::NoDisjointTargets, "path ends are not disjoint");
  return extended_product(Y, X, pq.q, pq.p).adjoint() * extended_product(X, Y, pq.p, pq.q);
}

PauliElement epsilon(const CovariantCocycle& X, const CovariantCocycle& Y, int a) {
  auto pairs = epsilon_paths(X.P(), a, 1);
  if (pairs.empty()) throw Error(ErrorKind::NoDisjointTargets, "no disjoint targets reachable from " + X.P().elements[a]);
  return epsilon(X, Y, a, pairs[0]);
}

Intertwiner epsilon_arrow(const CovariantCocycle& X, const CovariantCocycle& Y) {
  Intertwiner r{tensor(X, Y), tensor(Y, X), {}};
  for (size_t a = 0; a < X.P().size(); ++a) r.value.push_back(epsilon(X, Y, static_cast<int>(a)));
  return r;
}

// ---- conjugates and statistics -------------------------------------------------------

CovariantCocycle roberts_conjugate(const CovariantCocycle& X) {
  const IndexPoset* P = &X.P();
  auto f = [X, P](const Simplex& b, int g) {
    if (g != P->identity) throw Error(ErrorKind::InvariantViolation, "the Roberts conjugate has no covariant values");
    int a = disjoint_partner(*P, b.support);
    if (a < 0) throw Error(ErrorKind::NoDisjointTargets, "nothing is disjoint from " + P->elements[b.support]);
    return X.transport(a, b.d0()) * X.transport(b.d1(), a);
  };
  return CovariantCocycle(X.net_ptr(), f, json{{"kind", "synthetic"}, {"construction", "roberts_conjugate"}});
}

StatisticsReport statistics(const CovariantCocycle& X, const StatisticsOptions& opt) {
  const IndexPoset& P = X.P();
  StatisticsReport r;
  AxiomReport local;
  const AxiomReport* ax = opt.axioms;
  if (!ax) {
    AxiomBudget b;
    b.check_k7 = false;
    local = check_axioms(P, b);
    ax = &local;
  }
  r.annotated = ax->at("K6").verdict == Verdict::Fails;

  std::set<std::string> distinct;
  std::optional<PauliElement> first;
  bool all_same = true;
  size_t limit = opt.elements ? std::min(opt.elements, P.size()) : P.size();
  for (size_t a = 0; a < limit; ++a) {
    std::optional<PauliElement> here;
    for (const auto& pq : epsilon_paths(P, static_cast<int>(a), opt.path_pairs)) {
      PauliElement e = epsilon(X, X, static_cast<int>(a), pq);
      ++r.samples;
      distinct.insert(e.str());
      if (!here) here = e;
      if (e != *here) r.path_dependent = true;
      if (!first) first = e;
      if (e != *first) all_same = false;
    }
  }
  r.values.assign(distinct.begin(), distinct.end());
  if (!first) {
    r.note = "no element has disjoint targets";
    return r;
  }
  const PauliElement plus(GaussQ(1)), minus(GaussQ(-1));
  r.simple = all_same && (*first == plus || *first == minus);
  if (r.annotated)
    r.note = "K6 fails on this poset: path independence is observed on the sampled pairs, not guaranteed";
  if (r.simple) {
    r.chi = *first == plus ? 1 : -1;
    // φ(ε)_a = ρ̄^a_a(ε_a) = (χ/d) 1
    CovariantCocycle bar = roberts_conjugate(X);
    PauliElement phi = rho(bar, 0, 0, *first);
    if (phi.is_scalar() && !phi.is_zero()) {
      GaussQ d = GaussQ(*r.chi) / phi.scalar_part();
      if (d.im == 0 && d.re > 0 && d.re.get_den() == 1) r.dimension = d.re.get_num().get_si();
    }
  }
  if (opt.irreducibility) {
    auto space = intertwiner_space(X, X, 1);
    r.irreducibility_computed = space.computed;
    r.irreducible = space.computed && space.dim == 1;
  }
  return r;
}

CovariantCocycle conjugate(const CovariantCocycle& X, const StatisticsOptions& opt) {
  StatisticsOptions o = opt;
  o.irreducibility = false;
  StatisticsReport s = statistics(X, o);
  if (s.path_dependent) {
    std::string vals;
    for (const auto& v : s.values) vals += (vals.empty() ? "" : " | ") + v;
    throw Error(ErrorKind::PathDependent, "ε(X,X) depends on the paths: " + vals);
  }
  if (!s.simple) throw Error(ErrorKind::NotSimple, s.values.empty() ? s.note : "ε(X,X) = " + s.values.front());
  CovariantCocycle bar = roberts_conjugate(X);
  auto f = [X, bar](const Simplex& b, int g) { return rho(bar, b.d1(), b.support, X.value(b, g).adjoint()); };
  return CovariantCocycle(X.net_ptr(), f, json{{"kind", "synthetic"}, {"construction", "conjugate"}, {"of", X.provenance()}});
}

Intertwiner left_inverse(const CovariantCocycle& X, const Intertwiner& t, const CovariantCocycle& Z,
                         const CovariantCocycle& Y) {
  CovariantCocycle bar = roberts_conjugate(X);
  Intertwiner r{Z, Y, {}};
  for (size_t a = 0; a < t.value.size(); ++a)
    r.value.push_back(rho(bar, static_cast<int>(a), static_cast<int>(a), t.value[a]));
  return r;
}

CheckResult check_conjugate_equations(const CovariantCocycle& X, const CovariantCocycle& Xbar, const Intertwiner& r,
                                      const Intertwiner& rbar) {
  CheckResult res;
  res.check = "conjugate_equations";
  auto fail = [&](const std::string& why) {
    res.holds = false;
    res.witness = json{{"reason", why}};
    return res;
  };
  CovariantCocycle I = identity_cocycle(X.net_ptr());
  res.instances = 4;
  if (!same_values(r.source, I) || !same_values(r.target, tensor(Xbar, X))) return fail("r is not in (ι, X̄⊗X)");
  if (!same_values(rbar.source, I) || !same_values(rbar.target, tensor(X, Xbar))) return fail("r̄ is not in (ι, X⊗X̄)");
  if (!verify_intertwiner(r).holds) return fail("r does not intertwine");
  if (!verify_intertwiner(rbar).holds) return fail("r̄ does not intertwine");
  try {
    Intertwiner lhs = compose(tensor_arrows(adjoint(rbar), identity_arrow(X)), tensor_arrows(identity_arrow(X), r));
    Intertwiner rhs =
        compose(tensor_arrows(adjoint(r), identity_arrow(Xbar)), tensor_arrows(identity_arrow(Xbar), rbar));
    for (size_t a = 0; a < X.P().size(); ++a) {
      if (lhs.value[a] != PauliElement(GaussQ(1))) return fail("first equation fails at " + X.P().elements[a]);
      if (rhs.value[a] != PauliElement(GaussQ(1))) return fail("second equation fails at " + X.P().elements[a]);
    }
  } catch (const Error& e) {
    return fail(e.what());
  }
  return res;
}

// ---- serialization ---------------------------------------------------------------

std::string simplex_key(const IndexPoset& P, const Simplex& b) {
  return P.elements[b.d1()] + "|" + P.elements[b.d0()] + "|" + P.elements[b.support];
}

json cocycle_to_json(const CovariantCocycle& X) {
  const IndexPoset& P = X.P();
  json values = json::object();
  for (const auto& b : canonical_edges(P))
    for (size_t g = 0; g < P.action.size(); ++g)
      values[P.group_ids[g] + "/" + simplex_key(P, b)] = X.value(b, static_cast<int>(g)).str();
  return json{{"net", net_to_json(X.net())}, {"values", values}, {"provenance", X.provenance()}};
}

CovariantCocycle cocycle_from_json(std::shared_ptr<const Net> net, const json& j) {
  const IndexPoset& P = net->P();
  std::map<std::pair<int, Simplex>, PauliElement> values;
  for (const auto& [key, text] : j.at("values").items()) {
    // group ids may contain '/', so try every split
    int g = -1;
    std::string rest;
    for (size_t pos = key.find('/'); pos != std::string::npos; pos = key.find('/', pos + 1)) {
      auto it = std::find(P.group_ids.begin(), P.group_ids.end(), key.substr(0, pos));
      if (it != P.group_ids.end()) {
        g = static_cast<int>(it - P.group_ids.begin());
        rest = key.substr(pos + 1);
        break;
      }
    }
    if (g < 0) throw Error(ErrorKind::UnknownSymmetry, "no symmetry prefix in '" + key + "'");
    size_t b1 = rest.find('|'), b2 = rest.find('|', b1 == std::string::npos ? b1 : b1 + 1);
    if (b1 == std::string::npos || b2 == std::string::npos) throw Error(ErrorKind::ParseError, "bad simplex key '" + key + "'");
    int from = P.index_of(rest.substr(0, b1));
    int to = P.index_of(rest.substr(b1 + 1, b2 - b1 - 1));
    int sup = P.index_of(rest.substr(b2 + 1));
    values[{g, make_edge(P, from, to, sup)}] = PauliElement::parse(text.get<std::string>());
  }
  json prov = j.value("provenance", json{{"kind", "synthetic"}});
  return table_cocycle(std::move(net), std::move(values), prov);
}

json check_to_json(const CheckResult& c) {
  json j = {{"check", c.check}, {"instances_checked", c.instances}, {"verdict", c.holds ? "holds" : "fails"}};
  if (!c.holds) j["witness"] = c.witness;
  return j;
}

json cocycle_report_to_json(const CocycleReport& r) {
  json a = json::array();
  for (const auto& c : r.checks) a.push_back(check_to_json(c));
  return a;
}

json statistics_to_json(const StatisticsReport& s) {
  json j = {{"simple", s.simple},
            {"chi", s.chi ? json(*s.chi) : json("undefined")},
            {"dimension", s.dimension ? json(*s.dimension) : json("unknown")},
            {"samples", s.samples},
            {"path_dependence", {{"varies", s.path_dependent}, {"annotated", s.annotated}, {"values", s.values}}}};
  if (s.irreducibility_computed) j["irreducible"] = s.irreducible;
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

}  // namespace sectorkit
