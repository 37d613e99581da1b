#include "sectorkit/poset.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "sectorkit/error.hpp"
#include "sectorkit/fpgroup.hpp"
#include "sectorkit/smith.hpp"

namespace sectorkit {

int IndexPoset::index_of(const std::string& id) const {
  auto it = std::lower_bound(elements.begin(), elements.end(), id);
  if (it == elements.end() || *it != id) throw Error(ErrorKind::UnknownElement, id);
  return static_cast<int>(it - elements.begin());
}

int IndexPoset::group_index(const std::string& id) const {
  for (size_t g = 0; g < group_ids.size(); ++g)
    if (group_ids[g] == id) return static_cast<int>(g);
  throw Error(ErrorKind::UnknownSymmetry, id);
}

namespace {

BitMatrix square(size_t n) { return BitMatrix(n, std::vector<uint8_t>(n, 0)); }

// Group law from the permutation action; `same` decides equality of two
// group elements (permutation equality unless symmetry data says more).
void tabulate_group(IndexPoset& P) {
  size_t G = P.action.size(), n = P.size();
  if (G == 0) {
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    P.action = {id};
    P.group_ids = {"e"};
    G = 1;
  }
  auto find = [&](const std::vector<int>& perm, const Symmetry* sym) -> int {
    for (size_t g = 0; g < G; ++g) {
      if (sym && !P.symmetries.empty()) {
        if (P.symmetries[g].same_action(*sym)) return static_cast<int>(g);
      } else if (P.action[g] == perm) {
        return static_cast<int>(g);
      }
    }
    return -1;
  };
  P.mult.assign(G, std::vector<int>(G, -1));
  for (size_t g = 0; g < G; ++g)
    for (size_t h = 0; h < G; ++h) {
      std::vector<int> perm(n);
      for (size_t i = 0; i < n; ++i) perm[i] = P.action[g][P.action[h][i]];
      int k;
      if (!P.symmetries.empty()) {
        Symmetry c = P.symmetries[g].compose(P.symmetries[h]);
        k = find(perm, &c);
      } else {
        k = find(perm, nullptr);
      }
      if (k < 0) throw Error(ErrorKind::InvariantViolation, "group not closed: " + P.group_ids[g] + "∘" + P.group_ids[h]);
      P.mult[g][h] = k;
    }
  P.identity = -1;
  for (size_t g = 0; g < G && P.identity < 0; ++g) {
    bool is_id = true;
    for (size_t h = 0; h < G && is_id; ++h) is_id = P.mult[g][h] == static_cast<int>(h) && P.mult[h][g] == static_cast<int>(h);
    if (is_id) P.identity = static_cast<int>(g);
  }
  if (P.identity < 0) throw Error(ErrorKind::InvariantViolation, "group has no identity");
  P.inverse.assign(G, -1);
  for (size_t g = 0; g < G; ++g)
    for (size_t h = 0; h < G; ++h)
      if (P.mult[g][h] == P.identity) P.inverse[g] = static_cast<int>(h);
  for (size_t g = 0; g < G; ++g)
    if (P.inverse[g] < 0) throw Error(ErrorKind::InvariantViolation, "no inverse for " + P.group_ids[g]);
}

[[noreturn]] void violation(const IndexPoset& P, const std::string& what, int a, int b) {
  throw Error(ErrorKind::InvariantViolation, what + " at (" + P.elements[a] + ", " + P.elements[b] + ")");
}

}  // namespace

void validate_poset(const IndexPoset& P) {
  size_t n = P.size();
  for (size_t i = 0; i < n; ++i) {
    if (!P.leq[i][i]) violation(P, "leq not reflexive", i, i);
    if (P.lt[i][i]) violation(P, "lt not irreflexive", i, i);
    if (P.perp[i][i]) violation(P, "perp reflexive", i, i);
    for (size_t j = 0; j < n; ++j) {
      if (i != j && P.leq[i][j] && P.leq[j][i]) violation(P, "leq not antisymmetric", i, j);
      if (P.lt[i][j] && !P.leq[i][j]) violation(P, "lt not inside leq", i, j);
      if (P.perp[i][j] != P.perp[j][i]) violation(P, "perp not symmetric", i, j);
    }
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (!P.leq[i][j]) continue;
      for (size_t k = 0; k < n; ++k) {
        if (P.leq[j][k] && !P.leq[i][k]) violation(P, "leq not transitive", i, k);
        // K2 with ô = i, o = j, a = k
        if (P.perp[j][k] && !P.perp[i][k]) violation(P, "perp not inherited by subregion (K2)", i, k);
      }
    }
  for (size_t g = 0; g < P.action.size(); ++g) {
    const auto& s = P.action[g];
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (P.leq[i][j] != P.leq[s[i]][s[j]] || P.lt[i][j] != P.lt[s[i]][s[j]] || P.perp[i][j] != P.perp[s[i]][s[j]])
          violation(P, "symmetry " + P.group_ids[g] + " does not preserve relations", i, j);
  }
}

IndexPoset build_poset(const RegionFamily& family) {
  if (family.regions.empty()) throw Error(ErrorKind::EmptyFamily, "no regions");
  size_t n = family.regions.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return family.regions[a].id < family.regions[b].id; });

  IndexPoset P;
  for (size_t i : order) {
    P.regions.push_back(family.regions[i]);
    P.elements.push_back(family.regions[i].id);
    if (!family.level.empty()) P.level.push_back(family.level[i]);
    P.collar.push_back(family.collar.empty() ? 0 : family.collar[i]);
  }
  P.num_levels = family.num_levels;
  for (size_t i = 1; i < n; ++i)
    if (P.elements[i] == P.elements[i - 1]) violation(P, "duplicate id", i, i - 1);

  std::map<std::string, int> by_key;
  for (size_t i = 0; i < n; ++i)
    if (!by_key.emplace(P.regions[i].key(), static_cast<int>(i)).second) violation(P, "duplicate region", i, by_key[P.regions[i].key()]);

  P.leq = square(n);
  P.lt = square(n);
  P.perp = square(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      P.leq[i][j] = contained_in(P.regions[i], P.regions[j]);
      P.lt[i][j] = includes(P.regions[i], P.regions[j]);
      if (j > i) P.perp[i][j] = P.perp[j][i] = causally_disjoint(P.regions[i], P.regions[j]);
    }

  for (const auto& s : family.group) {
    std::vector<int> perm(n);
    for (size_t i = 0; i < n; ++i) {
      auto it = by_key.find(act(s, P.regions[i]).key());
      if (it == by_key.end()) throw Error(ErrorKind::NotClosed, s.id + " maps " + P.elements[i] + " outside the sample");
      perm[i] = it->second;
    }
    P.group_ids.push_back(s.id);
    P.symmetries.push_back(s);
    P.action.push_back(std::move(perm));
  }
  tabulate_group(P);
  validate_poset(P);
  return P;
}

IndexPoset make_poset(std::vector<std::string> ids, const BitMatrix& leq, const BitMatrix& lt, const BitMatrix& perp,
                      std::vector<std::string> group_ids, std::vector<std::vector<int>> perm, bool validate) {
  size_t n = ids.size();
  if (n == 0) throw Error(ErrorKind::EmptyFamily, "no elements");
  auto shape_ok = [n](const BitMatrix& m) {
    if (m.size() != n) return false;
    for (const auto& r : m)
      if (r.size() != n) return false;
    return true;
  };
  if (!shape_ok(leq) || !shape_ok(lt) || !shape_ok(perp)) throw Error(ErrorKind::ShapeMismatch, "relation matrices must be n x n");
  if (group_ids.size() != perm.size()) throw Error(ErrorKind::ShapeMismatch, "one permutation per group element");

  std::vector<int> order(n), pos(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return ids[a] < ids[b]; });
  for (size_t i = 0; i < n; ++i) pos[order[i]] = static_cast<int>(i);

  IndexPoset P;
  for (int i : order) P.elements.push_back(ids[i]);
  for (size_t i = 1; i < n; ++i)
    if (P.elements[i] == P.elements[i - 1]) throw Error(ErrorKind::InvariantViolation, "duplicate id " + P.elements[i]);
  P.leq = square(n);
  P.lt = square(n);
  P.perp = square(n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      P.leq[pos[i]][pos[j]] = leq[i][j] ? 1 : 0;
      P.lt[pos[i]][pos[j]] = lt[i][j] ? 1 : 0;
      P.perp[pos[i]][pos[j]] = perp[i][j] ? 1 : 0;
    }
  for (size_t g = 0; g < perm.size(); ++g) {
    if (perm[g].size() != n) throw Error(ErrorKind::ShapeMismatch, "permutation length");
    std::vector<int> p(n, -1);
    for (size_t i = 0; i < n; ++i) {
      int t = perm[g][i];
      if (t < 0 || static_cast<size_t>(t) >= n) throw Error(ErrorKind::IndexOutOfRange, "permutation entry");
      p[pos[i]] = pos[t];
    }
    std::vector<int> seen(p);
    std::sort(seen.begin(), seen.end());
    for (size_t i = 0; i < n; ++i)
      if (seen[i] != static_cast<int>(i)) throw Error(ErrorKind::InvariantViolation, group_ids[g] + " is not a permutation");
    P.group_ids.push_back(group_ids[g]);
    P.action.push_back(std::move(p));
  }
  P.collar.assign(n, 0);
  tabulate_group(P);
  if (validate) validate_poset(P);
  return P;
}

std::vector<int> causal_complement(const IndexPoset& P, int o) {
  if (o < 0 || static_cast<size_t>(o) >= P.size()) throw Error(ErrorKind::UnknownElement, "index " + std::to_string(o));
  std::vector<int> out;
  for (size_t a = 0; a < P.size(); ++a)
    if (P.perp[o][a]) out.push_back(static_cast<int>(a));
  return out;
}

std::vector<std::string> causal_complement(const IndexPoset& P, const std::string& o) {
  std::vector<std::string> out;
  for (int a : causal_complement(P, P.index_of(o))) out.push_back(P.elements[a]);
  return out;
}

// ---- canonical simplices ------------------------------------------------------

int canonical_support(const IndexPoset& P, const std::vector<int>& elems) {
  size_t n = P.size();
  std::vector<int> ub;
  for (size_t u = 0; u < n; ++u) {
    bool ok = true;
    for (int e : elems) ok = ok && P.leq[e][u];
    if (ok) ub.push_back(static_cast<int>(u));
  }
  for (int u : ub) {
    bool minimal = true;
    for (int v : ub)
      if (v != u && P.leq[v][u]) {
        minimal = false;
        break;
      }
    if (minimal) return u;
  }
  return -1;
}

namespace {

const std::vector<std::vector<int>>& edge_table(const IndexPoset& P) {
  std::call_once(P.edge_cache->once, [&] {
    size_t n = P.size();
    auto& t = P.edge_cache->support;
    t.assign(n, std::vector<int>(n, -1));
    for (size_t a = 0; a < n; ++a)
      for (size_t b = a; b < n; ++b) {
        int s;
        if (P.leq[a][b]) s = static_cast<int>(b);
        else if (P.leq[b][a]) s = static_cast<int>(a);
        else s = canonical_support(P, {static_cast<int>(a), static_cast<int>(b)});
        t[a][b] = t[b][a] = s;
      }
  });
  return P.edge_cache->support;
}

}  // namespace

std::optional<int> edge_support(const IndexPoset& P, int d1, int d0) {
  int s = edge_table(P)[d1][d0];
  if (s < 0) return std::nullopt;
  return s;
}

std::optional<int> triangle_support(const IndexPoset& P, int v0, int v1, int v2) {
  const auto& t = edge_table(P);
  int a = t[v1][v2], b = t[v0][v2], c = t[v0][v1];
  if (a < 0 || b < 0 || c < 0) return std::nullopt;
  int s = canonical_support(P, {a, b, c});
  if (s < 0) return std::nullopt;
  return s;
}

std::vector<int> components(const IndexPoset& P, const std::vector<uint8_t>* mask) {
  size_t n = P.size();
  std::vector<int> comp(n, -1);
  int next = 0;
  for (size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0 || (mask && !(*mask)[s])) continue;
    std::vector<int> stack{static_cast<int>(s)};
    comp[s] = next;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (size_t b = 0; b < n; ++b)
        if (comp[b] < 0 && (!mask || (*mask)[b]) && P.comparable(a, b)) {
          comp[b] = next;
          stack.push_back(static_cast<int>(b));
        }
    }
    ++next;
  }
  return comp;
}

// ---- axioms -------------------------------------------------------------------

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::HoldsRelative: return "holds-relative-to-sample";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

const AxiomResult& AxiomReport::at(const std::string& axiom) const {
  for (const auto& r : results)
    if (r.axiom == axiom) return r;
  throw Error(ErrorKind::UnknownElement, "no verdict for " + axiom);
}

bool complement_connected(const IndexPoset& P, int o, std::vector<int>* split) {
  std::vector<uint8_t> mask(P.size());
  for (size_t a = 0; a < P.size(); ++a) mask[a] = P.perp[o][a];
  auto comp = components(P, &mask);
  int first = -1;
  for (size_t a = 0; a < P.size(); ++a) {
    if (!mask[a]) continue;
    if (first < 0) {
      first = static_cast<int>(a);
    } else if (comp[a] != comp[first]) {
      if (split) *split = {first, static_cast<int>(a)};
      return false;
    }
  }
  return true;
}

namespace {

bool at_level(const IndexPoset& P, int o, int lv) { return !P.level.empty() && P.level[o] == lv; }

bool has_common_complement(const IndexPoset& P, int a, int b) {
  for (size_t c = 0; c < P.size(); ++c)
    if (P.perp[a][c] && P.perp[b][c]) return true;
  return false;
}

// K4 at (o, a); on success returns true
bool k4_pair(const IndexPoset& P, int o, int a) {
  if (P.perp[o][a]) return has_common_complement(P, o, a);
  for (size_t t = 0; t < P.size(); ++t)
    if (P.lt[t][o] && has_common_complement(P, static_cast<int>(t), a)) return true;
  return false;
}

std::vector<std::string> ids(const IndexPoset& P, std::initializer_list<int> v) {
  std::vector<std::string> out;
  for (int i : v) out.push_back(P.elements[i]);
  return out;
}

AxiomResult check_k1(const IndexPoset& P) {
  AxiomResult r{"K1"};
  int truncated = 0;
  for (size_t o = 0; o < P.size(); ++o) {
    bool sub = false, sup = false;
    for (size_t x = 0; x < P.size(); ++x) {
      sub = sub || P.lt[x][o];
      sup = sup || P.lt[o][x];
    }
    bool sub_exempt = !sub && at_level(P, o, 0);
    bool sup_exempt = !sup && at_level(P, o, P.num_levels - 1);
    if ((!sub && !sub_exempt) || (!sup && !sup_exempt)) {
      r.verdict = Verdict::Fails;
      r.witness = ids(P, {static_cast<int>(o)});
      r.note = !sub ? "no proper subelement" : "no proper superelement";
      return r;
    }
    if (sub_exempt || sup_exempt) ++truncated;
  }
  if (truncated) {
    r.verdict = Verdict::HoldsRelative;
    r.note = std::to_string(truncated) + " elements at the extreme scales of the sample lack a smaller or larger element";
  }
  return r;
}

AxiomResult check_k2(const IndexPoset& P) {
  AxiomResult r{"K2"};
  size_t n = P.size();
  for (size_t o = 0; o < n; ++o)
    for (size_t a = 0; a < n; ++a) {
      if (!P.perp[o][a]) continue;
      for (size_t h = 0; h < n; ++h)
        if (P.leq[h][o] && !P.perp[h][a]) {
          r.verdict = Verdict::Fails;
          r.witness = ids(P, {static_cast<int>(o), static_cast<int>(a), static_cast<int>(h)});
          return r;
        }
    }
  return r;
}

bool in_core(const IndexPoset& P, size_t a) { return P.collar.empty() || !P.collar[a]; }

AxiomResult check_k3(const IndexPoset& P) {
  AxiomResult r{"K3", Verdict::HoldsRelative};
  size_t n = P.size();
  for (size_t o = 0; o < n; ++o) {
    if (!in_core(P, o)) continue;
    auto comp = causal_complement(P, static_cast<int>(o));
    for (size_t x = 0; x < n; ++x) {
      if (!in_core(P, x)) continue;
      bool in_bicomplement = true;
      for (int a : comp) in_bicomplement = in_bicomplement && P.perp[x][a];
      if (in_bicomplement != static_cast<bool>(P.leq[x][o])) {
        r.verdict = Verdict::Fails;
        r.witness = ids(P, {static_cast<int>(o), static_cast<int>(x)});
        r.note = in_bicomplement ? "in o^⊥⊥ but not below o" : "below o but not in o^⊥⊥";
        return r;
      }
    }
  }
  r.note = "quantifiers range over the sample only";
  return r;
}

AxiomResult check_k4(const IndexPoset& P) {
  AxiomResult r{"K4"};
  int truncated = 0;
  for (size_t o = 0; o < P.size(); ++o)
    for (size_t a = 0; a < P.size(); ++a) {
      if (k4_pair(P, o, a)) continue;
      if (!P.perp[o][a] && at_level(P, o, 0)) {
        ++truncated;
        continue;
      }
      r.verdict = Verdict::Fails;
      r.witness = ids(P, {static_cast<int>(o), static_cast<int>(a)});
      r.note = P.perp[o][a] ? "o ⊥ a but o^⊥ ∩ a^⊥ is empty" : "no smaller õ ⊂ o with õ^⊥ ∩ a^⊥ nonempty";
      return r;
    }
  if (truncated) {
    r.verdict = Verdict::HoldsRelative;
    r.note = std::to_string(truncated) + " pairs need an element below the smallest sampled scale";
  }
  return r;
}

AxiomResult check_k5(const IndexPoset& P) {
  AxiomResult r{"K5"};
  size_t n = P.size();
  for (size_t g = 0; g < P.action.size(); ++g) {
    const auto& s = P.action[g];
    for (size_t a = 0; a < n; ++a)
      for (size_t o = 0; o < n; ++o)
        if ((P.lt[a][o] && !P.lt[s[a]][s[o]]) || (P.perp[a][o] && !P.perp[s[a]][s[o]])) {
          r.verdict = Verdict::Fails;
          r.witness = {P.group_ids[g], P.elements[a], P.elements[o]};
          return r;
        }
  }
  return r;
}

// With a collar, o ranges over the core and only the core part of o^⊥ has to
// lie in one path component; collar elements may serve as connectors.
AxiomResult check_k6(const IndexPoset& P) {
  AxiomResult r{"K6"};
  bool relative = std::any_of(P.collar.begin(), P.collar.end(), [](uint8_t c) { return c != 0; });
  size_t n = P.size();
  auto comp = components(P);
  int ref = -1;
  for (size_t a = 0; a < n; ++a) {
    if (!in_core(P, a)) continue;
    if (ref < 0) ref = static_cast<int>(a);
    else if (comp[a] != comp[ref]) {
      r.verdict = Verdict::Fails;
      r.witness = ids(P, {ref, static_cast<int>(a)});
      r.note = "poset not pathwise connected";
      return r;
    }
  }
  for (size_t o = 0; o < n; ++o) {
    if (!in_core(P, o)) continue;
    std::vector<uint8_t> mask(n);
    for (size_t a = 0; a < n; ++a) mask[a] = P.perp[o][a];
    auto cc = components(P, &mask);
    int first = -1;
    for (size_t a = 0; a < n; ++a) {
      if (!mask[a] || !in_core(P, a)) continue;
      if (first < 0) {
        first = static_cast<int>(a);
      } else if (cc[a] != cc[first]) {
        r.verdict = Verdict::Fails;
        r.witness = ids(P, {static_cast<int>(o), first, static_cast<int>(a)});
        r.note = "causal complement of the first element is not pathwise connected";
        return r;
      }
    }
  }
  if (relative) {
    r.verdict = Verdict::HoldsRelative;
    r.note = "checked on the core of the sample; collar elements act as connectors only";
  }
  return r;
}

std::vector<std::string> loop_ids(const IndexPoset& P, const std::vector<int>& loop) {
  std::vector<std::string> out;
  for (int v : loop) out.push_back(P.elements[v]);
  return out;
}

AxiomResult check_k7(const IndexPoset& P, const AxiomBudget& budget) {
  AxiomResult r{"K7", Verdict::Unknown};
  if (!budget.check_k7) {
    r.note = "not requested";
    return r;
  }
  auto comp = components(P);
  for (size_t a = 1; a < P.size(); ++a)
    if (comp[a] != comp[0]) {
      r.verdict = Verdict::Fails;
      r.witness = ids(P, {0, static_cast<int>(a)});
      r.note = "poset not pathwise connected";
      return r;
    }
  auto res = pi1_trivial(P, 0, budget.coset_rows);
  switch (res.verdict) {
    case Pi1Verdict::Trivial: r.verdict = Verdict::Holds; break;
    case Pi1Verdict::Nontrivial:
      r.verdict = Verdict::Fails;
      r.witness = loop_ids(P, res.loop);
      r.note = "non-contractible loop";
      break;
    case Pi1Verdict::Unknown: r.note = "coset enumeration budget exhausted"; break;
  }
  return r;
}

}  // namespace

AxiomReport check_axioms(const IndexPoset& P, const AxiomBudget& budget) {
  AxiomReport rep;
  rep.results = {check_k1(P), check_k2(P), check_k3(P), check_k4(P), check_k5(P), check_k6(P), check_k7(P, budget)};
  return rep;
}

bool witness_confirms_failure(const IndexPoset& P, const AxiomResult& r) {
  if (r.verdict != Verdict::Fails) return false;
  std::vector<int> w;
  size_t from = r.axiom == "K5" ? 1 : 0;
  for (size_t i = from; i < r.witness.size(); ++i) w.push_back(P.index_of(r.witness[i]));
  size_t n = P.size();
  if (r.axiom == "K1") {
    if (w.size() != 1) return false;
    bool sub = false, sup = false;
    for (size_t x = 0; x < n; ++x) {
      sub = sub || P.lt[x][w[0]];
      sup = sup || P.lt[w[0]][x];
    }
    return !sub || !sup;
  }
  if (r.axiom == "K2") return w.size() == 3 && P.perp[w[0]][w[1]] && P.leq[w[2]][w[0]] && !P.perp[w[2]][w[1]];
  if (r.axiom == "K3") {
    if (w.size() != 2) return false;
    bool bi = true;
    for (size_t a = 0; a < n; ++a)
      if (P.perp[w[0]][a]) bi = bi && P.perp[w[1]][a];
    return bi != static_cast<bool>(P.leq[w[1]][w[0]]);
  }
  if (r.axiom == "K4") return w.size() == 2 && !k4_pair(P, w[0], w[1]);
  if (r.axiom == "K5") {
    if (w.size() != 2) return false;
    const auto& s = P.action[P.group_index(r.witness[0])];
    int a = w[0], o = w[1];
    return (P.lt[a][o] && !P.lt[s[a]][s[o]]) || (P.perp[a][o] && !P.perp[s[a]][s[o]]);
  }
  if (r.axiom == "K6") {
    if (w.size() == 2) return components(P)[w[0]] != components(P)[w[1]];
    if (w.size() != 3 || !P.perp[w[0]][w[1]] || !P.perp[w[0]][w[2]]) return false;
    std::vector<uint8_t> mask(n);
    for (size_t a = 0; a < n; ++a) mask[a] = P.perp[w[0]][a];
    auto comp = components(P, &mask);
    return comp[w[1]] != comp[w[2]];
  }
  if (r.axiom == "K7") {
    if (w.size() == 2) return components(P)[w[0]] != components(P)[w[1]];
    return false;  // loop witnesses are certified by pi1_trivial itself
  }
  return false;
}

// ---- homology -----------------------------------------------------------------

namespace {

struct Skeleton {
  std::vector<int> verts;                  // sorted
  std::vector<std::pair<int, int>> edges;  // a < b, non-degenerate canonical
  std::map<std::pair<int, int>, int> edge_index;
  std::vector<int> parent;                 // BFS tree, indexed by vertex (-1 for root / outside)
  std::vector<int> depth;
  std::vector<uint8_t> tree;               // per edge
  std::vector<std::array<int, 3>> triangles;  // a < b < c
};

Skeleton skeleton(const IndexPoset& P, const std::vector<int>& verts, int root) {
  Skeleton S;
  S.verts = verts;
  const auto& t = edge_table(P);
  size_t n = P.size();
  std::vector<uint8_t> in(n, 0);
  for (int v : verts) in[v] = 1;
  std::vector<std::vector<int>> adj(n);
  for (size_t i = 0; i < verts.size(); ++i)
    for (size_t j = i + 1; j < verts.size(); ++j) {
      int a = verts[i], b = verts[j];
      if (t[a][b] < 0) continue;
      S.edge_index[{a, b}] = static_cast<int>(S.edges.size());
      S.edges.push_back({a, b});
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  S.tree.assign(S.edges.size(), 0);
  S.parent.assign(n, -1);
  S.depth.assign(n, -1);
  std::queue<int> q;
  q.push(root);
  S.depth[root] = 0;
  while (!q.empty()) {
    int a = q.front();
    q.pop();
    for (int b : adj[a])
      if (S.depth[b] < 0) {
        S.depth[b] = S.depth[a] + 1;
        S.parent[b] = a;
        S.tree[S.edge_index[{std::min(a, b), std::max(a, b)}]] = 1;
        q.push(b);
      }
  }
  for (int a : verts)
    for (int b : adj[a]) {
      if (b <= a) continue;
      for (int c : adj[b]) {
        if (c <= b || t[a][c] < 0) continue;
        if (canonical_support(P, {t[a][b], t[b][c], t[a][c]}) >= 0) S.triangles.push_back({a, b, c});
      }
    }
  return S;
}

// tree path root -> v as a vertex list
std::vector<int> tree_path(const Skeleton& S, int v) {
  std::vector<int> p;
  for (int x = v; x >= 0; x = S.parent[x]) p.push_back(x);
  std::reverse(p.begin(), p.end());
  return p;
}

// root -> a -> b -> root
std::vector<int> fundamental_loop(const Skeleton& S, int edge) {
  auto [a, b] = S.edges[edge];
  auto pa = tree_path(S, a), pb = tree_path(S, b);
  std::vector<int> loop = pa;
  for (auto it = pb.rbegin(); it != pb.rend(); ++it) loop.push_back(*it);
  return loop;
}

}  // namespace

std::vector<H1Invariants> h1_components(const IndexPoset& P) {
  auto comp = components(P);
  int nc = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<H1Invariants> out;
  for (int c = 0; c < nc; ++c) {
    std::vector<int> verts;
    for (size_t v = 0; v < P.size(); ++v)
      if (comp[v] == c) verts.push_back(static_cast<int>(v));
    Skeleton S = skeleton(P, verts, verts.front());
    std::vector<int> col(S.edges.size(), -1);
    int ncols = 0;
    for (size_t e = 0; e < S.edges.size(); ++e)
      if (!S.tree[e]) col[e] = ncols++;
    IntRelations rel(ncols);
    for (const auto& t : S.triangles) {
      SparseRow row;
      auto add = [&](int a, int b, long s) {
        int e = col[S.edge_index.at({a, b})];
        if (e >= 0) row.push_back({e, s});
      };
      add(t[0], t[1], 1);
      add(t[1], t[2], 1);
      add(t[0], t[2], -1);
      rel.add_row(std::move(row));
    }
    auto inv = rel.abelian_invariants();
    H1Invariants h;
    h.rank = inv.rank;
    h.torsion = inv.torsion;
    for (int v : verts) h.component.push_back(P.elements[v]);
    out.push_back(std::move(h));
  }
  return out;
}

H1Invariants h1(const IndexPoset& P) {
  auto all = h1_components(P);
  if (all.size() != 1)
    throw Error(ErrorKind::Disconnected, "poset has " + std::to_string(all.size()) + " components; use h1_components");
  return all.front();
}

std::vector<H1Invariants> h1_components_all_supports(const IndexPoset& P, int support_cap) {
  const int n = static_cast<int>(P.size());
  auto uppers = [&](std::initializer_list<int> vs) {
    std::vector<int> out;
    for (int c = 0; c < n && static_cast<int>(out.size()) < support_cap; ++c) {
      bool ok = true;
      for (int v : vs) ok = ok && P.leq[v][c];
      if (ok) out.push_back(c);
    }
    return out;
  };
  // generators (a, b; c), a < b
  std::map<std::array<int, 3>, int> gen;
  std::vector<std::vector<int>> adj(n);
  std::map<std::pair<int, int>, std::vector<int>> sup;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      auto u = uppers({a, b});
      if (u.empty()) continue;
      sup[{a, b}] = u;
      for (int c : u) gen.emplace(std::array<int, 3>{a, b, c}, static_cast<int>(gen.size()));
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  std::vector<int> comp(n, -1);
  int nc = 0;
  std::vector<uint8_t> tree_gen(gen.size(), 0);
  for (int r = 0; r < n; ++r) {
    if (comp[r] >= 0) continue;
    std::queue<int> q;
    q.push(r);
    comp[r] = nc;
    while (!q.empty()) {
      int a = q.front();
      q.pop();
      for (int b : adj[a])
        if (comp[b] < 0) {
          comp[b] = nc;
          int lo = std::min(a, b), hi = std::max(a, b);
          tree_gen[gen.at({lo, hi, sup[{lo, hi}].front()})] = 1;
          q.push(b);
        }
    }
    ++nc;
  }
  std::vector<IntRelations> rel;
  std::vector<std::vector<int>> col(nc);
  std::vector<int> local(gen.size(), -1), owner(gen.size(), -1);
  for (const auto& [k, g] : gen) {
    int c = comp[k[0]];
    owner[g] = c;
    if (!tree_gen[g]) {
      local[g] = static_cast<int>(col[c].size());
      col[c].push_back(g);
    }
  }
  for (int c = 0; c < nc; ++c) rel.emplace_back(static_cast<int>(col[c].size()));
  auto add = [&](SparseRow& row, int g, long s) {
    if (local[g] >= 0) row.push_back({local[g], s});
  };
  for (const auto& [pr, u] : sup)
    for (size_t i = 0; i < u.size(); ++i)
      for (size_t j = i + 1; j < u.size(); ++j) {
        if (uppers({u[i], u[j]}).empty()) continue;
        SparseRow row;
        int gi = gen.at({pr.first, pr.second, u[i]}), gj = gen.at({pr.first, pr.second, u[j]});
        add(row, gi, 1);
        add(row, gj, -1);
        rel[owner[gi]].add_row(std::move(row));
      }
  for (int a = 0; a < n; ++a)
    for (int b : adj[a]) {
      if (b <= a) continue;
      for (int d : adj[b]) {
        if (d <= b || !sup.count({a, d})) continue;
        for (int c : uppers({a, b, d})) {
          auto ab = gen.find({a, b, c}), bd = gen.find({b, d, c}), ad = gen.find({a, d, c});
          if (ab == gen.end() || bd == gen.end() || ad == gen.end()) continue;
          SparseRow row;
          add(row, ab->second, 1);
          add(row, bd->second, 1);
          add(row, ad->second, -1);
          rel[comp[a]].add_row(std::move(row));
        }
      }
    }
  std::vector<H1Invariants> out(nc);
  for (int c = 0; c < nc; ++c) {
    auto inv = rel[c].abelian_invariants();
    out[c].rank = inv.rank;
    out[c].torsion = inv.torsion;
  }
  for (int v = 0; v < n; ++v) out[comp[v]].component.push_back(P.elements[v]);
  return out;
}

// ---- fundamental group --------------------------------------------------------

const char* to_string(Pi1Verdict v) {
  switch (v) {
    case Pi1Verdict::Trivial: return "trivial";
    case Pi1Verdict::Nontrivial: return "nontrivial";
    case Pi1Verdict::Unknown: return "unknown";
  }
  return "?";
}

Pi1Result pi1_trivial(const IndexPoset& P, int basepoint, long coset_budget) {
  if (basepoint < 0 || static_cast<size_t>(basepoint) >= P.size()) throw Error(ErrorKind::UnknownElement, "basepoint");
  auto comp = components(P);
  std::vector<int> verts;
  for (size_t v = 0; v < P.size(); ++v)
    if (comp[v] == comp[basepoint]) verts.push_back(static_cast<int>(v));
  Skeleton S = skeleton(P, verts, basepoint);

  // generators: non-tree edges; relators: boundary words of triangles
  std::vector<int> gen(S.edges.size(), 0);
  std::vector<int> edge_of_gen{-1};
  for (size_t e = 0; e < S.edges.size(); ++e)
    if (!S.tree[e]) {
      gen[e] = static_cast<int>(edge_of_gen.size());
      edge_of_gen.push_back(static_cast<int>(e));
    }
  int ngens = static_cast<int>(edge_of_gen.size()) - 1;

  Pi1Result res;
  // a nonzero class in H1 ⊗ Q is already a non-contractible loop
  {
    std::vector<int> col(S.edges.size(), -1);
    for (size_t e = 0; e < S.edges.size(); ++e)
      if (gen[e]) col[e] = gen[e] - 1;
    IntRelations rel(ngens);
    for (const auto& t : S.triangles) {
      SparseRow row;
      auto add = [&](int a, int b, long s) {
        int e = col[S.edge_index.at({a, b})];
        if (e >= 0) row.push_back({e, s});
      };
      add(t[0], t[1], 1);
      add(t[1], t[2], 1);
      add(t[0], t[2], -1);
      rel.add_row(std::move(row));
    }
    auto inv = rel.abelian_invariants();
    if (inv.rank > 0 || !inv.torsion.empty()) {
      res.verdict = Pi1Verdict::Nontrivial;
      int g = inv.rank > 0 ? inv.free_column : inv.torsion_column;
      if (g >= 0) res.loop = fundamental_loop(S, edge_of_gen[g + 1]);
      res.generators = ngens;
      res.relators = static_cast<long>(S.triangles.size());
      return res;
    }
  }

  std::vector<Word> relators;
  for (const auto& t : S.triangles) {
    Word w;
    auto letter = [&](int a, int b, bool forward) {
      int g = gen[S.edge_index.at({a, b})];
      if (g) w.push_back(forward ? g : -g);
    };
    letter(t[0], t[1], true);
    letter(t[1], t[2], true);
    letter(t[0], t[2], false);
    if (!w.empty()) relators.push_back(std::move(w));
  }
  Presentation pres{ngens, std::move(relators)};
  simplify_presentation(pres);
  res.generators = static_cast<long>(pres.live_generators().size());
  res.relators = static_cast<long>(pres.relators.size());
  if (res.generators == 0) {
    res.verdict = Pi1Verdict::Trivial;
    res.cosets = 1;
    return res;
  }
  auto ce = enumerate_cosets(pres, coset_budget);
  res.cosets = ce.cosets;
  if (!ce.complete) return res;
  if (ce.cosets == 1) {
    res.verdict = Pi1Verdict::Trivial;
  } else {
    res.verdict = Pi1Verdict::Nontrivial;
    if (ce.moving_generator > 0) res.loop = fundamental_loop(S, edge_of_gen[ce.moving_generator]);
  }
  return res;
}

// ---- serialization ------------------------------------------------------------

namespace {

json bitrows(const BitMatrix& m) {
  json rows = json::array();
  for (const auto& r : m) {
    std::string s;
    for (auto b : r) s.push_back(b ? '1' : '0');
    rows.push_back(s);
  }
  return rows;
}

BitMatrix parse_bitrows(const json& j, size_t n) {
  BitMatrix m;
  for (const auto& r : j) {
    auto s = r.get<std::string>();
    if (s.size() != n) throw Error(ErrorKind::ParseError, "bit row length");
    std::vector<uint8_t> row;
    for (char c : s) {
      if (c != '0' && c != '1') throw Error(ErrorKind::ParseError, "bit row character");
      row.push_back(c == '1');
    }
    m.push_back(std::move(row));
  }
  if (m.size() != n) throw Error(ErrorKind::ParseError, "bit row count");
  return m;
}

}  // namespace

json poset_to_json(const IndexPoset& P) {
  json g = json::array();
  for (size_t i = 0; i < P.action.size(); ++i) g.push_back({{"id", P.group_ids[i]}, {"perm", P.action[i]}});
  return {{"elements", P.elements}, {"leq", bitrows(P.leq)}, {"lt", bitrows(P.lt)}, {"perp", bitrows(P.perp)}, {"group", g}};
}

IndexPoset poset_from_json(const json& j) {
  try {
    auto elems = j.at("elements").get<std::vector<std::string>>();
    size_t n = elems.size();
    auto leq = parse_bitrows(j.at("leq"), n);
    auto lt = j.contains("lt") ? parse_bitrows(j.at("lt"), n) : BitMatrix{};
    if (lt.empty()) {
      lt = leq;
      for (size_t i = 0; i < n; ++i) lt[i][i] = 0;
    }
    auto perp = parse_bitrows(j.at("perp"), n);
    std::vector<std::string> gids;
    std::vector<std::vector<int>> perms;
    for (const auto& g : j.value("group", json::array())) {
      gids.push_back(g.at("id").get<std::string>());
      perms.push_back(g.at("perm").get<std::vector<int>>());
    }
    return make_poset(elems, leq, lt, perp, gids, perms);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

json report_to_json(const AxiomReport& r) {
  json out = json::object();
  for (const auto& a : r.results) {
    json v = {{"verdict", to_string(a.verdict)}};
    if (!a.witness.empty()) v["witness"] = a.witness;
    if (!a.note.empty()) v["note"] = a.note;
    out[a.axiom] = v;
  }
  return out;
}

json h1_to_json(const H1Invariants& h) {
  return {{"rank", h.rank}, {"torsion", h.torsion}, {"component_size", h.component.size()}};
}

}  // namespace sectorkit
