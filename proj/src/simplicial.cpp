#include "sectorkit/simplicial.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <set>
#include <map>
#include <queue>

#include "sectorkit/error.hpp"

namespace sectorkit {

namespace {

void check_element(const IndexPoset& P, int o) {
  if (o < 0 || static_cast<size_t>(o) >= P.size()) throw Error(ErrorKind::UnknownElement, "index " + std::to_string(o));
}

const std::string& name(const IndexPoset& P, int o) { return P.elements.at(o); }

}  // namespace

bool Simplex::operator<(const Simplex& o) const {
  if (dim != o.dim) return dim < o.dim;
  if (support != o.support) return support < o.support;
  return std::lexicographical_compare(faces.begin(), faces.end(), o.faces.begin(), o.faces.end());
}

bool Path::operator<(const Path& o) const {
  if (start != o.start) return start < o.start;
  if (end != o.end) return end < o.end;
  return std::lexicographical_compare(edges.begin(), edges.end(), o.edges.begin(), o.edges.end());
}

Simplex vertex(const IndexPoset& P, int o) {
  check_element(P, o);
  return Simplex{0, o, {}};
}

Simplex make_simplex(const IndexPoset& P, int support, std::vector<Simplex> faces) {
  check_element(P, support);
  if (faces.empty()) return vertex(P, support);
  int n = static_cast<int>(faces.size()) - 1;
  if (n > kMaxSimplexDim) throw Error(ErrorKind::IndexOutOfRange, "simplices above dimension 3 are not supported");
  for (const auto& f : faces) {
    if (f.dim != n - 1) throw Error(ErrorKind::SupportViolation, "faces of mixed dimension");
    if (!P.leq[f.support][support])
      throw Error(ErrorKind::SupportViolation, "face support " + name(P, f.support) + " not inside " + name(P, support));
  }
  // ∂i∂j = ∂j∂(i+1) for i >= j; vacuous for edges
  for (int j = 0; n >= 2 && j < n; ++j)
    for (int i = j; i < n; ++i)
      if (!(faces[j].faces[i] == faces[i + 1].faces[j])) throw Error(ErrorKind::SupportViolation, "faces do not fit together");
  return Simplex{n, support, std::move(faces)};
}

Simplex make_edge(const IndexPoset& P, int from, int to, int support) {
  return make_simplex(P, support, {vertex(P, to), vertex(P, from)});
}

std::optional<Simplex> canonical_simplex(const IndexPoset& P, const std::vector<int>& verts) {
  if (verts.empty() || verts.size() > kMaxSimplexDim + 1)
    throw Error(ErrorKind::IndexOutOfRange, "canonical simplices need 1 to 4 vertices");
  for (int v : verts) check_element(P, v);
  if (verts.size() == 1) return vertex(P, verts[0]);
  std::vector<Simplex> faces;
  std::vector<int> supports;
  for (size_t i = 0; i < verts.size(); ++i) {
    std::vector<int> rest;
    for (size_t k = 0; k < verts.size(); ++k)
      if (k != i) rest.push_back(verts[k]);
    auto f = canonical_simplex(P, rest);
    if (!f) return std::nullopt;
    supports.push_back(f->support);
    faces.push_back(std::move(*f));
  }
  int s;
  if (verts.size() == 2) {
    auto e = edge_support(P, verts[0], verts[1]);
    if (!e) return std::nullopt;
    s = *e;
  } else {
    s = canonical_support(P, supports);
    if (s < 0) return std::nullopt;
  }
  return Simplex{static_cast<int>(verts.size()) - 1, s, std::move(faces)};
}

Simplex face(const Simplex& x, int i) {
  if (x.dim == 0 || i < 0 || i > x.dim)
    throw Error(ErrorKind::IndexOutOfRange, "face " + std::to_string(i) + " of a " + std::to_string(x.dim) + "-simplex");
  return x.faces[i];
}

Simplex degeneracy(const Simplex& x, int i) {
  if (i < 0 || i > x.dim)
    throw Error(ErrorKind::IndexOutOfRange, "degeneracy " + std::to_string(i) + " of a " + std::to_string(x.dim) + "-simplex");
  if (x.dim + 1 > kMaxSimplexDim) throw Error(ErrorKind::IndexOutOfRange, "simplices above dimension 3 are not supported");
  Simplex out{x.dim + 1, x.support, {}};
  for (int j = 0; j <= x.dim + 1; ++j) {
    if (j < i) out.faces.push_back(degeneracy(x.faces[j], i - 1));
    else if (j <= i + 1) out.faces.push_back(x);
    else out.faces.push_back(degeneracy(x.faces[j - 1], i));
  }
  return out;
}

std::vector<int> vertices(const Simplex& x) {
  if (x.dim == 0) return {x.support};
  auto v = vertices(x.faces[x.dim]);  // drops the last vertex
  v.push_back(vertices(x.faces[0]).back());
  return v;
}

bool simplicial_identities_hold(const IndexPoset& P, const Simplex& x) {
  if (x.dim == 0) return x.faces.empty();
  if (static_cast<int>(x.faces.size()) != x.dim + 1) return false;
  for (const auto& f : x.faces)
    if (f.dim != x.dim - 1 || !P.leq[f.support][x.support] || !simplicial_identities_hold(P, f)) return false;
  for (int j = 0; j < x.dim; ++j)
    for (int i = j; i < x.dim; ++i)
      if (x.dim >= 2 && !(x.faces[j].faces[i] == x.faces[i + 1].faces[j])) return false;
  return true;
}

// ---- paths --------------------------------------------------------------------

Path trivial_path(int a) { return Path{a, a, {}}; }

void validate_path(const IndexPoset& P, const Path& p) {
  check_element(P, p.start);
  check_element(P, p.end);
  int at = p.start;
  for (size_t i = 0; i < p.edges.size(); ++i) {
    const auto& b = p.edges[i];
    if (b.dim != 1 || !simplicial_identities_hold(P, b))
      throw Error(ErrorKind::InvalidPath, "entry " + std::to_string(i) + " is not a 1-simplex");
    if (b.d1() != at) throw Error(ErrorKind::InvalidPath, "chain broken at entry " + std::to_string(i));
    at = b.d0();
  }
  if (at != p.end) throw Error(ErrorKind::InvalidPath, "endpoint does not match the last 1-simplex");
}

Path make_path(const IndexPoset& P, std::vector<Simplex> edges) {
  if (edges.empty()) throw Error(ErrorKind::InvalidPath, "empty path needs an explicit endpoint");
  Path p{edges.front().faces.size() == 2 ? edges.front().d1() : -1,
         edges.back().faces.size() == 2 ? edges.back().d0() : -1, std::move(edges)};
  if (p.start < 0 || p.end < 0) throw Error(ErrorKind::InvalidPath, "entries must be 1-simplices");
  validate_path(P, p);
  return p;
}

Path path_through(const IndexPoset& P, const std::vector<int>& verts) {
  if (verts.empty()) throw Error(ErrorKind::InvalidPath, "no vertices");
  Path p = trivial_path(verts[0]);
  check_element(P, verts[0]);
  for (size_t i = 1; i < verts.size(); ++i) {
    auto e = canonical_simplex(P, {verts[i - 1], verts[i]});
    if (!e) throw Error(ErrorKind::InvalidPath, "no 1-simplex from " + name(P, verts[i - 1]) + " to " + name(P, verts[i]));
    p.edges.push_back(std::move(*e));
  }
  p.end = verts.back();
  return p;
}

Simplex reverse(const Simplex& b) {
  if (b.dim != 1) throw Error(ErrorKind::InvalidPath, "only 1-simplices are reversed");
  return Simplex{1, b.support, {b.faces[1], b.faces[0]}};
}

Path reverse(const Path& p) {
  Path r{p.end, p.start, {}};
  for (auto it = p.edges.rbegin(); it != p.edges.rend(); ++it) r.edges.push_back(reverse(*it));
  return r;
}

Path compose(const Path& q, const Path& p) {
  if (p.end != q.start) throw Error(ErrorKind::EndpointMismatch, "composition needs end(p) = start(q)");
  Path r{p.start, q.end, p.edges};
  r.edges.insert(r.edges.end(), q.edges.begin(), q.edges.end());
  return r;
}

// ---- deformations -------------------------------------------------------------

std::vector<Move> deformation_moves(const IndexPoset& P, const Path& p) {
  std::vector<Move> out;
  const auto& E = p.edges;
  for (size_t i = 0; i < E.size(); ++i)
    if (E[i].degenerate_edge()) out.push_back({Move::Drop, i, degeneracy(E[i], 0)});
  for (size_t i = 0; i + 1 < E.size(); ++i) {
    int u = E[i].d1(), w = E[i + 1].d0();
    auto e = canonical_simplex(P, {u, w});
    if (!e) continue;
    int s = canonical_support(P, {E[i].support, E[i + 1].support, e->support});
    if (s < 0) continue;
    out.push_back({Move::Contract, i, Simplex{2, s, {E[i + 1], *e, E[i]}}});
  }
  size_t n = P.size();
  for (size_t i = 0; i < E.size(); ++i) {
    int u = E[i].d1(), w = E[i].d0();
    for (size_t v = 0; v < n; ++v) {
      if (static_cast<int>(v) == u || static_cast<int>(v) == w) continue;
      auto a = edge_support(P, u, static_cast<int>(v));
      auto b = edge_support(P, static_cast<int>(v), w);
      if (!a || !b) continue;
      int s = canonical_support(P, {E[i].support, *a, *b});
      if (s < 0) continue;
      Simplex first = make_edge(P, u, static_cast<int>(v), *a), second = make_edge(P, static_cast<int>(v), w, *b);
      out.push_back({Move::Expand, i, Simplex{2, s, {second, E[i], first}}});
    }
  }
  return out;
}

Path apply_move(const IndexPoset& P, const Path& p, const Move& m) {
  auto bad = [](const std::string& why) { return Error(ErrorKind::InvalidPath, "move does not apply: " + why); };
  const auto& c = m.cell;
  if (c.dim != 2 || !simplicial_identities_hold(P, c)) throw bad("cell is not a valid 2-simplex");
  Path r = p;
  auto& E = r.edges;
  switch (m.kind) {
    case Move::Expand:
      if (m.at >= E.size() || !(E[m.at] == c.faces[1])) throw bad("edge is not ∂1 of the cell");
      E[m.at] = c.faces[2];
      E.insert(E.begin() + m.at + 1, c.faces[0]);
      break;
    case Move::Contract:
      if (m.at + 1 >= E.size() || !(E[m.at] == c.faces[2]) || !(E[m.at + 1] == c.faces[0]))
        throw bad("edges are not ∂2, ∂0 of the cell");
      E[m.at] = c.faces[1];
      E.erase(E.begin() + m.at + 1);
      break;
    case Move::Drop:
      if (m.at >= E.size() || !E[m.at].degenerate_edge() || !(c == degeneracy(E[m.at], 0)))
        throw bad("no degenerate 1-simplex there");
      E.erase(E.begin() + m.at);
      break;
    case Move::Insert: {
      if (m.at > E.size()) throw bad("position past the end");
      int u = m.at == 0 ? r.start : E[m.at - 1].d0();
      Simplex d = degeneracy(vertex(P, u), 0);
      if (!(c == degeneracy(d, 0))) throw bad("cell does not match the inserted vertex");
      E.insert(E.begin() + m.at, d);
      break;
    }
  }
  return r;
}

std::vector<Path> elementary_deformations(const Path& p, const IndexPoset& P) {
  validate_path(P, p);
  std::vector<Path> out;
  for (const auto& m : deformation_moves(P, p)) out.push_back(apply_move(P, p, m));
  return out;
}

Path replay(const IndexPoset& P, const Path& p, const std::vector<Move>& moves) {
  Path r = p;
  for (const auto& m : moves) r = apply_move(P, r, m);
  return r;
}

namespace {

Move inverse_move(const Move& m) {
  Move r = m;
  switch (m.kind) {
    case Move::Expand: r.kind = Move::Contract; break;
    case Move::Contract: r.kind = Move::Expand; break;
    case Move::Drop: r.kind = Move::Insert; break;
    case Move::Insert: r.kind = Move::Drop; break;
  }
  return r;
}

struct Side {
  struct Node {
    long parent = -1;
    Move via;
  };
  std::vector<Path> paths;
  std::vector<Node> nodes;
  std::map<Path, long> index;
  using Item = std::pair<size_t, long>;  // (length, node): shorter first, then older
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> open;

  long add(const Path& p, long parent, const Move& via) {
    auto [it, fresh] = index.emplace(p, static_cast<long>(paths.size()));
    if (!fresh) return -1;
    paths.push_back(p);
    nodes.push_back({parent, via});
    open.push({p.length(), it->second});
    return it->second;
  }

  // moves from the root to node k
  std::vector<Move> trail(long k) const {
    std::vector<Move> out;
    for (; nodes[k].parent >= 0; k = nodes[k].parent) out.push_back(nodes[k].via);
    std::reverse(out.begin(), out.end());
    return out;
  }
};

}  // namespace

HomotopyResult homotopic(const Path& p, const Path& q, const IndexPoset& P, long cap) {
  if (p.start != q.start || p.end != q.end) throw Error(ErrorKind::EndpointMismatch, "paths have different endpoints");
  validate_path(P, p);
  validate_path(P, q);
  HomotopyResult res;
  if (p == q) {
    res.found = true;
    return res;
  }
  Side sides[2];
  sides[0].add(p, -1, {});
  sides[1].add(q, -1, {});
  auto finish = [&](int s, long here, long there) {
    // here: node on side s, there: the same path on the other side
    long from_p = s == 0 ? here : there, from_q = s == 0 ? there : here;
    res.found = true;
    res.moves = sides[0].trail(from_p);
    auto back = sides[1].trail(from_q);
    for (auto it = back.rbegin(); it != back.rend(); ++it) res.moves.push_back(inverse_move(*it));
  };
  while (res.explored < cap) {
    // expand the side with the smaller frontier; ties go to p's side
    int s = sides[0].open.size() <= sides[1].open.size() ? 0 : 1;
    if (sides[s].open.empty()) s ^= 1;
    if (sides[s].open.empty()) break;
    auto [len, k] = sides[s].open.top();
    sides[s].open.pop();
    ++res.explored;
    Path cur = sides[s].paths[k];
    for (const auto& m : deformation_moves(P, cur)) {
      Path next = apply_move(P, cur, m);
      long added = sides[s].add(next, k, m);
      if (added < 0) continue;
      auto hit = sides[s ^ 1].index.find(next);
      if (hit != sides[s ^ 1].index.end()) {
        finish(s, added, hit->second);
        return res;
      }
    }
  }
  return res;
}

// ---- symmetry -----------------------------------------------------------------

Simplex act(const IndexPoset& P, int g, const Simplex& x) {
  if (g < 0 || static_cast<size_t>(g) >= P.action.size()) throw Error(ErrorKind::UnknownSymmetry, "index " + std::to_string(g));
  Simplex r{x.dim, P.action[g][x.support], {}};
  for (const auto& f : x.faces) r.faces.push_back(act(P, g, f));
  return r;
}

Path act(const IndexPoset& P, int g, const Path& p) {
  Path r{act(P, g, vertex(P, p.start)).support, act(P, g, vertex(P, p.end)).support, {}};
  for (const auto& b : p.edges) r.edges.push_back(act(P, g, b));
  return r;
}

Simplex act(const IndexPoset& P, const std::string& g, const Simplex& x) { return act(P, P.group_index(g), x); }
Path act(const IndexPoset& P, const std::string& g, const Path& p) { return act(P, P.group_index(g), p); }

std::vector<Move> act(const IndexPoset& P, int g, const std::vector<Move>& moves) {
  std::vector<Move> out;
  for (const auto& m : moves) out.push_back({m.kind, m.at, act(P, g, m.cell)});
  return out;
}

// ---- serialization ------------------------------------------------------------

json path_to_json(const IndexPoset& P, const Path& p) {
  json out = json::array();
  for (const auto& b : p.edges) out.push_back({name(P, b.d1()), name(P, b.d0()), name(P, b.support)});
  return out;
}

Path path_from_json(const IndexPoset& P, const json& j, std::optional<int> start) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidPath, "path must be a list of triples");
  std::vector<Simplex> edges;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3) throw Error(ErrorKind::InvalidPath, "1-simplex must be [face1, face0, support]");
    int d1 = P.index_of(t[0].get<std::string>()), d0 = P.index_of(t[1].get<std::string>());
    int s = P.index_of(t[2].get<std::string>());
    try {
      edges.push_back(make_edge(P, d1, d0, s));
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidPath, e.what());
    }
  }
  if (edges.empty()) {
    if (!start) throw Error(ErrorKind::InvalidPath, "empty path needs an explicit endpoint");
    check_element(P, *start);
    return trivial_path(*start);
  }
  Path p = make_path(P, std::move(edges));
  if (start && *start != p.start) throw Error(ErrorKind::InvalidPath, "path does not start at the given element");
  return p;
}

json simplex_to_json(const IndexPoset& P, const Simplex& x) {
  if (x.dim == 0) return name(P, x.support);
  json faces = json::array();
  for (const auto& f : x.faces) faces.push_back(simplex_to_json(P, f));
  return {{"support", name(P, x.support)}, {"faces", faces}};
}

json moves_to_json(const IndexPoset& P, const std::vector<Move>& m) {
  static const char* kinds[] = {"expand", "contract", "drop", "insert"};
  json out = json::array();
  for (const auto& x : m) out.push_back({{"kind", kinds[x.kind]}, {"at", x.at}, {"cell", simplex_to_json(P, x.cell)}});
  return out;
}

}  // namespace sectorkit

// ---- 1-skeleton -------------------------------------------------------------

namespace sectorkit {

std::vector<int> neighbors(const IndexPoset& P, int u) {
  std::vector<int> out;
  for (int w = 0; w < static_cast<int>(P.size()); ++w)
    if (w != u && edge_support(P, u, w)) out.push_back(w);
  return out;
}

namespace {

// next hop towards `to` for every vertex (-1: unreachable, to itself: to)
const std::vector<int>& tree_toward(const IndexPoset& P, int to) {
  auto& cache = *P.edge_cache;
  {
    std::lock_guard<std::mutex> lock(cache.tree_mutex);
    auto it = cache.toward.find(to);
    if (it != cache.toward.end()) return it->second;
  }
  const int n = static_cast<int>(P.size());
  std::vector<int> next(n, -1);
  next[to] = to;
  std::vector<int> frontier{to};
  while (!frontier.empty()) {
    std::vector<int> nf;
    for (int v : frontier)
      for (int u : neighbors(P, v))
        if (next[u] < 0) {
          next[u] = v;
          nf.push_back(u);
        }
    std::sort(nf.begin(), nf.end());
    frontier = std::move(nf);
  }
  std::lock_guard<std::mutex> lock(cache.tree_mutex);
  return cache.toward.emplace(to, std::move(next)).first->second;
}

}  // namespace

Path canonical_path(const IndexPoset& P, int from, int to) {
  if (from < 0 || to < 0 || from >= static_cast<int>(P.size()) || to >= static_cast<int>(P.size()))
    throw Error(ErrorKind::IndexOutOfRange, "path endpoint out of range");
  if (from == to) return trivial_path(from);
  const auto& next = tree_toward(P, to);
  if (next[from] < 0) throw Error(ErrorKind::Disconnected, P.elements[from] + " cannot reach " + P.elements[to]);
  std::vector<int> verts{from};
  while (verts.back() != to) verts.push_back(next[verts.back()]);
  return path_through(P, verts);
}

int skeleton_distance(const IndexPoset& P, int from, int to) {
  if (from == to) return 0;
  const auto& next = tree_toward(P, to);
  if (next[from] < 0) return -1;
  int d = 0;
  for (int v = from; v != to; v = next[v]) ++d;
  return d;
}

std::vector<Simplex> canonical_triangles(const IndexPoset& P) {
  const int n = static_cast<int>(P.size());
  // any canonical 2-simplex has all vertices below its support
  std::set<std::array<int, 3>> seen;
  std::vector<Simplex> out;
  std::vector<std::array<int, 3>> cand;
  for (int c = 0; c < n; ++c) {
    std::vector<int> down;
    for (int v = 0; v < n; ++v)
      if (P.leq[v][c]) down.push_back(v);
    for (int a : down)
      for (int b : down)
        for (int d : down) cand.push_back({a, b, d});
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (const auto& t : cand) {
    auto s = canonical_simplex(P, {t[0], t[1], t[2]});
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

std::vector<Simplex> canonical_edges(const IndexPoset& P) {
  const int n = static_cast<int>(P.size());
  std::vector<Simplex> out;
  for (int u = 0; u < n; ++u)
    for (int w = 0; w < n; ++w)
      if (auto s = edge_support(P, u, w)) out.push_back(make_edge(P, u, w, *s));
  return out;
}

}  // namespace sectorkit
