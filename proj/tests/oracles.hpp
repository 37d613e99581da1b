#pragma once
// Independent reference computations for the tests. Nothing here calls the
// library beyond building posets.

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sectorkit/poset.hpp"

namespace oracle {

using sectorkit::BitMatrix;
using sectorkit::IndexPoset;

// Poset of vertex sets ordered by inclusion, perp = disjointness.
inline IndexPoset set_poset(const std::vector<std::set<int>>& sets, bool symmetric_group = false, int npoints = 0) {
  size_t n = sets.size();
  std::vector<std::string> ids;
  for (const auto& s : sets) {
    std::string id = "{";
    for (int v : s) id += (id.size() > 1 ? "," : "") + std::to_string(v);
    ids.push_back(id + "}");
  }
  BitMatrix leq(n, std::vector<uint8_t>(n)), lt = leq, perp = leq;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      bool sub = std::includes(sets[j].begin(), sets[j].end(), sets[i].begin(), sets[i].end());
      leq[i][j] = sub;
      lt[i][j] = sub && i != j;
      bool disjoint = true;
      for (int v : sets[i]) disjoint = disjoint && !sets[j].count(v);
      perp[i][j] = disjoint;
    }
  std::vector<std::string> gids;
  std::vector<std::vector<int>> perms;
  if (symmetric_group) {
    // rotations of the points 0..npoints-1, the family has to be closed
    std::map<std::set<int>, int> index;
    for (size_t i = 0; i < n; ++i) index[sets[i]] = static_cast<int>(i);
    for (int k = 0; k < npoints; ++k) {
      std::vector<int> perm(n);
      for (size_t i = 0; i < n; ++i) {
        std::set<int> img;
        for (int v : sets[i]) img.insert((v + k) % npoints);
        perm[i] = index.at(img);
      }
      gids.push_back("r" + std::to_string(k));
      perms.push_back(perm);
    }
  }
  return sectorkit::make_poset(ids, leq, lt, perp, gids, perms);
}

// Face poset of a simplicial complex given by its maximal faces.
inline std::vector<std::set<int>> faces_of(const std::vector<std::vector<int>>& maximal) {
  std::set<std::set<int>> out;
  for (const auto& f : maximal) {
    int k = static_cast<int>(f.size());
    for (int mask = 1; mask < (1 << k); ++mask) {
      std::set<int> s;
      for (int i = 0; i < k; ++i)
        if (mask >> i & 1) s.insert(f[i]);
      out.insert(s);
    }
  }
  return {out.begin(), out.end()};
}

inline std::vector<std::vector<int>> rp2_triangles() {
  return {{1, 2, 3}, {1, 3, 4}, {1, 4, 5}, {1, 5, 6}, {1, 6, 2}, {2, 3, 5}, {3, 4, 6}, {4, 5, 2}, {5, 6, 3}, {6, 2, 4}};
}

inline std::vector<std::vector<int>> torus_triangles() {
  std::vector<std::vector<int>> t;
  for (int i = 0; i < 7; ++i) {
    t.push_back({i, (i + 1) % 7, (i + 3) % 7});
    t.push_back({i, (i + 2) % 7, (i + 3) % 7});
  }
  return t;
}

// Random family of subsets of {0..m-1}, closed under rotation when asked.
inline std::vector<std::set<int>> random_sets(std::mt19937& rng, int m, int count, bool rotation_closed) {
  std::set<std::set<int>> out;
  std::uniform_int_distribution<int> start(0, m - 1), len(1, std::max(1, m / 2));
  for (int it = 0; it < count; ++it) {
    // arcs keep the posets connected enough to be interesting
    int s = start(rng), l = len(rng);
    std::set<int> a;
    for (int k = 0; k < l; ++k) a.insert((s + k) % m);
    if (rotation_closed)
      for (int r = 0; r < m; ++r) {
        std::set<int> b;
        for (int v : a) b.insert((v + r) % m);
        out.insert(b);
      }
    else
      out.insert(a);
  }
  return {out.begin(), out.end()};
}

// ---- homology of the order complex over F_p ------------------------------------

inline long rank_mod_p(std::vector<std::map<int, long>> rows, long p) {
  std::map<int, std::map<int, long>> pivots;  // pivot column -> row
  long rank = 0;
  auto inv = [p](long a) {
    long r = 1, e = p - 2;
    a %= p;
    while (e) {
      if (e & 1) r = r * a % p;
      a = a * a % p;
      e >>= 1;
    }
    return r;
  };
  for (auto& row : rows) {
    for (auto& [c, v] : row) v = ((v % p) + p) % p;
    while (true) {
      while (!row.empty() && row.begin()->second == 0) row.erase(row.begin());
      if (row.empty()) break;
      auto [c, v] = *row.begin();
      auto it = pivots.find(c);
      if (it == pivots.end()) {
        long s = inv(v);
        for (auto& [cc, vv] : row) vv = vv * s % p;
        pivots[c] = row;
        ++rank;
        break;
      }
      for (const auto& [cc, vv] : it->second) row[cc] = ((row[cc] - v * vv) % p + p) % p;
    }
  }
  return rank;
}

// dim H1(Δ(P); F_p) of the order complex (chains of P)
inline long order_complex_h1(const IndexPoset& P, long p) {
  int n = static_cast<int>(P.size());
  std::map<std::pair<int, int>, int> edge;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (P.lt[a][b]) edge[{a, b}] = static_cast<int>(edge.size());
  std::vector<std::map<int, long>> d1, d2;
  for (const auto& [e, i] : edge) d1.push_back({{e.first, -1}, {e.second, 1}});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (!P.lt[a][b]) continue;
      for (int c = 0; c < n; ++c)
        if (P.lt[b][c]) d2.push_back({{edge[{b, c}], 1}, {edge[{a, c}], -1}, {edge[{a, b}], 1}});
    }
  return static_cast<long>(edge.size()) - rank_mod_p(d1, p) - rank_mod_p(d2, p);
}

// comparability components, restricted to a mask
inline std::vector<int> comparability_components(const IndexPoset& P, const std::vector<uint8_t>& mask) {
  int n = static_cast<int>(P.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (mask[a] && mask[b] && P.leq[a][b]) parent[find(a)] = find(b);
  std::vector<int> out(n);
  for (int a = 0; a < n; ++a) out[a] = find(a);
  return out;
}

// K6 without collars: P connected and every nonempty o^⊥ connected
inline bool k6_holds(const IndexPoset& P) {
  int n = static_cast<int>(P.size());
  auto all = comparability_components(P, std::vector<uint8_t>(n, 1));
  for (int a = 0; a < n; ++a)
    if (all[a] != all[0]) return false;
  for (int o = 0; o < n; ++o) {
    std::vector<uint8_t> mask(n);
    for (int a = 0; a < n; ++a) mask[a] = P.perp[o][a];
    auto c = comparability_components(P, mask);
    int first = -1;
    for (int a = 0; a < n; ++a) {
      if (!mask[a]) continue;
      if (first < 0) first = c[a];
      else if (c[a] != first) return false;
    }
  }
  return true;
}

}  // namespace oracle
