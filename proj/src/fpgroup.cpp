#include "sectorkit/fpgroup.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>

namespace sectorkit {

std::vector<int> Presentation::live_generators() const {
  std::vector<int> dead(ngens + 1, 0), out;
  for (int g : eliminated) dead[g] = 1;
  for (int g = 1; g <= ngens; ++g)
    if (!dead[g]) out.push_back(g);
  return out;
}

Word free_reduce(const Word& w) {
  Word out;
  for (int x : w) {
    if (!out.empty() && out.back() == -x) out.pop_back();
    else out.push_back(x);
  }
  return out;
}

Word cyclic_reduce(const Word& w) {
  Word r = free_reduce(w);
  size_t i = 0, j = r.size();
  while (j - i >= 2 && r[i] == -r[j - 1]) ++i, --j;
  return Word(r.begin() + i, r.begin() + j);
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (int& x : out) x = -x;
  return out;
}

void simplify_presentation(Presentation& p, size_t max_relator_length) {
  auto& rels = p.relators;
  for (auto& r : rels) r = cyclic_reduce(r);
  std::vector<uint8_t> alive(rels.size());
  std::vector<std::set<int>> occ(p.ngens + 1);
  for (size_t i = 0; i < rels.size(); ++i) {
    alive[i] = !rels[i].empty();
    for (int x : rels[i]) occ[std::abs(x)].insert(static_cast<int>(i));
  }

  auto eliminate = [&](int id, size_t at) {
    const Word r = rels[id];
    int x = r[at];
    // r = u x v  =>  x = u^-1 v^-1 (for x positive); rotate so x comes first
    Word rot(r.begin() + at + 1, r.end());
    rot.insert(rot.end(), r.begin(), r.begin() + at);
    Word value = x > 0 ? inverse(rot) : rot;  // value of generator |x|
    Word value_inv = inverse(value);
    int g = std::abs(x);
    alive[id] = 0;
    for (int other : std::vector<int>(occ[g].begin(), occ[g].end())) {
      if (!alive[other]) continue;
      Word w;
      for (int y : rels[other]) {
        if (y == g) w.insert(w.end(), value.begin(), value.end());
        else if (y == -g) w.insert(w.end(), value_inv.begin(), value_inv.end());
        else w.push_back(y);
      }
      rels[other] = cyclic_reduce(w);
      if (rels[other].empty()) alive[other] = 0;
      for (int y : rels[other]) occ[std::abs(y)].insert(other);
    }
    occ[g].clear();
    p.eliminated.push_back(g);
  };

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> order;
    for (size_t i = 0; i < rels.size(); ++i)
      if (alive[i]) order.push_back(static_cast<int>(i));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rels[a].size() < rels[b].size(); });
    for (int id : order) {
      if (!alive[id] || rels[id].size() > max_relator_length) continue;
      std::map<int, int> count;
      for (int y : rels[id]) ++count[std::abs(y)];
      // among generators occurring once, the one in fewest other relators
      size_t best_at = rels[id].size();
      size_t best_occ = 0;
      for (size_t k = 0; k < rels[id].size(); ++k) {
        int g = std::abs(rels[id][k]);
        if (count[g] != 1) continue;
        if (best_at == rels[id].size() || occ[g].size() < best_occ) best_at = k, best_occ = occ[g].size();
      }
      if (best_at == rels[id].size()) continue;
      eliminate(id, best_at);
      changed = true;
    }
  }
  std::vector<Word> kept;
  std::set<Word> seen;
  for (size_t i = 0; i < rels.size(); ++i)
    if (alive[i] && seen.insert(rels[i]).second) kept.push_back(rels[i]);
  rels = std::move(kept);
  std::sort(p.eliminated.begin(), p.eliminated.end());
}

namespace {

class CosetTable {
 public:
  CosetTable(int ngens, long budget) : cols_(2 * ngens), budget_(budget) { new_coset(); }

  bool over_budget() const { return defined_ > budget_; }
  bool alive(int c) const { return parent_[c] == c; }
  int size() const { return static_cast<int>(table_.size()); }
  int& at(int c, int x) { return table_[c][x]; }

  int define(int c, int x) {
    int d = new_coset();
    table_[c][x] = d;
    table_[d][x ^ 1] = c;
    return d;
  }

  void scan_and_fill(int alpha, const std::vector<int>& w) {
    int f = alpha, b = alpha;
    int i = 0, j = static_cast<int>(w.size()) - 1;
    for (;;) {
      while (i <= j && table_[f][w[i]] >= 0) f = table_[f][w[i++]];
      if (i > j) {
        if (f != alpha) coincidence(f, alpha);
        return;
      }
      while (j >= i && table_[b][w[j] ^ 1] >= 0) b = table_[b][w[j--] ^ 1];
      if (j < i) {
        coincidence(f, b);
        return;
      }
      if (i == j) {
        table_[f][w[i]] = b;
        table_[b][w[i] ^ 1] = f;
        return;
      }
      if (over_budget()) return;
      define(f, w[i]);
    }
  }

  int rep(int c) {
    int r = c;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[c] != r) {
      int n = parent_[c];
      parent_[c] = r;
      c = n;
    }
    return r;
  }

  long live_count() const {
    long n = 0;
    for (size_t c = 0; c < parent_.size(); ++c) n += parent_[c] == static_cast<int>(c);
    return n;
  }

 private:
  int new_coset() {
    table_.emplace_back(cols_, -1);
    parent_.push_back(static_cast<int>(parent_.size()));
    ++defined_;
    return static_cast<int>(table_.size()) - 1;
  }

  void merge(int a, int b, std::deque<int>& q) {
    a = rep(a);
    b = rep(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    q.push_back(b);
  }

  void coincidence(int a, int b) {
    std::deque<int> q;
    merge(a, b, q);
    while (!q.empty()) {
      int e = q.front();
      q.pop_front();
      for (int x = 0; x < cols_; ++x) {
        int d = table_[e][x];
        if (d < 0) continue;
        table_[d][x ^ 1] = -1;
        int mu = rep(e), nu = rep(d);
        if (table_[mu][x] >= 0) {
          merge(nu, table_[mu][x], q);
        } else if (table_[nu][x ^ 1] >= 0) {
          merge(mu, table_[nu][x ^ 1], q);
        } else {
          table_[mu][x] = nu;
          table_[nu][x ^ 1] = mu;
        }
      }
    }
  }

  int cols_;
  long budget_;
  long defined_ = 0;
  std::vector<std::vector<int>> table_;
  std::vector<int> parent_;
};

}  // namespace

CosetEnumeration enumerate_cosets(const Presentation& p, long budget) {
  auto live = p.live_generators();
  std::map<int, int> col;  // generator -> column of its positive letter
  for (size_t i = 0; i < live.size(); ++i) col[live[i]] = static_cast<int>(2 * i);
  std::vector<std::vector<int>> rels;
  for (const auto& r : p.relators) {
    std::vector<int> w;
    for (int x : r) w.push_back(col.at(std::abs(x)) + (x < 0 ? 1 : 0));
    rels.push_back(std::move(w));
  }
  int ncols = static_cast<int>(2 * live.size());
  CosetTable T(static_cast<int>(live.size()), budget);
  CosetEnumeration out;
  for (int c = 0; c < T.size(); ++c) {
    for (const auto& w : rels) {
      if (!T.alive(c)) break;
      T.scan_and_fill(c, w);
      if (T.over_budget()) {
        out.cosets = T.live_count();
        return out;
      }
    }
    for (int x = 0; x < ncols && T.alive(c); ++x)
      if (T.at(c, x) < 0) {
        if (T.over_budget()) {
          out.cosets = T.live_count();
          return out;
        }
        T.define(c, x);
      }
  }
  out.complete = true;
  out.cosets = T.live_count();
  for (size_t i = 0; i < live.size() && !out.moving_generator; ++i)
    if (T.rep(T.at(0, static_cast<int>(2 * i))) != 0) out.moving_generator = live[i];
  return out;
}

}  // namespace sectorkit
