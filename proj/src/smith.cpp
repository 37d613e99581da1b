#include "sectorkit/smith.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>

namespace sectorkit {

void IntRelations::add_row(SparseRow row) {
  std::sort(row.begin(), row.end());
  SparseRow merged;
  for (const auto& [c, v] : row) {
    if (!merged.empty() && merged.back().first == c) merged.back().second += v;
    else merged.push_back({c, v});
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const auto& e) { return e.second == 0; }), merged.end());
  if (!merged.empty()) rows_.push_back(std::move(merged));
}

std::vector<mpz_class> smith_diagonal(std::vector<std::vector<mpz_class>> m) {
  size_t R = m.size(), C = R ? m[0].size() : 0;
  std::vector<mpz_class> diag;
  for (size_t t = 0; t < std::min(R, C); ++t) {
    // smallest nonzero entry of the trailing block as pivot
    size_t pr = R, pc = C;
    for (size_t i = t; i < R; ++i)
      for (size_t j = t; j < C; ++j)
        if (m[i][j] != 0 && (pr == R || abs(m[i][j]) < abs(m[pr][pc]))) pr = i, pc = j;
    if (pr == R) break;
    std::swap(m[t], m[pr]);
    for (auto& row : m) std::swap(row[t], row[pc]);
    for (;;) {
      bool clean = true;
      for (size_t i = t + 1; i < R; ++i) {
        if (m[i][t] == 0) continue;
        mpz_class q = m[i][t] / m[t][t];
        for (size_t j = t; j < C; ++j) m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) {
          clean = false;
          std::swap(m[t], m[i]);
        }
      }
      for (size_t j = t + 1; j < C; ++j) {
        if (m[t][j] == 0) continue;
        mpz_class q = m[t][j] / m[t][t];
        for (size_t i = t; i < R; ++i) m[i][j] -= q * m[i][t];
        if (m[t][j] != 0) {
          clean = false;
          for (auto& row : m) std::swap(row[t], row[j]);
        }
      }
      if (!clean) continue;
      // pivot must divide the rest of the block
      size_t bad_r = R;
      for (size_t i = t + 1; i < R && bad_r == R; ++i)
        for (size_t j = t + 1; j < C; ++j)
          if (m[i][j] % m[t][t] != 0) {
            bad_r = i;
            break;
          }
      if (bad_r == R) break;
      for (size_t j = t; j < C; ++j) m[t][j] += m[bad_r][j];
    }
    diag.push_back(abs(m[t][t]));
  }
  return diag;
}

namespace {

struct Reduced {
  std::vector<std::map<int, mpz_class>> rows;  // remaining non-pivot rows
  std::vector<uint8_t> pivoted;
};

// Gauss elimination on unit entries only; pivot rows and columns are dropped
// since a unit pivot just expresses one generator through the others.
Reduced eliminate_units(const std::vector<SparseRow>& input, int ncols) {
  Reduced red;
  red.pivoted.assign(ncols, 0);
  auto& rows = red.rows;
  for (const auto& r : input) {
    std::map<int, mpz_class> m;
    for (const auto& [c, v] : r) m[c] = v;
    rows.push_back(std::move(m));
  }
  std::vector<std::set<int>> col_rows(ncols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (const auto& [c, v] : rows[i]) col_rows[c].insert(static_cast<int>(i));
  std::vector<uint8_t> alive(rows.size(), 1);

  // shortest rows first; within a row the unit entry whose column is
  // shared by the fewest rows (a cheap Markowitz rule)
  using Item = std::pair<size_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  for (size_t i = 0; i < rows.size(); ++i) queue.push({rows[i].size(), static_cast<int>(i)});
  while (!queue.empty()) {
    auto [len, br] = queue.top();
    queue.pop();
    if (!alive[br] || len != rows[br].size() || len == 0) continue;
    int bc = -1;
    for (const auto& [c, v] : rows[br])
      if (abs(v) == 1 && (bc < 0 || col_rows[c].size() < col_rows[bc].size())) bc = c;
    if (bc < 0) continue;  // requeued if a later pivot changes it
    const auto prow = rows[br];
    mpz_class u = prow.at(bc);  // ±1
    std::vector<int> targets(col_rows[bc].begin(), col_rows[bc].end());
    for (int r : targets) {
      if (r == br) continue;
      mpz_class f = rows[r][bc] * u;
      for (const auto& [c, v] : prow) {
        mpz_class& x = rows[r][c];
        x -= f * v;
        if (x == 0) {
          rows[r].erase(c);
          col_rows[c].erase(r);
        } else {
          col_rows[c].insert(r);
        }
      }
      queue.push({rows[r].size(), r});
    }
    for (const auto& [c, v] : prow) col_rows[c].erase(br);
    alive[br] = 0;
    red.pivoted[bc] = 1;
  }
  std::vector<std::map<int, mpz_class>> rest;
  for (size_t i = 0; i < rows.size(); ++i)
    if (alive[i] && !rows[i].empty()) rest.push_back(std::move(rows[i]));
  red.rows = std::move(rest);
  return red;
}

long lattice_size_key(const std::vector<mpz_class>& diag, size_t cols, mpz_class& order) {
  order = 1;
  for (const auto& d : diag) order *= d;
  return static_cast<long>(cols - diag.size());
}

}  // namespace

AbelianInvariants IntRelations::abelian_invariants() const {
  Reduced red = eliminate_units(rows_, ncols_);
  std::vector<int> dense_cols;
  std::vector<uint8_t> in_rows(ncols_, 0);
  for (const auto& r : red.rows)
    for (const auto& [c, v] : r) in_rows[c] = 1;
  AbelianInvariants out;
  long untouched = 0;
  for (int c = 0; c < ncols_; ++c) {
    if (red.pivoted[c]) continue;
    if (in_rows[c]) {
      dense_cols.push_back(c);
    } else {
      ++untouched;
      if (out.free_column < 0) out.free_column = c;
    }
  }
  std::map<int, size_t> pos;
  for (size_t i = 0; i < dense_cols.size(); ++i) pos[dense_cols[i]] = i;
  std::vector<std::vector<mpz_class>> dense;
  for (const auto& r : red.rows) {
    std::vector<mpz_class> row(dense_cols.size(), 0);
    for (const auto& [c, v] : r) row[pos[c]] = v;
    dense.push_back(std::move(row));
  }
  auto diag = smith_diagonal(dense);
  out.rank = untouched + static_cast<long>(dense_cols.size() - diag.size());
  for (const auto& d : diag)
    if (d > 1) out.torsion.push_back(d.get_si());

  if (dense_cols.empty()) return out;
  // locate a witness generator inside the dense block: appending e_c as a
  // relation changes the quotient iff the class of e_c is nonzero (and its
  // free rank iff that class has infinite order)
  bool want_free = out.free_column < 0 && out.rank > 0;
  bool want_torsion = out.rank == 0 && !out.torsion.empty();
  if (!want_free && !want_torsion) return out;
  mpz_class base_order;
  long base_free = lattice_size_key(diag, dense_cols.size(), base_order);
  for (size_t k = 0; k < dense_cols.size(); ++k) {
    auto m = dense;
    std::vector<mpz_class> e(dense_cols.size(), 0);
    e[k] = 1;
    m.push_back(e);
    mpz_class order;
    long free = lattice_size_key(smith_diagonal(m), dense_cols.size(), order);
    if (want_free && free < base_free) {
      out.free_column = dense_cols[k];
      break;
    }
    if (want_torsion && order != base_order) {
      out.torsion_column = dense_cols[k];
      break;
    }
  }
  return out;
}

}  // namespace sectorkit
