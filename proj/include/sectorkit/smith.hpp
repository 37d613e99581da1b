#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

namespace sectorkit {

using SparseRow = std::vector<std::pair<int, long>>;

struct AbelianInvariants {
  long rank = 0;
  std::vector<long> torsion;  // each divides the next
  int free_column = -1;       // a generator of infinite order, if rank > 0
  int torsion_column = -1;    // a nonzero generator of finite order, if any and rank == 0
};

// Integer relation matrix presenting Z^ncols / rowspan. Unit pivots are
// eliminated sparsely first (cheapest by Markowitz count); whatever is left
// goes through a dense Smith normal form.
class IntRelations {
 public:
  explicit IntRelations(int ncols) : ncols_(ncols) {}
  void add_row(SparseRow row);
  AbelianInvariants abelian_invariants() const;

 private:
  int ncols_;
  std::vector<SparseRow> rows_;
};

// Diagonal of the Smith normal form (nonzero entries only, divisibility chain).
std::vector<mpz_class> smith_diagonal(std::vector<std::vector<mpz_class>> m);

}  // namespace sectorkit
