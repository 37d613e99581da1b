#pragma once

#include <vector>

namespace sectorkit {

// Letters are ±g for generators g = 1..n.
using Word = std::vector<int>;

struct Presentation {
  int ngens = 0;
  std::vector<Word> relators;
  std::vector<int> eliminated;  // generators removed by Tietze moves

  std::vector<int> live_generators() const;
};

Word free_reduce(const Word& w);
Word cyclic_reduce(const Word& w);
Word inverse(const Word& w);

// Tietze eliminations: a relator in which some generator occurs exactly once
// expresses it through the others. Repeats until nothing is eliminable.
void simplify_presentation(Presentation& p, size_t max_relator_length = 400);

struct CosetEnumeration {
  bool complete = false;
  long cosets = 0;            // index of the trivial subgroup when complete
  int moving_generator = 0;   // generator not fixing the base coset (0: none)
};

// HLT coset enumeration over the trivial subgroup, giving up after
// `budget` coset definitions.
CosetEnumeration enumerate_cosets(const Presentation& p, long budget);

}  // namespace sectorkit
