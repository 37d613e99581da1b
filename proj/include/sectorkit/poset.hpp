#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sectorkit/regions.hpp"

namespace sectorkit {

using BitMatrix = std::vector<std::vector<uint8_t>>;

struct EdgeCache {
  std::once_flag once;
  std::vector<std::vector<int>> support;
  // shortest-path trees of the 1-skeleton, keyed by target: next hop or -1
  std::mutex tree_mutex;
  std::map<int, std::vector<int>> toward;
};

struct IndexPoset {
  std::vector<std::string> elements;  // sorted by id
  BitMatrix leq, lt, perp;            // leq[i][j]: i ⊆ j;  lt[i][j]: i ⊂ j

  // group[g] acts as the permutation action[g]; mult[g][h] = index of g∘h
  std::vector<std::string> group_ids;
  std::vector<Symmetry> symmetries;  // empty for synthetic posets
  std::vector<std::vector<int>> action;
  std::vector<std::vector<int>> mult;
  std::vector<int> inverse;
  int identity = 0;

  // geometric data when built from a family; empty otherwise
  std::vector<Region> regions;
  std::vector<int> level;
  int num_levels = 0;
  std::vector<uint8_t> collar;  // all zero unless the sample has a collar

  // canonical edge supports, filled on first use (-1: no common upper bound)
  std::shared_ptr<struct EdgeCache> edge_cache = std::make_shared<EdgeCache>();

  size_t size() const { return elements.size(); }
  int index_of(const std::string& id) const;  // UnknownElement
  int group_index(const std::string& id) const;  // UnknownSymmetry
  bool comparable(int a, int b) const { return leq[a][b] || leq[b][a]; }
};

IndexPoset build_poset(const RegionFamily& family);

// Synthetic poset. perm[g] is the action of group_ids[g] on elements (in the
// order given); the group law is read off from composition of permutations,
// which therefore have to be distinct. With validate = false only the shape is
// checked, so posets violating K2 or K5 can be constructed for testing.
IndexPoset make_poset(std::vector<std::string> ids, const BitMatrix& leq, const BitMatrix& lt, const BitMatrix& perp,
                      std::vector<std::string> group_ids = {}, std::vector<std::vector<int>> perm = {},
                      bool validate = true);

// Checks the construction invariants; throws InvariantViolation.
void validate_poset(const IndexPoset& P);

std::vector<int> causal_complement(const IndexPoset& P, int o);
std::vector<std::string> causal_complement(const IndexPoset& P, const std::string& o);

// ---- canonical simplicial data ----------------------------------------------

// Least-id minimal element of the common upper bounds of `elems`; -1 if none.
int canonical_support(const IndexPoset& P, const std::vector<int>& elems);

// Canonical 1-simplex from d1 to d0 (support is the canonical support of the
// pair, so comparable pairs are supported on the larger one).
std::optional<int> edge_support(const IndexPoset& P, int d1, int d0);
// Canonical 2-simplex on vertices v0, v1, v2 (faces are the canonical edges
// v1v2, v0v2, v0v1), supported on the canonical support of those edges.
std::optional<int> triangle_support(const IndexPoset& P, int v0, int v1, int v2);

// Connected components of the comparability graph (which is the 1-skeleton
// up to edges through a common upper bound; same components).
std::vector<int> components(const IndexPoset& P, const std::vector<uint8_t>* mask = nullptr);

// ---- axioms -----------------------------------------------------------------

enum class Verdict { Holds, Fails, HoldsRelative, Unknown };
const char* to_string(Verdict v);

struct AxiomResult {
  std::string axiom;
  Verdict verdict = Verdict::Holds;
  std::vector<std::string> witness;  // element ids (or loop for K7)
  std::string note;
};

struct AxiomReport {
  std::vector<AxiomResult> results;  // K1..K7 in order
  const AxiomResult& at(const std::string& axiom) const;
};

struct AxiomBudget {
  long coset_rows = 1000000;
  bool check_k7 = true;
};

AxiomReport check_axioms(const IndexPoset& P, const AxiomBudget& budget = {});

// Re-evaluates the defining formula of a K1..K6 axiom on a reported witness.
// True iff the witness really violates the axiom.
bool witness_confirms_failure(const IndexPoset& P, const AxiomResult& r);

// o^⊥ as a graph: a ~ b iff both lie below a common c in o^⊥.
bool complement_connected(const IndexPoset& P, int o, std::vector<int>* split = nullptr);

// ---- homology / homotopy ----------------------------------------------------

struct H1Invariants {
  long rank = 0;
  std::vector<long> torsion;
  std::vector<std::string> component;  // elements of the component
  bool operator==(const H1Invariants& o) const { return rank == o.rank && torsion == o.torsion; }
};

// Per component; the first entry belongs to the component of the least id.
std::vector<H1Invariants> h1_components(const IndexPoset& P);
// Throws Disconnected when P has more than one component.
H1Invariants h1(const IndexPoset& P);
// Cross-check with every common upper bound as a support (at most
// `support_cap` per vertex set, smallest indices first) instead of the
// canonical one. Supports of the same pair below a common element are
// identified, as the 2-simplices with a repeated vertex do.
std::vector<H1Invariants> h1_components_all_supports(const IndexPoset& P, int support_cap = 8);

enum class Pi1Verdict { Trivial, Nontrivial, Unknown };
const char* to_string(Pi1Verdict v);

struct Pi1Result {
  Pi1Verdict verdict = Pi1Verdict::Unknown;
  std::vector<int> loop;  // closed vertex sequence, first == last
  long cosets = 0;        // final coset count, when enumeration ran
  long generators = 0, relators = 0;  // after simplification
};

Pi1Result pi1_trivial(const IndexPoset& P, int basepoint, long coset_budget = 1000000);

// ---- serialization ----------------------------------------------------------

json poset_to_json(const IndexPoset& P);
IndexPoset poset_from_json(const json& j);
json report_to_json(const AxiomReport& r);
json h1_to_json(const H1Invariants& h);

}  // namespace sectorkit
