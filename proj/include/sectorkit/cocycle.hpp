#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectorkit/paulinet.hpp"
#include "sectorkit/simplicial.hpp"

namespace sectorkit {

// Covariant 1-cocycle: λ, b -> X_b(λ). Values are produced by a formula on
// demand and memoised; the formula has to accept any 1-simplex, which is what
// the cocycle identity needs (λ∂0c is rarely canonical).
class CovariantCocycle {
 public:
  using Formula = std::function<PauliElement(const Simplex& b, int g)>;

  CovariantCocycle() = default;
  CovariantCocycle(std::shared_ptr<const Net> net, Formula f, json provenance);

  const Net& net() const { return *net_; }
  const std::shared_ptr<const Net>& net_ptr() const { return net_; }
  const IndexPoset& P() const { return net_->P(); }
  const json& provenance() const;

  PauliElement value(const Simplex& b, int g) const;
  PauliElement value(const Simplex& b) const { return value(b, P().identity); }
  PauliElement edge(int from, int to, int g) const;  // canonical 1-simplex from -> to
  PauliElement object_value(int o, int g) const;     // X_o(λ), on σ0(o)
  // X along the canonical path from -> to (identity λ), memoised
  PauliElement transport(int to, int from) const;

  bool same(const CovariantCocycle& o) const { return state_ == o.state_; }
  // Copy with a single value replaced (fault injection, synthetic tables).
  CovariantCocycle with_value(int g, const Simplex& b, const PauliElement& v) const;

 private:
  struct State;
  std::shared_ptr<const Net> net_;
  std::shared_ptr<State> state_;
};

// ---- constructors -------------------------------------------------------------

CovariantCocycle identity_cocycle(std::shared_ptr<const Net> net);

// One-dimensional characters of the symmetry group, by name: "trivial" always;
// on signed permutation groups also "det", "perm" (sign of the coordinate
// permutation) and "det*perm". InvariantViolation if the result is not a
// homomorphism, ConfigInvalid for unknown names.
std::vector<int> character(const IndexPoset& P, const std::string& name);

// s(o): a site of o, with s(λo) = λ s(o). InvariantViolation if some orbit
// representative has no site fixed by its stabiliser.
std::vector<int> site_assignment(const Net& net);

enum class Charge { Boson, Fermion };
const char* to_string(Charge c);
// F_j = Z_j (boson) or the Jordan-Wigner string Z_1..Z_{j-1} X_j (fermion)
PauliElement charged_string(Charge c, int site);
// X_b(λ) = χ(λ) F_{s(∂0b)} F_{s(∂1b)}
CovariantCocycle charge_pair(std::shared_ptr<const Net> net, Charge c, const std::vector<int>& chi);

// Cocycle read off a table keyed by (λ, canonical 1-simplex). A 1-simplex
// outside the table takes the value of the canonical one with the same ends.
CovariantCocycle table_cocycle(std::shared_ptr<const Net> net, std::map<std::pair<int, Simplex>, PauliElement> values,
                               json provenance);

// ---- verification -------------------------------------------------------------

struct CheckResult {
  std::string check;
  long instances = 0;
  bool holds = true;
  json witness;  // first failing instance, null if none
};

struct VerifyOptions {
  int homotopy_pairs = 60;
  int covariance_samples = 60;
  uint64_t seed = 1;
  int jobs = 1;
};

struct CocycleReport {
  std::vector<CheckResult> checks;
  bool ok() const;
  const CheckResult& at(const std::string& check) const;
};

// Never throws on a failed identity; the report names the first failure.
CocycleReport verify_cocycle(const CovariantCocycle& X, const VerifyOptions& opt = {});

// X_p = X_{b_n} ... X_{b_1}; InvalidPath on a broken path.
PauliElement evaluate_path(const CovariantCocycle& X, const Path& p);
PauliElement evaluate_object(const CovariantCocycle& X, int o, int g);

// ---- morphism of a cocycle ----------------------------------------------------

// ρ^o_a(A) = X_{p} A X_{p}* along the canonical path p from ã to o, with ã
// the least element disjoint from a. SupportViolation if A ∉ 𝒜(a),
// NoDisjointTargets if nothing is disjoint from a.
PauliElement rho(const CovariantCocycle& X, int o, int a, const PauliElement& A);
PauliElement rho_via(const CovariantCocycle& X, int o, int a, int partner, const PauliElement& A);
int disjoint_partner(const IndexPoset& P, int a);  // -1 if none

// ---- arrows ---------------------------------------------------------------------

struct Intertwiner {
  CovariantCocycle source, target;
  std::vector<PauliElement> value;  // per element
};

Intertwiner identity_arrow(const CovariantCocycle& X);
Intertwiner constant_arrow(const CovariantCocycle& X, const CovariantCocycle& Y, const GaussQ& c);
// membership t_a ∈ 𝒜(a) and α⁻¹_λ(t_{λ∂0b}) X_b(λ) = Y_b(λ) t_{∂1b} on all
// canonical b and all λ
CheckResult verify_intertwiner(const Intertwiner& t);
// (t·s)_a = t_a s_a; ShapeMismatch unless s.target is t.source
Intertwiner compose(const Intertwiner& t, const Intertwiner& s);
Intertwiner adjoint(const Intertwiner& t);
bool is_unitary(const Intertwiner& t);
// same net and equal values on every canonical 1-simplex and λ
bool same_values(const CovariantCocycle& X, const CovariantCocycle& Y);

// The space (X,Y), solved exactly in the Pauli basis. Needs every value to be
// a single string with phase in {±1, ±i}; otherwise computed = false.
struct IntertwinerSpace {
  bool computed = false;
  long dim = 0;
  std::vector<Intertwiner> basis;  // at most `max_basis` entries
  std::string reason;
};
IntertwinerSpace intertwiner_space(const CovariantCocycle& X, const CovariantCocycle& Y, size_t max_basis = 16);

// ---- subobjects and direct sums -------------------------------------------------

// k(a): least element strictly inside a, or a itself when a is minimal
int inner_choice(const IndexPoset& P, int a);

struct Subobject {
  CovariantCocycle Y;
  Intertwiner w;  // isometry in (Y, X) with w w* = e
};
// witnesses: element -> isometry v_a ∈ 𝒜(a) with v_a v_a* = e_{k(a)}. When
// e_{k(a)} = 1 the witness defaults to 1. NotAProjection, WitnessInvalid,
// BorchersUnavailable.
Subobject subobject(const CovariantCocycle& X, const Intertwiner& e, const std::map<int, PauliElement>& witnesses);

struct DirectSum {
  CovariantCocycle Z;
  Intertwiner v, w;  // v ∈ (X,Z), w ∈ (Y,Z), v v* + w w* = 1
};
// witnesses: element -> (v_a, w_a) isometries of 𝒜(a) with v v* + w w* = 1
DirectSum direct_sum(const CovariantCocycle& X, const CovariantCocycle& Y,
                     const std::map<int, std::pair<PauliElement, PauliElement>>& witnesses);

// ---- tensor structure ---------------------------------------------------------------

// (X⊗Y)_b(λ) = X_b(λ) ρ^{∂1b}_{|b|}(Y_b(λ)); NetMismatch
CovariantCocycle tensor(const CovariantCocycle& X, const CovariantCocycle& Y);
// (t⊗s)_a = t_a ρ^a_a(s_a), ρ of t.source
Intertwiner tensor_arrows(const Intertwiner& t, const Intertwiner& s);

// p padded with degenerate 1-simplices up to `length`, at the end or the front
Path pad_path(const IndexPoset& P, const Path& p, size_t length, bool at_front = false);
// (X×Y)_{p,q}; the shorter path is padded at its end
PauliElement extended_product(const CovariantCocycle& X, const CovariantCocycle& Y, const Path& p, const Path& q);

struct PathPair {
  Path p, q;  // both from a, with disjoint ends
};
// Admissible pairs from a, nearest targets first (at most `limit`).
std::vector<PathPair> epsilon_paths(const IndexPoset& P, int a, size_t limit);
// ε(X,Y)_a = (Y×X)*_{q,p} (X×Y)_{p,q}; NoDisjointTargets
PauliElement epsilon(const CovariantCocycle& X, const CovariantCocycle& Y, int a, const PathPair& pq);
PauliElement epsilon(const CovariantCocycle& X, const CovariantCocycle& Y, int a);
// ε(X,Y) as an arrow (X⊗Y, Y⊗X), first admissible pair at each element
Intertwiner epsilon_arrow(const CovariantCocycle& X, const CovariantCocycle& Y);

// ---- conjugates and statistics ---------------------------------------------------

// The Roberts cocycle X_{p_{a,∂0b}} X_{p_{∂1b,a}} with a ⊥ |b|; identity λ only.
CovariantCocycle roberts_conjugate(const CovariantCocycle& X);

struct StatisticsOptions {
  size_t elements = 0;       // 0: all elements
  size_t path_pairs = 10;    // per element
  const AxiomReport* axioms = nullptr;  // computed (without K7) when absent
  bool irreducibility = true;           // also solve for (X,X)
};

struct StatisticsReport {
  bool simple = false;
  std::optional<int> chi;
  std::optional<long> dimension;
  bool irreducible = false;
  bool irreducibility_computed = false;
  long samples = 0;
  bool path_dependent = false;    // ε differed between path choices
  bool annotated = false;         // K6 fails: independence observed, not asserted
  std::vector<std::string> values;  // distinct ε values seen
  std::string note;
};

StatisticsReport statistics(const CovariantCocycle& X, const StatisticsOptions& opt = {});

// X̄_b(λ) = ρ̄^{∂1b}_{|b|}(X_b(λ)*). NotSimple, PathDependent.
CovariantCocycle conjugate(const CovariantCocycle& X, const StatisticsOptions& opt = {});
// φ(t)_a = ρ̄^a_a(t_a) for t ∈ (X⊗Z, X⊗Y); the result lies in (Z, Y)
Intertwiner left_inverse(const CovariantCocycle& X, const Intertwiner& t, const CovariantCocycle& Z,
                         const CovariantCocycle& Y);
// r ∈ (ι, X̄⊗X), r̄ ∈ (ι, X⊗X̄) and (r̄*⊗1)(1⊗r) = 1_X, (r*⊗1)(1⊗r̄) = 1_X̄
CheckResult check_conjugate_equations(const CovariantCocycle& X, const CovariantCocycle& Xbar, const Intertwiner& r,
                                      const Intertwiner& rbar);

// ---- serialization ---------------------------------------------------------------

std::string simplex_key(const IndexPoset& P, const Simplex& b);  // "d1|d0|support"
json cocycle_to_json(const CovariantCocycle& X);  // canonical values only
CovariantCocycle cocycle_from_json(std::shared_ptr<const Net> net, const json& j);
json check_to_json(const CheckResult& c);
json cocycle_report_to_json(const CocycleReport& r);
json statistics_to_json(const StatisticsReport& s);

}  // namespace sectorkit
