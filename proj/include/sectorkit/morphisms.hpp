#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectorkit/cocycle.hpp"

namespace sectorkit {

// U^ρ_o(λ) = W U(λ), kept as the pair (W, λ)
struct CovarianceOp {
  PauliElement W;
  int g = 0;
};

struct LocalizeOptions {
  bool strict = true;        // PosetUnsuitable when K4 or K6 fails
  int alternatives = 3;      // other choices of ã re-checked per element
  const AxiomReport* axioms = nullptr;
};

// ρ^o built from a cocycle: ρ^o_a(A) = X_{p_{o,ã}} A X_{p_{o,ã}}*, ã ⊥ a.
class LocalizedMorphism {
 public:
  LocalizedMorphism(CovariantCocycle X, int o);

  const CovariantCocycle& cocycle() const { return X_; }
  int localization() const { return o_; }
  const IndexPoset& P() const { return X_.P(); }

  PauliElement apply(int a, const PauliElement& A) const;  // SupportViolation
  // A in the algebra generated by 𝒜(a_1), ..., 𝒜(a_n); NoCommonDisjoint
  PauliElement apply(const std::vector<int>& regions, const PauliElement& A) const;
  CovarianceOp u_rho(int g) const;

 private:
  CovariantCocycle X_;
  int o_;
};

// PosetUnsuitable (K4/K6 witness in the message); the choice of ã is re-checked
// against `alternatives` other disjoint elements, InvariantViolation otherwise.
LocalizedMorphism localize(const CovariantCocycle& X, int o, const LocalizeOptions& opt = {});

// v_{ô,o}: X along the canonical path o -> ô. Disconnected.
PauliElement transport(const CovariantCocycle& X, int o_hat, int o);

// ---- the category Δ ----------------------------------------------------------

// A transportable covariant family: ρ^o for every o, transports v_{x,y}
// (from y to x) and covariance operators. Nothing here refers to a cocycle,
// so the way back to cocycles uses only these three maps.
struct DeltaObject {
  std::shared_ptr<const Net> net;
  std::function<PauliElement(int o, int a, const PauliElement& A)> apply;
  std::function<PauliElement(int to, int from)> transport;
  std::function<CovarianceOp(int o, int g)> covariance;
  json provenance = json::object();

  const IndexPoset& P() const { return net->P(); }
};

struct DeltaArrow {
  DeltaObject source, target;
  std::vector<PauliElement> value;  // t_o ∈ 𝒜(o)
};

struct MorphismReport {
  std::vector<CheckResult> checks;
  bool ok() const;
  const CheckResult& at(const std::string& check) const;
};

struct LawOptions {
  int jobs = 1;
  bool all_transport_pairs = false;  // transport intertwining on all pairs instead of 1-simplices
  int alternatives = 3;
};

// The morphism laws on a cocycle-built family: consistency, localization,
// stability, transport, the X_b(λ) relation, group law, covariance and the
// independence of ã. Report-based, never throws on a failed law.
MorphismReport check_morphism_laws(const CovariantCocycle& X, const LawOptions& opt = {});

// Group law over the full table and covariance over all (o, a, λ) on basis
// elements. Used by check_morphism_laws and for Δ objects in general.
CheckResult check_group_law(const DeltaObject& D, int jobs = 1);
CheckResult check_covariance(const DeltaObject& D, int jobs = 1);
// v_{x,y} ρ^y = ρ^x v_{x,y}, and v_{x,y} v_{y,z} = v_{x,z} over all triples
CheckResult check_transport(const DeltaObject& D, int jobs = 1);
CheckResult check_transport_law(const DeltaObject& D, int jobs = 1);
MorphismReport verify_delta(const DeltaObject& D, int jobs = 1);

// t_o ρ^o_a(A) = γ^o_a(A) t_o and t_o U^ρ_o(λ) = U^γ_o(λ) t_o
CheckResult verify_delta_arrow(const DeltaArrow& t, int jobs = 1);

// ---- the two functors -----------------------------------------------------------

DeltaObject functor_Z_to_D(const CovariantCocycle& X);
DeltaArrow functor_Z_to_D(const Intertwiner& t);

// X_b(λ) = α_λ⁻¹(v_{λ∂0b,a} W_a(λ)) v_{a,∂1b}, a the pole. When `verify` is
// set the Δ laws are checked first, AxiomsFail with the failing law otherwise.
CovariantCocycle functor_D_to_Z(const DeltaObject& D, int pole, bool verify = true, int jobs = 1);
// φ(t)_o = v^γ_{o,a} t_a v^ρ_{a,o}; the objects are mapped with the same pole
Intertwiner functor_D_to_Z(const DeltaArrow& t, int pole);

// Unitary t ∈ (X, Y), verified, from phased constants, the pole transport
// Y_{p_{o,a}} X_{p_{a,o}} for every pole a in `poles`, and a basis of (X,Y).
struct ArrowSearch {
  bool found = false;
  std::optional<Intertwiner> arrow;
  std::string candidate;  // which family produced it
  long tried = 0;
};
ArrowSearch find_unitary_arrow(const CovariantCocycle& X, const CovariantCocycle& Y, const std::vector<int>& poles = {});

struct RoundTrip {
  int pole = -1, other_pole = -1;
  CocycleReport verify;        // of the round-tripped cocycle
  MorphismReport delta;        // Δ laws of the intermediate family
  ArrowSearch to_input;        // input -> round trip
  ArrowSearch between_poles;   // pole -> other pole
  bool exact = false;          // round trip reproduces the values
  bool ok() const;
};
// pole defaults to the least element; other_pole to the greatest
RoundTrip functor_roundtrip(const CovariantCocycle& X, int pole = -1, int other_pole = -1, int jobs = 1);

json morphism_report_to_json(const MorphismReport& r);
json roundtrip_to_json(const IndexPoset& P, const RoundTrip& r);

}  // namespace sectorkit
