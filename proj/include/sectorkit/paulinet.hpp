#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectorkit/pauli.hpp"
#include "sectorkit/poset.hpp"

namespace sectorkit {

// F2 subspace of the symplectic space over n qubits, vectors written as Pauli
// strings. The basis is kept in reduced row-echelon form (pivot = lowest set
// bit, x bits before z bits), which makes it canonical.
class Subspace {
 public:
  explicit Subspace(int n = 0) : n_(n) {}
  static Subspace span(int n, const std::vector<PauliString>& vs);
  static Subspace full(int n, const std::vector<int>& sites);

  int ambient() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<PauliString>& basis() const { return basis_; }

  bool insert(PauliString v);  // false if already contained
  PauliString reduce(PauliString v) const;
  bool contains(const PauliString& v) const { return reduce(v).is_identity(); }
  bool contains(const Subspace& o) const;

  Subspace operator+(const Subspace& o) const;
  Subspace intersect(const Subspace& o) const;
  Subspace annihilator() const;   // plain dot product
  Subspace symplectic() const;    // {v : ω(v, w) = 0 for all w}
  bool operator==(const Subspace& o) const { return n_ == o.n_ && basis_ == o.basis_; }

 private:
  int n_;
  std::vector<PauliString> basis_;  // sorted by pivot
};

struct NetAlgebra {
  std::vector<int> sites;  // 0-based, sorted
  Subspace space;

  bool contains(const PauliString& s) const { return space.contains(s); }
  bool contains(const PauliElement& e) const;
  // basis strings of the algebra, as elements
  std::vector<PauliElement> basis_elements() const;
};

// SupportViolation if a generator acts outside `sites`.
NetAlgebra generated_algebra(int n, const std::vector<PauliString>& generators, const std::vector<int>& sites);
NetAlgebra commutant(const NetAlgebra& A, const NetAlgebra& within);

enum class NetModel { Full, EvenZ2, EvenFermion, Synthetic };
const char* to_string(NetModel m);
NetModel parse_net_model(const std::string& s);  // ConfigInvalid

struct Net {
  std::shared_ptr<const IndexPoset> poset;
  NetModel model = NetModel::Full;
  int nsites = 0;
  std::vector<std::vector<Q>> site_coords;  // lattice point of each site, when geometric
  std::vector<std::vector<int>> site_map;   // per element
  std::vector<std::vector<int>> rep;        // per group element: site k -> rep[g][k]
  std::vector<NetAlgebra> algebras;         // per element

  const IndexPoset& P() const { return *poset; }
  const NetAlgebra& algebra(int o) const { return algebras.at(o); }
  NetAlgebra global_algebra() const;  // generated by all local algebras
  NetAlgebra site_algebra(const std::vector<int>& sites) const;  // model algebra on a site set

  // α_λ(A) = U(λ) A U(λ)*
  PauliElement alpha(int g, const PauliElement& A) const;
  PauliElement alpha_inv(int g, const PauliElement& A) const;
  PauliString alpha(int g, const PauliString& s) const { return s.permuted(rep.at(g)); }
};

// Geometric net over a SliceBall poset: one site per integer point of
// [lo, hi]^d, each region owning the sites within its radius.
Net make_net(std::shared_ptr<const IndexPoset> P, NetModel model, long lo, long hi);
// Net from an explicit site map. An empty rep means every symmetry acts
// trivially on sites. For Synthetic nets, `generators` gives the generators of
// each local algebra (by element index).
Net make_net(std::shared_ptr<const IndexPoset> P, NetModel model, int nsites, std::vector<std::vector<int>> site_map,
             std::vector<std::vector<int>> rep = {}, const std::vector<std::vector<PauliString>>& generators = {});

struct NetCheck {
  std::string property;
  bool holds = true;
  json witness = json::object();
};

struct NetReport {
  std::vector<NetCheck> checks;  // isotony, causality, factoriality, irreducibility, duality, covariance
  std::vector<std::string> duality_fails;  // elements where relative duality fails
  const NetCheck& at(const std::string& property) const;
};

NetReport check_net(const Net& net);
// V_o == V_K ∩ (Σ_{a⊥o} V_a)^ω
bool relative_duality_holds(const Net& net, int o, PauliString* witness = nullptr);

struct BorchersResult {
  bool available = false;
  PauliElement isometry;
  std::string reason;
};

// Isometry V in 𝒜(a) with V V* = E, for a projection E in 𝒜(o), o ⊆ a.
// NotAProjection, SupportViolation (E outside 𝒜(o)), InvariantViolation (o ⊄ a).
BorchersResult borchers_witness(const Net& net, int o, int a, const PauliElement& E);

json net_to_json(const Net& net);
Net net_from_json(std::shared_ptr<const IndexPoset> P, const json& j);
json net_report_to_json(const Net& net, const NetReport& r);

}  // namespace sectorkit
