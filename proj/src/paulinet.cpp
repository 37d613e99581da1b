#include "sectorkit/paulinet.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "sectorkit/error.hpp"

namespace sectorkit {

// ---- F2 linear algebra ------------------------------------------------------

namespace {

// linear bit index: x bit k -> k, z bit k -> kMaxSites + k
int pivot_of(const PauliString& v) {
  for (int w = 0; w < 2; ++w)
    if (v.x[w]) return w * 64 + std::countr_zero(v.x[w]);
  for (int w = 0; w < 2; ++w)
    if (v.z[w]) return kMaxSites + w * 64 + std::countr_zero(v.z[w]);
  return -1;
}

bool bit(const PauliString& v, int idx) { return idx < kMaxSites ? v.get_x(idx) : v.get_z(idx - kMaxSites); }

void set_bit(PauliString& v, int idx) {
  if (idx < kMaxSites)
    v.set_x(idx, true);
  else
    v.set_z(idx - kMaxSites, true);
}

PauliString swap_xz(const PauliString& v) {
  PauliString r;
  r.x = v.z;
  r.z = v.x;
  return r;
}

}  // namespace

Subspace Subspace::span(int n, const std::vector<PauliString>& vs) {
  Subspace s(n);
  for (const auto& v : vs) s.insert(v);
  return s;
}

Subspace Subspace::full(int n, const std::vector<int>& sites) {
  Subspace s(n);
  for (int k : sites) {
    s.insert(PauliString::X(k));
    s.insert(PauliString::Z(k));
  }
  return s;
}

PauliString Subspace::reduce(PauliString v) const {
  for (const auto& b : basis_)
    if (bit(v, pivot_of(b))) v = v ^ b;
  return v;
}

bool Subspace::insert(PauliString v) {
  v = reduce(v);
  int p = pivot_of(v);
  if (p < 0) return false;
  for (auto& b : basis_)
    if (bit(b, p)) b = b ^ v;
  auto pos = std::lower_bound(basis_.begin(), basis_.end(), p,
                              [](const PauliString& b, int piv) { return pivot_of(b) < piv; });
  basis_.insert(pos, v);
  return true;
}

bool Subspace::contains(const Subspace& o) const {
  for (const auto& b : o.basis_)
    if (!contains(b)) return false;
  return true;
}

Subspace Subspace::operator+(const Subspace& o) const {
  Subspace s = *this;
  s.n_ = std::max(n_, o.n_);
  for (const auto& b : o.basis_) s.insert(b);
  return s;
}

Subspace Subspace::annihilator() const {
  std::vector<int> pivots;
  for (const auto& b : basis_) pivots.push_back(pivot_of(b));
  Subspace out(n_);
  for (int part = 0; part < 2; ++part) {
    for (int k = 0; k < n_; ++k) {
      int f = part * kMaxSites + k;
      if (std::find(pivots.begin(), pivots.end(), f) != pivots.end()) continue;
      PauliString u;
      set_bit(u, f);
      for (size_t i = 0; i < basis_.size(); ++i)
        if (bit(basis_[i], f)) set_bit(u, pivots[i]);
      out.insert(u);
    }
  }
  return out;
}

Subspace Subspace::symplectic() const {
  Subspace j(n_);
  for (const auto& b : basis_) j.insert(swap_xz(b));
  return j.annihilator();
}

Subspace Subspace::intersect(const Subspace& o) const {
  Subspace a = *this, b = o;
  a.n_ = b.n_ = std::max(n_, o.n_);
  return (a.annihilator() + b.annihilator()).annihilator();
}

// ---- algebras ----------------------------------------------------------------

bool NetAlgebra::contains(const PauliElement& e) const {
  for (const auto& [s, c] : e.terms())
    if (!space.contains(s)) return false;
  return true;
}

std::vector<PauliElement> NetAlgebra::basis_elements() const {
  std::vector<PauliElement> out;
  for (const auto& b : space.basis()) out.emplace_back(b);
  return out;
}

NetAlgebra generated_algebra(int n, const std::vector<PauliString>& generators, const std::vector<int>& sites) {
  std::vector<int> s = sites;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (const auto& g : generators)
    for (int k : g.support())
      if (!std::binary_search(s.begin(), s.end(), k))
        throw Error(ErrorKind::SupportViolation, g.str() + " acts outside its sites");
  return {s, Subspace::span(n, generators)};
}

NetAlgebra commutant(const NetAlgebra& A, const NetAlgebra& within) {
  return {within.sites, within.space.intersect(A.space.symplectic())};
}

const char* to_string(NetModel m) {
  switch (m) {
    case NetModel::Full: return "Full";
    case NetModel::EvenZ2: return "EvenZ2";
    case NetModel::EvenFermion: return "EvenFermion";
    case NetModel::Synthetic: return "Synthetic";
  }
  return "?";
}

NetModel parse_net_model(const std::string& s) {
  for (auto m : {NetModel::Full, NetModel::EvenZ2, NetModel::EvenFermion, NetModel::Synthetic})
    if (s == to_string(m)) return m;
  throw Error(ErrorKind::ConfigInvalid, "unknown net model '" + s + "'");
}

NetAlgebra Net::site_algebra(const std::vector<int>& sites) const {
  std::vector<PauliString> gens;
  for (size_t i = 0; i < sites.size(); ++i) {
    int k = sites[i];
    switch (model) {
      case NetModel::Full:
      case NetModel::Synthetic:
        gens.push_back(PauliString::X(k));
        gens.push_back(PauliString::Z(k));
        break;
      case NetModel::EvenZ2:
        // even number of Z: all X, and Z pairs
        gens.push_back(PauliString::X(k));
        if (i) gens.push_back(PauliString::Z(sites[0]) ^ PauliString::Z(k));
        break;
      case NetModel::EvenFermion:
        gens.push_back(PauliString::Z(k));
        if (i) gens.push_back(PauliString::X(sites[0]) ^ PauliString::X(k));
        break;
    }
  }
  return generated_algebra(nsites, gens, sites);
}

NetAlgebra Net::global_algebra() const {
  NetAlgebra g{{}, Subspace(nsites)};
  for (const auto& a : algebras) {
    g.space = g.space + a.space;
    g.sites.insert(g.sites.end(), a.sites.begin(), a.sites.end());
  }
  std::sort(g.sites.begin(), g.sites.end());
  g.sites.erase(std::unique(g.sites.begin(), g.sites.end()), g.sites.end());
  return g;
}

PauliElement Net::alpha(int g, const PauliElement& A) const { return A.permuted(rep.at(g)); }

PauliElement Net::alpha_inv(int g, const PauliElement& A) const { return A.permuted(rep.at(poset->inverse.at(g))); }

// ---- construction -------------------------------------------------------------

namespace {

void lattice(int dim, long lo, long hi, std::vector<Q>& cur, std::vector<std::vector<Q>>& out) {
  if (static_cast<int>(cur.size()) == dim) {
    out.push_back(cur);
    return;
  }
  for (long v = lo; v <= hi; ++v) {
    cur.push_back(Q(v));
    lattice(dim, lo, hi, cur, out);
    cur.pop_back();
  }
}

void finish(Net& net, const std::vector<std::vector<PauliString>>& generators) {
  const IndexPoset& P = *net.poset;
  if (net.nsites <= 0 || net.nsites > kMaxSites)
    throw Error(ErrorKind::ConfigInvalid, "net needs between 1 and " + std::to_string(kMaxSites) + " sites");
  if (net.site_map.size() != P.size()) throw Error(ErrorKind::ShapeMismatch, "site map does not cover the poset");
  for (auto& s : net.site_map) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int k : s)
      if (k < 0 || k >= net.nsites) throw Error(ErrorKind::IndexOutOfRange, "site " + std::to_string(k + 1));
  }
  if (net.rep.empty()) {
    std::vector<int> id(net.nsites);
    for (int k = 0; k < net.nsites; ++k) id[k] = k;
    net.rep.assign(P.action.size(), id);
  }
  if (net.rep.size() != P.action.size()) throw Error(ErrorKind::ShapeMismatch, "rep does not cover the group");
  for (const auto& r : net.rep) {
    std::vector<int> s = r;
    std::sort(s.begin(), s.end());
    for (int k = 0; k < net.nsites; ++k)
      if (static_cast<int>(s.size()) != net.nsites || s[k] != k)
        throw Error(ErrorKind::ShapeMismatch, "rep entry is not a site permutation");
  }
  net.algebras.clear();
  for (size_t o = 0; o < P.size(); ++o) {
    if (net.model == NetModel::Synthetic) {
      if (generators.size() != P.size()) throw Error(ErrorKind::ShapeMismatch, "synthetic net needs generators per element");
      net.algebras.push_back(generated_algebra(net.nsites, generators[o], net.site_map[o]));
    } else {
      net.algebras.push_back(net.site_algebra(net.site_map[o]));
    }
  }
}

}  // namespace

Net make_net(std::shared_ptr<const IndexPoset> P, NetModel model, long lo, long hi) {
  if (P->regions.empty()) throw Error(ErrorKind::ConfigInvalid, "geometric net needs a region poset");
  const auto* first = std::get_if<SliceBall>(&P->regions[0].shape);
  if (!first) throw Error(ErrorKind::ChartMismatch, "geometric nets live on SliceBall posets");
  Chart chart = first->center.chart;
  int dim = static_cast<int>(first->center.coords.size());

  Net net;
  net.poset = P;
  net.model = model;
  std::vector<Q> cur;
  lattice(dim, lo, hi, cur, net.site_coords);
  net.nsites = static_cast<int>(net.site_coords.size());
  std::map<std::vector<Q>, int> index;
  for (int k = 0; k < net.nsites; ++k) index[net.site_coords[k]] = k;

  for (const auto& r : P->regions) {
    const auto* b = std::get_if<SliceBall>(&r.shape);
    if (!b) throw Error(ErrorKind::ChartMismatch, "region " + r.id + " is not a SliceBall");
    std::vector<int> s;
    for (int k = 0; k < net.nsites; ++k) {
      Q d2 = 0;
      for (int i = 0; i < dim; ++i) {
        Q d = net.site_coords[k][i] - b->center.coords[i];
        d2 += d * d;
      }
      if (d2 <= b->radius * b->radius) s.push_back(k);
    }
    net.site_map.push_back(std::move(s));
  }
  for (const auto& g : P->symmetries) {
    std::vector<int> perm(net.nsites);
    for (int k = 0; k < net.nsites; ++k) {
      auto img = g.apply(Point{net.site_coords[k], chart}).coords;
      auto it = index.find(img);
      if (it == index.end()) throw Error(ErrorKind::NotClosed, "symmetry " + g.id + " maps a site outside the box");
      perm[k] = it->second;
    }
    net.rep.push_back(std::move(perm));
  }
  finish(net, {});
  return net;
}

Net make_net(std::shared_ptr<const IndexPoset> P, NetModel model, int nsites, std::vector<std::vector<int>> site_map,
             std::vector<std::vector<int>> rep, const std::vector<std::vector<PauliString>>& generators) {
  Net net;
  net.poset = std::move(P);
  net.model = model;
  net.nsites = nsites;
  net.site_map = std::move(site_map);
  net.rep = std::move(rep);
  finish(net, generators);
  return net;
}

// ---- checks -------------------------------------------------------------------

const NetCheck& NetReport::at(const std::string& property) const {
  for (const auto& c : checks)
    if (c.property == property) return c;
  throw Error(ErrorKind::UnknownElement, "no check named " + property);
}

bool relative_duality_holds(const Net& net, int o, PauliString* witness) {
  const IndexPoset& P = net.P();
  Subspace outside(net.nsites);
  for (size_t a = 0; a < P.size(); ++a)
    if (P.perp[o][a]) outside = outside + net.algebra(a).space;
  Subspace dual = net.global_algebra().space.intersect(outside.symplectic());
  const Subspace& local = net.algebra(o).space;
  if (dual == local) return true;
  if (witness) {
    for (const auto& b : dual.basis())
      if (!local.contains(b)) { *witness = b; return false; }
    for (const auto& b : local.basis())
      if (!dual.contains(b)) { *witness = b; return false; }
  }
  return false;
}

NetReport check_net(const Net& net) {
  const IndexPoset& P = net.P();
  const size_t n = P.size();
  NetReport rep;

  NetCheck iso{"isotony"};
  for (size_t o = 0; o < n && iso.holds; ++o)
    for (size_t a = 0; a < n && iso.holds; ++a) {
      if (!P.leq[o][a]) continue;
      for (const auto& b : net.algebra(o).space.basis())
        if (!net.algebra(a).contains(b)) {
          iso.holds = false;
          iso.witness = {{"inner", P.elements[o]}, {"outer", P.elements[a]}, {"string", b.str()}};
          break;
        }
    }
  rep.checks.push_back(iso);

  NetCheck caus{"causality"};
  for (size_t o = 0; o < n && caus.holds; ++o)
    for (size_t a = o + 1; a < n && caus.holds; ++a) {
      if (!P.perp[o][a]) continue;
      for (const auto& s : net.algebra(o).space.basis()) {
        for (const auto& t : net.algebra(a).space.basis())
          if (!s.commutes(t)) {
            caus.holds = false;
            caus.witness = {{"a", P.elements[o]}, {"b", P.elements[a]}, {"strings", {s.str(), t.str()}}};
            break;
          }
        if (!caus.holds) break;
      }
    }
  rep.checks.push_back(caus);

  NetAlgebra K = net.global_algebra();
  Subspace comm = K.space.symplectic();
  Subspace center = K.space.intersect(comm);
  NetCheck fac{"factoriality"};
  if (center.dim() > 0) {
    fac.holds = false;
    fac.witness = {{"central", center.basis()[0].str()}, {"center_dim", center.dim()}};
  }
  rep.checks.push_back(fac);

  NetCheck irr{"irreducibility"};
  if (comm.dim() > 0) {
    irr.holds = false;
    irr.witness = {{"commutes_with_all", comm.basis()[0].str()}, {"commutant_dim", comm.dim()}};
  }
  rep.checks.push_back(irr);

  NetCheck dual{"duality"};
  json fails = json::array();
  for (size_t o = 0; o < n; ++o) {
    PauliString w;
    if (!relative_duality_holds(net, static_cast<int>(o), &w)) {
      rep.duality_fails.push_back(P.elements[o]);
      if (fails.size() < 8) fails.push_back({{"element", P.elements[o]}, {"string", w.str()}});
    }
  }
  if (!rep.duality_fails.empty()) {
    dual.holds = false;
    dual.witness = {{"failing", rep.duality_fails.size()}, {"examples", fails}};
  }
  rep.checks.push_back(dual);

  NetCheck cov{"covariance"};
  for (size_t g = 0; g < P.action.size() && cov.holds; ++g)
    for (size_t o = 0; o < n && cov.holds; ++o) {
      Subspace img(net.nsites);
      for (const auto& b : net.algebra(o).space.basis()) img.insert(net.alpha(static_cast<int>(g), b));
      if (!(img == net.algebra(P.action[g][o]).space)) {
        cov.holds = false;
        cov.witness = {{"symmetry", P.group_ids[g]}, {"element", P.elements[o]}};
      }
    }
  rep.checks.push_back(cov);
  return rep;
}

BorchersResult borchers_witness(const Net& net, int o, int a, const PauliElement& E) {
  const IndexPoset& P = net.P();
  if (!P.leq.at(o).at(a)) throw Error(ErrorKind::InvariantViolation, P.elements[o] + " is not inside " + P.elements[a]);
  if (!net.algebra(o).contains(E)) throw Error(ErrorKind::SupportViolation, "projection is not in the local algebra");
  if (!E.is_projection()) throw Error(ErrorKind::NotAProjection, E.str());
  BorchersResult r;
  if (E == PauliElement(GaussQ(1))) {
    r.available = true;
    r.isometry = E;
    return r;
  }
  // V*V = 1 and VV* = E give tr E = tr 1 on a finite-dimensional space
  r.reason = "trace obstruction: a proper projection is not equivalent to 1 in finite dimensions";
  return r;
}

// ---- JSON ---------------------------------------------------------------------

json net_to_json(const Net& net) {
  const IndexPoset& P = net.P();
  json j;
  j["model"] = to_string(net.model);
  j["sites"] = net.nsites;
  json sm = json::object(), rp = json::object();
  for (size_t o = 0; o < P.size(); ++o) {
    json s = json::array();
    for (int k : net.site_map[o]) s.push_back(k + 1);
    sm[P.elements[o]] = s;
  }
  for (size_t g = 0; g < net.rep.size(); ++g) {
    json s = json::array();
    for (int k : net.rep[g]) s.push_back(k + 1);
    rp[P.group_ids[g]] = s;
  }
  j["site_map"] = sm;
  j["rep"] = rp;
  if (net.model == NetModel::Synthetic) {
    json gens = json::object();
    for (size_t o = 0; o < P.size(); ++o) {
      json s = json::array();
      for (const auto& b : net.algebra(o).space.basis()) s.push_back(b.str());
      gens[P.elements[o]] = s;
    }
    j["generators"] = gens;
  }
  return j;
}

namespace {

PauliString parse_string(const std::string& s) {
  auto e = PauliElement::parse("( 1/1 + 0/1 i ) " + s);
  return e.terms().at(0).first;
}

}  // namespace

Net net_from_json(std::shared_ptr<const IndexPoset> P, const json& j) {
  NetModel model = parse_net_model(j.at("model").get<std::string>());
  if (!j.contains("site_map")) {
    auto box = j.at("box").get<std::vector<long>>();
    if (box.size() != 2 || box[0] > box[1]) throw Error(ErrorKind::ConfigInvalid, "box must be [lo, hi]");
    return make_net(std::move(P), model, box[0], box[1]);
  }
  int n = j.at("sites").get<int>();
  std::vector<std::vector<int>> site_map(P->size());
  for (const auto& [id, sites] : j.at("site_map").items()) {
    auto& dst = site_map[P->index_of(id)];
    for (int k : sites.get<std::vector<int>>()) dst.push_back(k - 1);
  }
  std::vector<std::vector<int>> rep;
  if (j.contains("rep") && !j["rep"].empty()) {
    rep.assign(P->group_ids.size(), {});
    for (const auto& [g, perm] : j["rep"].items()) {
      auto& dst = rep[P->group_index(g)];
      for (int k : perm.get<std::vector<int>>()) dst.push_back(k - 1);
    }
  }
  std::vector<std::vector<PauliString>> gens;
  if (model == NetModel::Synthetic) {
    gens.assign(P->size(), {});
    for (const auto& [id, list] : j.at("generators").items())
      for (const auto& s : list) gens[P->index_of(id)].push_back(parse_string(s.get<std::string>()));
  }
  return make_net(std::move(P), model, n, std::move(site_map), std::move(rep), gens);
}

json net_report_to_json(const Net& net, const NetReport& r) {
  json j = json::object();
  for (const auto& c : r.checks) j[c.property] = {{"holds", c.holds}, {"witness", c.witness}};
  j["model"] = to_string(net.model);
  j["sites"] = net.nsites;
  return j;
}

}  // namespace sectorkit
