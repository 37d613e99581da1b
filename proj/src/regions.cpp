#include "sectorkit/regions.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "sectorkit/error.hpp"

namespace sectorkit {

// ---- charts and points ----------------------------------------------------

std::string Chart::name() const {
  switch (kind) {
    case ChartKind::Minkowski: return "minkowski(" + std::to_string(dim) + ")";
    case ChartKind::Slice: return "slice(" + std::to_string(dim) + ")";
    case ChartKind::Sphere: return "sphere(" + std::to_string(dim) + ")";
  }
  return "?";
}

Chart Chart::parse(const std::string& s) {
  auto open = s.find('('), close = s.find(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw Error(ErrorKind::ParseError, "bad chart '" + s + "'");
  std::string head = s.substr(0, open);
  int d = std::stoi(s.substr(open + 1, close - open - 1));
  if (head == "minkowski") return {ChartKind::Minkowski, d};
  if (head == "slice") return {ChartKind::Slice, d};
  if (head == "sphere") return {ChartKind::Sphere, d};
  throw Error(ErrorKind::ParseError, "bad chart '" + s + "'");
}

Q Point::norm2() const {
  Q s = 0;
  size_t start = chart.kind == ChartKind::Minkowski ? 1 : 0;
  for (size_t i = start; i < coords.size(); ++i) s += coords[i] * coords[i];
  return s;
}

namespace {

Q dist2(const std::vector<Q>& a, const std::vector<Q>& b, size_t start = 0) {
  Q s = 0;
  for (size_t i = start; i < a.size(); ++i) {
    Q d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Q dot(const std::vector<Q>& a, const std::vector<Q>& b) {
  Q s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// q lies in the causal future (closed) of p
bool in_future(const Point& q, const Point& p) {
  Q dt = q.coords[0] - p.coords[0];
  return dt >= 0 && dt * dt >= dist2(q.coords, p.coords, 1);
}

bool in_closed_diamond(const Point& q, const ApexDoubleCone& d) {
  return in_future(q, d.p_minus) && in_future(d.p_plus, q);
}

Q mod1(const Q& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  Q r = x - Q(fl);
  r.canonicalize();
  return r;
}

// angular distance on the circle, in turns, within [0, 1/2]
Q circle_dist(const Q& a, const Q& b) {
  Q d = mod1(a - b);
  Q other = Q(1) - d;
  return d < other ? d : other;
}

Surd cos_angle(const Point& a, const Point& b) {
  Q n = a.norm2() * b.norm2();
  return {dot(a.coords, b.coords), Q(1) / n};
}

void require_same(const Region& a, const Region& b) {
  if (a.shape.index() != b.shape.index() || !(a.chart() == b.chart()))
    throw Error(ErrorKind::ChartMismatch, a.model_name() + " on " + a.chart().name() + " vs " +
                                              b.model_name() + " on " + b.chart().name());
}

void require_slice(const SliceBall& a, const SliceBall& b) {
  if (a.slice_time != b.slice_time)
    throw Error(ErrorKind::CrossSlice, "slice times " + format_q(a.slice_time) + " and " +
                                           format_q(b.slice_time));
}

enum class Rel { Proper, Closed, Disjoint };

bool cap_relation(const DirectionCap& a, const DirectionCap& b, const Chart& ch, Rel rel) {
  if (ch.dim == 1) {
    Q d = circle_dist(a.center.coords[0], b.center.coords[0]);
    switch (rel) {
      case Rel::Proper: return d + a.half_width < b.half_width;
      case Rel::Closed: return d + a.half_width <= b.half_width;
      case Rel::Disjoint: return d > a.half_width + b.half_width;
    }
  }
  Surd cd = cos_angle(a.center, b.center);
  const Surd &ca = a.cos_radius, &cb = b.cos_radius;
  Surd sa = complement_sine(ca), sb = complement_sine(cb);
  if (rel == Rel::Disjoint) {
    // a + b < pi, then d > a + b  <=>  cos d < cos a cos b - sin a sin b
    if (sign_of_sum({ca, cb}) <= 0) return false;
    return sign_of_sum({ca * cb, -(sa * sb), -cd}) > 0;
  }
  // a <= b (or <), then d <= b - a  <=>  cos d >= cos a cos b + sin a sin b
  int radius_order = sign_of_sum({ca, -cb});
  int s = sign_of_sum({cd, -(ca * cb), -(sa * sb)});
  if (rel == Rel::Proper) return radius_order > 0 && s > 0;
  return radius_order >= 0 && s >= 0;
}

bool relation(const Region& a, const Region& b, Rel rel) {
  require_same(a, b);
  if (auto* ca = std::get_if<ApexDoubleCone>(&a.shape)) {
    const auto& cb = std::get<ApexDoubleCone>(b.shape);
    switch (rel) {
      case Rel::Closed:
        return in_closed_diamond(ca->p_minus, cb) && in_closed_diamond(ca->p_plus, cb);
      case Rel::Proper:
        return relation(a, b, Rel::Closed) && !(a.key() == b.key());
      case Rel::Disjoint:
        // q+ ∉ J+(p-), q- ∉ J-(p+), p+ ∉ J+(q-), p- ∉ J-(q+); the last two
        // restate the first two with the roles of the cones swapped
        return !in_future(cb.p_plus, ca->p_minus) && !in_future(ca->p_plus, cb.p_minus);
    }
  }
  if (auto* ba = std::get_if<SliceBall>(&a.shape)) {
    const auto& bb = std::get<SliceBall>(b.shape);
    require_slice(*ba, bb);
    Q d2 = dist2(ba->center.coords, bb.center.coords);
    switch (rel) {
      case Rel::Proper: {
        Q gap = bb.radius - ba->radius;
        return gap > 0 && d2 < gap * gap;
      }
      case Rel::Closed: {
        Q gap = bb.radius - ba->radius;
        return gap >= 0 && d2 <= gap * gap;
      }
      case Rel::Disjoint: {
        Q s = ba->radius + bb.radius;
        return d2 > s * s;
      }
    }
  }
  if (auto* da = std::get_if<DirectionCap>(&a.shape))
    return cap_relation(*da, std::get<DirectionCap>(b.shape), a.chart(), rel);
  const auto& pa = std::get<PluginShape>(a.shape);
  const auto& pb = std::get<PluginShape>(b.shape);
  if (pa->model_name() != pb->model_name())
    throw Error(ErrorKind::ChartMismatch, pa->model_name() + " vs " + pb->model_name());
  switch (rel) {
    case Rel::Proper: return pa->includes(*pb);
    case Rel::Closed: return pa->contained_in(*pb);
    case Rel::Disjoint: return pa->causally_disjoint(*pb);
  }
  return false;
}

std::string coords_key(const std::vector<Q>& c) {
  std::string s;
  for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + format_q(c[i]);
  return s;
}

std::string short_q(const Q& q) {
  return q.get_den() == 1 ? q.get_num().get_str() : q.get_str();
}

std::string short_coords(const std::vector<Q>& c) {
  std::string s;
  for (size_t i = 0; i < c.size(); ++i) s += (i ? "," : "") + short_q(c[i]);
  return s;
}

}  // namespace

// ---- regions ----------------------------------------------------------------

Chart Region::chart() const {
  if (auto* c = std::get_if<ApexDoubleCone>(&shape)) return c->p_minus.chart;
  if (auto* b = std::get_if<SliceBall>(&shape)) return b->center.chart;
  if (auto* d = std::get_if<DirectionCap>(&shape)) return d->center.chart;
  return std::get<PluginShape>(shape)->chart();
}

std::string Region::model_name() const {
  switch (shape.index()) {
    case 0: return "ApexDoubleCone";
    case 1: return "SliceBall";
    case 2: return "DirectionCap";
    default: return std::get<PluginShape>(shape)->model_name();
  }
}

std::string Region::key() const {
  if (auto* c = std::get_if<ApexDoubleCone>(&shape))
    return "D|" + coords_key(c->p_minus.coords) + "|" + coords_key(c->p_plus.coords);
  if (auto* b = std::get_if<SliceBall>(&shape))
    return "B|" + coords_key(b->center.coords) + "|" + format_q(b->radius) + "|" +
           format_q(b->slice_time);
  if (auto* d = std::get_if<DirectionCap>(&shape)) {
    if (d->center.chart.dim == 1) return "C|" + coords_key(d->center.coords) + "|" + format_q(d->half_width);
    return "S|" + coords_key(d->center.coords) + "|" + format_q(d->cos_radius.c) + "|" +
           format_q(d->cos_radius.r);
  }
  return "P|" + std::get<PluginShape>(shape)->key();
}

bool includes(const Region& inner, const Region& outer) { return relation(inner, outer, Rel::Proper); }
bool contained_in(const Region& inner, const Region& outer) { return relation(inner, outer, Rel::Closed); }
bool causally_disjoint(const Region& a, const Region& b) { return relation(a, b, Rel::Disjoint); }

Region make_slice_ball(std::vector<Q> center, Q radius, Q slice_time) {
  if (radius < 0) throw Error(ErrorKind::InvariantViolation, "negative ball radius");
  Region r;
  Chart ch{ChartKind::Slice, static_cast<int>(center.size())};
  r.id = "B(" + short_coords(center) + ";" + short_q(radius) + ")";
  r.shape = SliceBall{Point{std::move(center), ch}, radius, slice_time};
  return r;
}

Region make_double_cone(std::vector<Q> p_minus, std::vector<Q> p_plus) {
  if (p_minus.size() != p_plus.size() || p_minus.size() < 2)
    throw Error(ErrorKind::ChartMismatch, "cone apexes of different dimension");
  Chart ch{ChartKind::Minkowski, static_cast<int>(p_minus.size())};
  Point a{p_minus, ch}, b{p_plus, ch};
  Q dt = p_plus[0] - p_minus[0];
  if (!(dt > 0 && dt * dt > dist2(p_plus, p_minus, 1)))
    throw Error(ErrorKind::InvariantViolation, "cone apexes not future timelike separated");
  Region r;
  r.id = "D(" + short_coords(p_minus) + ";" + short_coords(p_plus) + ")";
  r.shape = ApexDoubleCone{a, b};
  return r;
}

Region make_circle_cap(Q center_turns, Q half_width_turns) {
  if (!(half_width_turns > 0 && half_width_turns < Q(1, 2)))
    throw Error(ErrorKind::InvariantViolation, "arc half width outside (0, pi)");
  center_turns = mod1(center_turns);
  Region r;
  r.id = "A(" + short_q(center_turns) + ";" + short_q(half_width_turns) + ")";
  DirectionCap cap;
  cap.center = Point{{center_turns}, Chart{ChartKind::Sphere, 1}};
  cap.half_width = half_width_turns;
  r.shape = cap;
  return r;
}

Region make_sphere_cap(std::vector<Q> center, Surd cos_radius) {
  if (center.size() != 3) throw Error(ErrorKind::ChartMismatch, "sphere caps need 3 coordinates");
  Q sq = cos_radius.square();
  if (!(sq < 1)) throw Error(ErrorKind::InvariantViolation, "cap radius outside (0, pi)");
  Point c{std::move(center), Chart{ChartKind::Sphere, 2}};
  if (c.norm2() == 0) throw Error(ErrorKind::InvariantViolation, "zero cap center");
  Region r;
  r.id = "S(" + short_coords(c.coords) + ";" + short_q(cos_radius.c) +
         (cos_radius.r == 1 ? "" : "r" + short_q(cos_radius.r)) + ")";
  DirectionCap cap;
  cap.center = c;
  cap.cos_radius = cos_radius;
  r.shape = cap;
  return r;
}

Surd cos_pi_fraction(const Q& f_in) {
  Q f = f_in;
  // reduce to [0, 2)
  Q twice = f / 2;
  f = mod1(twice) * 2;
  if (f > 1) f = Q(2) - f;  // cos is even around pi
  int sign = 1;
  if (f > Q(1, 2)) {
    f = Q(1) - f;
    sign = -1;
  }
  Surd s;
  if (f == 0) s = Surd::rational(1);
  else if (f == Q(1, 6)) s = {Q(1, 2), Q(3)};
  else if (f == Q(1, 4)) s = {Q(1, 2), Q(2)};
  else if (f == Q(1, 3)) s = Surd::rational(Q(1, 2));
  else if (f == Q(1, 2)) s = Surd::rational(0);
  else throw Error(ErrorKind::ConfigInvalid, "no exact cosine table entry for pi*" + format_q(f_in));
  if (sign < 0) s.c = -s.c;
  return s;
}

// ---- symmetries -------------------------------------------------------------

Point Symmetry::apply(const Point& p) const {
  Point out = p;
  if (kind == SymmetryKind::CircleRotation) {
    if (p.chart.kind != ChartKind::Sphere || p.chart.dim != 1)
      throw Error(ErrorKind::ChartMismatch, "circle rotation on " + p.chart.name());
    out.coords[0] = mod1(p.coords[0] + Q(k, n));
    return out;
  }
  size_t off = p.chart.kind == ChartKind::Minkowski ? 1 : 0;
  if (p.chart.kind == ChartKind::Sphere && p.chart.dim == 1)
    throw Error(ErrorKind::ChartMismatch, "signed permutation on the circle chart");
  if (p.coords.size() - off != perm.size())
    throw Error(ErrorKind::ChartMismatch, "symmetry " + id + " has dimension " +
                                              std::to_string(perm.size()) + ", point chart " +
                                              p.chart.name());
  for (size_t i = 0; i < perm.size(); ++i) out.coords[off + i] = p.coords[off + perm[i]] * signs[i];
  return out;
}

Symmetry Symmetry::compose(const Symmetry& inner) const {
  if (kind != inner.kind) throw Error(ErrorKind::ChartMismatch, "composing symmetries of different kinds");
  Symmetry out;
  out.kind = kind;
  if (kind == SymmetryKind::CircleRotation) {
    // k/n + k'/n' reduced to a common denominator
    Q t = mod1(Q(k, n) + Q(inner.k, inner.n));
    out.k = t.get_num().get_si();
    out.n = t.get_den().get_si();
    out.id = id + "*" + inner.id;
    return out;
  }
  size_t d = perm.size();
  out.perm.resize(d);
  out.signs.resize(d);
  // (this ∘ inner)(x)_i = s_i * (inner x)_{p_i} = s_i * s'_{p_i} * x_{p'_{p_i}}
  for (size_t i = 0; i < d; ++i) {
    out.perm[i] = inner.perm[perm[i]];
    out.signs[i] = signs[i] * inner.signs[perm[i]];
  }
  out.id = id + "*" + inner.id;
  return out;
}

bool Symmetry::same_action(const Symmetry& o) const {
  if (kind != o.kind) return false;
  if (kind == SymmetryKind::CircleRotation) return mod1(Q(k, n) - Q(o.k, o.n)) == 0;
  return perm == o.perm && signs == o.signs;
}

json Symmetry::to_json() const {
  if (kind == SymmetryKind::CircleRotation) return {{"id", id}, {"kind", "circle_rotation"}, {"k", k}, {"n", n}};
  return {{"id", id}, {"kind", "signed_permutation"}, {"perm", perm}, {"signs", signs}};
}

Symmetry Symmetry::from_json(const json& j) {
  Symmetry s;
  s.id = j.at("id").get<std::string>();
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "circle_rotation") {
    s.kind = SymmetryKind::CircleRotation;
    s.k = j.at("k").get<long>();
    s.n = j.at("n").get<long>();
  } else if (kind == "signed_permutation") {
    s.perm = j.at("perm").get<std::vector<int>>();
    s.signs = j.at("signs").get<std::vector<int>>();
  } else {
    throw Error(ErrorKind::ParseError, "unknown symmetry kind " + kind);
  }
  return s;
}

Symmetry Symmetry::identity(int dim) {
  Symmetry s;
  s.id = "e";
  s.perm.resize(dim);
  std::iota(s.perm.begin(), s.perm.end(), 0);
  s.signs.assign(dim, 1);
  return s;
}

namespace {

std::string signed_perm_id(const std::vector<int>& perm, const std::vector<int>& signs) {
  bool ident = true;
  for (size_t i = 0; i < perm.size(); ++i) ident = ident && perm[i] == static_cast<int>(i) && signs[i] == 1;
  if (ident) return "e";
  std::string s = "[";
  for (size_t i = 0; i < perm.size(); ++i) s += (i ? "," : "") + std::string(signs[i] < 0 ? "-" : "+") + "x" + std::to_string(perm[i]);
  return s + "]";
}

int perm_parity(const std::vector<int>& p) {
  int inv = 0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j) inv += p[i] > p[j];
  return inv % 2 ? -1 : 1;
}

}  // namespace

std::vector<Symmetry> hyperoctahedral_group(int dim) {
  std::vector<Symmetry> out;
  std::vector<int> perm(dim);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (int mask = 0; mask < (1 << dim); ++mask) {
      Symmetry s;
      s.perm = perm;
      s.signs.resize(dim);
      for (int i = 0; i < dim; ++i) s.signs[i] = (mask >> i) & 1 ? -1 : 1;
      s.id = signed_perm_id(s.perm, s.signs);
      out.push_back(s);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<Symmetry> octahedral_rotations() {
  std::vector<Symmetry> out;
  for (auto& s : hyperoctahedral_group(3)) {
    int det = perm_parity(s.perm) * s.signs[0] * s.signs[1] * s.signs[2];
    if (det == 1) out.push_back(s);
  }
  return out;
}

std::vector<Symmetry> circle_rotations(long n) {
  std::vector<Symmetry> out;
  for (long k = 0; k < n; ++k) {
    Symmetry s;
    s.kind = SymmetryKind::CircleRotation;
    Q t(k, n);
    s.k = t.get_num().get_si();
    s.n = t.get_den().get_si();
    s.id = k == 0 ? "e" : "rot" + std::to_string(k) + "/" + std::to_string(n);
    out.push_back(s);
  }
  return out;
}

Region act(const Symmetry& s, const Region& r) {
  if (auto* c = std::get_if<ApexDoubleCone>(&r.shape))
    return make_double_cone(s.apply(c->p_minus).coords, s.apply(c->p_plus).coords);
  if (auto* b = std::get_if<SliceBall>(&r.shape))
    return make_slice_ball(s.apply(b->center).coords, b->radius, b->slice_time);
  if (auto* d = std::get_if<DirectionCap>(&r.shape)) {
    if (d->center.chart.dim == 1) return make_circle_cap(s.apply(d->center).coords[0], d->half_width);
    return make_sphere_cap(s.apply(d->center).coords, d->cos_radius);
  }
  Region out;
  auto img = std::get<PluginShape>(r.shape)->act(s);
  out.id = img->model_name() + "(" + img->key() + ")";
  out.shape = img;
  return out;
}

// ---- sampling ---------------------------------------------------------------

namespace {

std::vector<Symmetry> group_by_name(const std::string& name, const Chart& ch, long circle_n) {
  if (name == "identity") {
    if (ch.kind == ChartKind::Sphere && ch.dim == 1) return circle_rotations(1);
    int d = ch.kind == ChartKind::Minkowski ? ch.dim - 1 : (ch.kind == ChartKind::Sphere ? 3 : ch.dim);
    return {Symmetry::identity(d)};
  }
  if (name == "hyperoctahedral" || name == "dihedral") {
    int d = ch.kind == ChartKind::Minkowski ? ch.dim - 1 : ch.dim;
    if (name == "dihedral" && d != 2) throw Error(ErrorKind::ConfigInvalid, "dihedral group needs a 2D slice");
    return hyperoctahedral_group(d);
  }
  if (name == "octahedral") {
    if (!(ch.kind == ChartKind::Sphere && ch.dim == 2)) throw Error(ErrorKind::ConfigInvalid, "octahedral group needs the sphere chart");
    return octahedral_rotations();
  }
  if (name == "rotations") {
    if (!(ch.kind == ChartKind::Sphere && ch.dim == 1)) throw Error(ErrorKind::ConfigInvalid, "rotations group needs the circle chart");
    return circle_rotations(circle_n);
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown symmetry group '" + name + "'");
}

std::vector<Q> q_list(const json& j, const char* field) {
  std::vector<Q> out;
  if (!j.contains(field)) return out;
  for (const auto& v : j.at(field)) out.push_back(v.is_string() ? parse_q(v.get<std::string>()) : Q(v.get<long>()));
  return out;
}

void grid_points(int dim, long lo, long hi, std::vector<std::vector<Q>>& out) {
  if (hi < lo) return;
  std::vector<long> cur(dim, lo);
  while (true) {
    std::vector<Q> p;
    for (long v : cur) p.emplace_back(v);
    out.push_back(p);
    int i = dim - 1;
    while (i >= 0 && cur[i] == hi) cur[i--] = lo;
    if (i < 0) break;
    ++cur[i];
  }
}

// Centres of the k-dimensional cells of the unit cubic grid on [lo, hi]^dim:
// exactly k coordinates are half-integers.
void cell_centers(int dim, long lo, long hi, int k, std::vector<std::vector<Q>>& out) {
  std::vector<std::vector<Q>> pts;
  grid_points(dim, 2 * lo, 2 * hi, pts);
  for (auto& p : pts) {
    int halves = 0;
    for (auto& c : p) {
      if (c.get_num() % 2 != 0) ++halves;
      c /= 2;
      c.canonicalize();
    }
    if (halves == k) out.push_back(p);
  }
}

// One layer per scale. Without "layers" every radius shares the same centres.
json normalized_layers(const json& params, const std::string& model) {
  if (params.contains("layers")) return params.at("layers");
  json layers = json::array();
  if (model == "DirectionCap") {
    for (const auto& r : params.at("radii_pi")) {
      json l = {{"radius_pi", r}};
      for (const char* f : {"n", "offset", "orbits"})
        if (params.contains(f)) l[f] = params[f];
      layers.push_back(l);
    }
  } else {
    const char* field = model == "SliceBall" ? "radii" : "half_heights";
    for (const auto& r : params.at(field)) layers.push_back({{"radius", r}, {"cells", 0}});
  }
  return layers;
}

Q q_of(const json& v) { return v.is_string() ? parse_q(v.get<std::string>()) : Q(v.get<long>()); }

}  // namespace

RegionFamily sample_family(const json& params) {
  RegionFamily fam;
  fam.metadata = params;
  std::string model = params.at("model").get<std::string>();
  std::string group_name = params.value("group", "identity");
  if (model != "SliceBall" && model != "ApexDoubleCone" && model != "DirectionCap")
    throw Error(ErrorKind::ConfigInvalid, "unknown region model '" + model + "'");
  std::vector<Region> regions;
  std::vector<int> level;
  json layers = normalized_layers(params, model);
  if (!layers.is_array() || layers.empty()) throw Error(ErrorKind::EmptyFamily, "no radius given");

  auto add = [&](Region r, int lv) {
    regions.push_back(std::move(r));
    level.push_back(lv);
  };

  if (model == "SliceBall" || model == "ApexDoubleCone") {
    int dim = params.at("dim").get<int>();
    auto box = params.at("box").get<std::vector<long>>();
    if (box.size() != 2) throw Error(ErrorKind::ConfigInvalid, "box must be [lo, hi]");
    Q t = params.contains("slice_time") ? parse_q(params["slice_time"].get<std::string>()) : Q(0);
    fam.chart = model == "SliceBall" ? Chart{ChartKind::Slice, dim} : Chart{ChartKind::Minkowski, dim + 1};
    for (size_t li = 0; li < layers.size(); ++li) {
      Q r = q_of(layers[li].at("radius"));
      std::vector<std::vector<Q>> centers;
      cell_centers(dim, box[0], box[1], layers[li].value("cells", 0), centers);
      for (const auto& c : centers) {
        if (model == "SliceBall") {
          if (r < 0) throw Error(ErrorKind::EmptyFamily, "negative radius");
          add(make_slice_ball(c, r, t), static_cast<int>(li));
        } else {
          if (!(r > 0)) throw Error(ErrorKind::EmptyFamily, "cone half heights must be positive");
          std::vector<Q> lo{t - r}, hi{t + r};
          lo.insert(lo.end(), c.begin(), c.end());
          hi.insert(hi.end(), c.begin(), c.end());
          add(make_double_cone(lo, hi), static_cast<int>(li));
        }
      }
    }
    fam.group = group_by_name(group_name, fam.chart, 1);
  } else if (model == "DirectionCap") {
    std::string chart = params.at("chart").get<std::string>();
    if (chart == "circle") {
      fam.chart = {ChartKind::Sphere, 1};
      long group_n = 0;
      for (size_t li = 0; li < layers.size(); ++li) {
        const auto& l = layers[li];
        long n = l.at("n").get<long>();
        if (n <= 0) throw Error(ErrorKind::EmptyFamily, "n must be positive");
        group_n = group_n ? std::gcd(group_n, n) : n;
        Q offset = l.contains("offset") ? q_of(l["offset"]) : Q(0);
        Q hw = q_of(l.at("radius_pi")) / 2;
        for (long k = 0; k < n; ++k) add(make_circle_cap(Q(k, n) + offset, hw), static_cast<int>(li));
      }
      fam.group = group_by_name(group_name, fam.chart, params.value("n", group_n));
    } else if (chart == "sphere") {
      fam.chart = {ChartKind::Sphere, 2};
      auto rot = octahedral_rotations();
      for (size_t li = 0; li < layers.size(); ++li) {
        const auto& l = layers[li];
        std::vector<std::vector<Q>> centers;
        std::set<std::string> seen;
        for (const auto& orbit : l.at("orbits")) {
          std::vector<Q> gen;
          for (const auto& v : orbit) gen.push_back(q_of(v));
          for (const auto& g : rot) {
            auto p = g.apply(Point{gen, fam.chart}).coords;
            if (seen.insert(coords_key(p)).second) centers.push_back(p);
          }
        }
        std::sort(centers.begin(), centers.end());
        // the radius is either a tabulated fraction of pi or given by an
        // exact rational cosine
        Surd c = l.contains("cos") ? Surd::rational(q_of(l["cos"])) : cos_pi_fraction(q_of(l.at("radius_pi")));
        for (const auto& ctr : centers) add(make_sphere_cap(ctr, c), static_cast<int>(li));
      }
      fam.group = group_by_name(group_name, fam.chart, 1);
    } else {
      throw Error(ErrorKind::ConfigInvalid, "unknown cap chart '" + chart + "'");
    }
  } else {
    throw Error(ErrorKind::ConfigInvalid, "unknown region model '" + model + "'");
  }

  if (regions.empty()) throw Error(ErrorKind::EmptyFamily, "parameters admit no region");
  fam.regions = std::move(regions);
  fam.level = std::move(level);
  fam.collar.assign(fam.regions.size(), 0);
  if (params.contains("collar") && model != "DirectionCap") {
    Q w = q_of(params["collar"]);
    auto box = params.at("box").get<std::vector<long>>();
    Q lo = Q(box[0]) + w, hi = Q(box[1]) - w;
    for (size_t i = 0; i < fam.regions.size(); ++i) {
      std::vector<Q> c;
      Q r;
      if (auto* b = std::get_if<SliceBall>(&fam.regions[i].shape)) {
        c = b->center.coords;
        r = b->radius;
      } else {
        const auto& d = std::get<ApexDoubleCone>(fam.regions[i].shape);
        c.assign(d.p_minus.coords.begin() + 1, d.p_minus.coords.end());
        r = (d.p_plus.coords[0] - d.p_minus.coords[0]) / 2;
      }
      for (const auto& x : c)
        if (x - r < lo || x + r > hi) fam.collar[i] = 1;
    }
  }
  fam.num_levels = static_cast<int>(layers.size());

  std::map<std::string, size_t> index;
  for (size_t i = 0; i < fam.regions.size(); ++i) index[fam.regions[i].key()] = i;
  for (const auto& g : fam.group)
    for (const auto& r : fam.regions)
      if (!index.count(act(g, r).key()))
        throw Error(ErrorKind::NotClosed, "symmetry " + g.id + " maps " + r.id + " outside the sample");

  bool disjoint_pair = false;
  for (size_t i = 0; i < fam.regions.size() && !disjoint_pair; ++i)
    for (size_t j = i + 1; j < fam.regions.size() && !disjoint_pair; ++j)
      disjoint_pair = causally_disjoint(fam.regions[i], fam.regions[j]);
  if (!disjoint_pair) throw Error(ErrorKind::DisjointnessUnavailable, "no two regions of the sample are causally disjoint");
  return fam;
}

// ---- serialization ----------------------------------------------------------

namespace {

json q_array(const std::vector<Q>& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(format_q(q));
  return a;
}

std::vector<Q> q_vec(const json& a, size_t from, size_t count) {
  std::vector<Q> out;
  for (size_t i = from; i < from + count; ++i) out.push_back(parse_q(a.at(i).get<std::string>()));
  return out;
}

}  // namespace

json family_to_json(const RegionFamily& f) {
  json regions = json::array();
  for (size_t i = 0; i < f.regions.size(); ++i) {
    const auto& r = f.regions[i];
    json params;
    if (auto* c = std::get_if<ApexDoubleCone>(&r.shape)) {
      params = q_array(c->p_minus.coords);
      for (const auto& q : c->p_plus.coords) params.push_back(format_q(q));
    } else if (auto* b = std::get_if<SliceBall>(&r.shape)) {
      params = q_array(b->center.coords);
      params.push_back(format_q(b->radius));
      params.push_back(format_q(b->slice_time));
    } else if (auto* d = std::get_if<DirectionCap>(&r.shape)) {
      params = q_array(d->center.coords);
      if (d->center.chart.dim == 1) {
        params.push_back(format_q(d->half_width));
      } else {
        params.push_back(format_q(d->cos_radius.c));
        params.push_back(format_q(d->cos_radius.r));
      }
    } else {
      params = std::get<PluginShape>(r.shape)->params();
    }
    json entry = {{"id", r.id}, {"model", r.model_name()}, {"params", params}};
    if (!f.level.empty()) entry["level"] = f.level[i];
    if (!f.collar.empty() && f.collar[i]) entry["collar"] = true;
    regions.push_back(entry);
  }
  json syms = json::array();
  for (const auto& s : f.group) syms.push_back(s.to_json());
  return {{"chart", f.chart.name()}, {"regions", regions}, {"symmetries", syms}, {"num_levels", f.num_levels}};
}

RegionFamily family_from_json(const json& j) {
  RegionFamily f;
  f.chart = Chart::parse(j.at("chart").get<std::string>());
  for (const auto& e : j.at("regions")) {
    std::string model = e.at("model").get<std::string>();
    const json& p = e.at("params");
    Region r;
    if (model == "ApexDoubleCone") {
      size_t d = p.size() / 2;
      r = make_double_cone(q_vec(p, 0, d), q_vec(p, d, d));
    } else if (model == "SliceBall") {
      size_t d = p.size() - 2;
      r = make_slice_ball(q_vec(p, 0, d), parse_q(p.at(d).get<std::string>()), parse_q(p.at(d + 1).get<std::string>()));
    } else if (model == "DirectionCap") {
      if (f.chart.dim == 1) {
        r = make_circle_cap(parse_q(p.at(0).get<std::string>()), parse_q(p.at(1).get<std::string>()));
      } else {
        r = make_sphere_cap(q_vec(p, 0, 3), Surd{parse_q(p.at(3).get<std::string>()), parse_q(p.at(4).get<std::string>())});
      }
    } else {
      throw Error(ErrorKind::ParseError, "region model '" + model + "' has no JSON reader (plugin)");
    }
    r.id = e.at("id").get<std::string>();
    f.regions.push_back(r);
    if (e.contains("level")) f.level.push_back(e["level"].get<int>());
    f.collar.push_back(e.value("collar", false) ? 1 : 0);
  }
  for (const auto& s : j.at("symmetries")) f.group.push_back(Symmetry::from_json(s));
  f.num_levels = j.value("num_levels", 0);
  return f;
}

}  // namespace sectorkit
