#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "sectorkit/rational.hpp"

namespace sectorkit {

using json = nlohmann::json;

enum class ChartKind { Minkowski, Slice, Sphere };

// minkowski(d): d spacetime dimensions, coordinate 0 is time.
// slice(d): d spatial dimensions on one time slice.
// sphere(1) is the circle, parametrised by an angle in turns; sphere(2)
// uses unnormalised rational vectors in R^3.
struct Chart {
  ChartKind kind = ChartKind::Slice;
  int dim = 0;
  bool operator==(const Chart&) const = default;
  std::string name() const;
  static Chart parse(const std::string& s);
};

struct Point {
  std::vector<Q> coords;
  Chart chart;
  Q norm2() const;  // Euclidean; on minkowski charts the spatial part only
  bool operator==(const Point& o) const { return chart == o.chart && coords == o.coords; }
};

struct Symmetry;

struct ApexDoubleCone {
  Point p_minus, p_plus;
};

struct SliceBall {
  Point center;
  Q radius;
  Q slice_time;
};

struct DirectionCap {
  Point center;
  Q half_width;    // circle only: angular radius in turns, in (0, 1/2)
  Surd cos_radius; // sphere only: exact cosine of the angular radius
};

// Extension point for region models that are not built in (hypercones).
class RegionPlugin {
 public:
  virtual ~RegionPlugin() = default;
  virtual std::string model_name() const = 0;
  virtual Chart chart() const = 0;
  virtual bool includes(const RegionPlugin& outer) const = 0;
  virtual bool contained_in(const RegionPlugin& outer) const = 0;
  virtual bool causally_disjoint(const RegionPlugin& other) const = 0;
  virtual std::shared_ptr<const RegionPlugin> act(const Symmetry& s) const = 0;
  virtual std::string key() const = 0;
  virtual json params() const = 0;
};

using PluginShape = std::shared_ptr<const RegionPlugin>;

struct Region {
  std::string id;
  std::variant<ApexDoubleCone, SliceBall, DirectionCap, PluginShape> shape;

  Chart chart() const;
  std::string model_name() const;
  // canonical extensional key: equal keys <=> equal regions
  std::string key() const;
};

enum class SymmetryKind { SignedPermutation, CircleRotation };

// Signed permutations act on spatial coordinates: (s x)_i = sign_i * x_{perm_i}.
// Circle rotations shift the angle by k/n turns.
struct Symmetry {
  std::string id;
  SymmetryKind kind = SymmetryKind::SignedPermutation;
  std::vector<int> perm;
  std::vector<int> signs;
  long k = 0, n = 1;

  Point apply(const Point& p) const;
  Symmetry compose(const Symmetry& inner) const;  // this ∘ inner
  bool same_action(const Symmetry& o) const;
  json to_json() const;
  static Symmetry from_json(const json& j);
  static Symmetry identity(int dim);
};

struct RegionFamily {
  Chart chart;
  std::vector<Region> regions;
  std::vector<Symmetry> group;
  json metadata = json::object();
  // scale level of each region (index into the sorted radius set); used to
  // tell truncation effects from genuine axiom failures
  std::vector<int> level;
  int num_levels = 0;
  // regions within the boundary collar of the sample box; these only serve
  // as connectors when an axiom is checked relative to the sample
  std::vector<uint8_t> collar;
};

bool includes(const Region& inner, const Region& outer);           // proper ⊂
bool contained_in(const Region& inner, const Region& outer);       // ⊆ of closures
bool causally_disjoint(const Region& a, const Region& b);          // ⊥
Region act(const Symmetry& s, const Region& r);

Region make_slice_ball(std::vector<Q> center, Q radius, Q slice_time = 0);
Region make_double_cone(std::vector<Q> p_minus, std::vector<Q> p_plus);
Region make_circle_cap(Q center_turns, Q half_width_turns);
Region make_sphere_cap(std::vector<Q> center, Surd cos_radius);

// cos(pi * f) for f with denominator dividing 1, 2, 3, 4 or 6
Surd cos_pi_fraction(const Q& f);

std::vector<Symmetry> hyperoctahedral_group(int dim);
std::vector<Symmetry> octahedral_rotations();
std::vector<Symmetry> circle_rotations(long n);

RegionFamily sample_family(const json& params);

json family_to_json(const RegionFamily& f);
RegionFamily family_from_json(const json& j);

}  // namespace sectorkit
