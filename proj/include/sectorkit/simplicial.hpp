#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sectorkit/poset.hpp"

namespace sectorkit {

// An n-simplex over a poset: a support element and n+1 faces of dimension
// n-1. A 0-simplex is a poset element and its own support.
struct Simplex {
  int dim = 0;
  int support = -1;
  std::vector<Simplex> faces;

  bool operator==(const Simplex& o) const = default;
  bool operator<(const Simplex& o) const;

  // 1-simplex helpers: b runs from d1() to d0()
  int d0() const { return faces.at(0).support; }
  int d1() const { return faces.at(1).support; }
  bool degenerate_edge() const { return dim == 1 && d0() == d1() && support == d0(); }
};

constexpr int kMaxSimplexDim = 3;

Simplex vertex(const IndexPoset& P, int o);
// Checks |∂i x| ⊆ |x| and the simplicial identities on the faces given;
// throws SupportViolation.
Simplex make_simplex(const IndexPoset& P, int support, std::vector<Simplex> faces);
Simplex make_edge(const IndexPoset& P, int from, int to, int support);

// Canonical simplex on vertices v0..vn (n <= 3): faces are canonical simplices
// on the vertex lists with one entry removed, support the canonical support
// of the face supports.
std::optional<Simplex> canonical_simplex(const IndexPoset& P, const std::vector<int>& vertices);

Simplex face(const Simplex& x, int i);        // IndexOutOfRange
Simplex degeneracy(const Simplex& x, int i);  // IndexOutOfRange
std::vector<int> vertices(const Simplex& x);  // v0..vn

// Re-checks |∂i x| ⊆ |x| and ∂i∂j = ∂j∂(i+1) for i >= j, recursively.
bool simplicial_identities_hold(const IndexPoset& P, const Simplex& x);

// ---- paths ------------------------------------------------------------------

struct Path {
  int start = -1, end = -1;  // a = ∂1 b_1, o = ∂0 b_n
  std::vector<Simplex> edges;
  bool operator==(const Path& o) const = default;
  bool operator<(const Path& o) const;
  size_t length() const { return edges.size(); }
};

Path trivial_path(int a);
// Throws InvalidPath on a broken chain or a 1-simplex violating its support.
Path make_path(const IndexPoset& P, std::vector<Simplex> edges);
// Canonical path through a vertex sequence; InvalidPath if a step has no
// canonical 1-simplex.
Path path_through(const IndexPoset& P, const std::vector<int>& verts);
void validate_path(const IndexPoset& P, const Path& p);

Simplex reverse(const Simplex& b);  // 1-simplex with faces swapped
Path reverse(const Path& p);
// q * p: first p, then q. EndpointMismatch unless p.end == q.start.
Path compose(const Path& q, const Path& p);

// ---- 1-skeleton -------------------------------------------------------------

// Vertices joined to u by a canonical 1-simplex (u excluded), ascending.
std::vector<int> neighbors(const IndexPoset& P, int u);
// Shortest canonical path from -> to, ties broken towards smaller indices.
// Disconnected if there is none.
Path canonical_path(const IndexPoset& P, int from, int to);
int skeleton_distance(const IndexPoset& P, int from, int to);  // -1 if unreachable
// Every canonical 2-simplex (vertex triples may repeat), in vertex order.
std::vector<Simplex> canonical_triangles(const IndexPoset& P);
// Canonical 1-simplices, degenerate ones included, in (from, to) order.
std::vector<Simplex> canonical_edges(const IndexPoset& P);

// ---- elementary deformations -------------------------------------------------

// Every move goes through an explicit 2-simplex c:
//   Expand   replaces edge `at` (= ∂1c) by ∂2c then ∂0c;
//   Contract replaces edges at, at+1 (= ∂2c, ∂0c) by ∂1c;
//   Drop     removes the degenerate 1-simplex at `at` (c = σ0 of it);
//   Insert   is the inverse of Drop. It is never generated, only produced
//            when a witness found from the far end is turned around.
// Generated moves use canonical simplices; replay accepts any valid c, which
// keeps witnesses meaningful after a symmetry is applied.
struct Move {
  enum Kind { Expand, Contract, Drop, Insert } kind = Expand;
  size_t at = 0;
  Simplex cell;
  bool operator==(const Move& o) const = default;
};

std::vector<Move> deformation_moves(const IndexPoset& P, const Path& p);
// InvalidPath if the move does not apply.
Path apply_move(const IndexPoset& P, const Path& p, const Move& m);
std::vector<Path> elementary_deformations(const Path& p, const IndexPoset& P);

struct HomotopyResult {
  bool found = false;
  std::vector<Move> moves;  // replayable from p to q
  long explored = 0;
};

// Bidirectional best-first search (shorter paths first). `cap` bounds the
// number of expanded search states; no result means no-within-cap.
HomotopyResult homotopic(const Path& p, const Path& q, const IndexPoset& P, long cap = 2000);
Path replay(const IndexPoset& P, const Path& p, const std::vector<Move>& moves);

// ---- symmetry ---------------------------------------------------------------

Simplex act(const IndexPoset& P, int g, const Simplex& x);
Path act(const IndexPoset& P, int g, const Path& p);
Simplex act(const IndexPoset& P, const std::string& g, const Simplex& x);  // UnknownSymmetry
Path act(const IndexPoset& P, const std::string& g, const Path& p);
// Image of a witness; replays on the image path.
std::vector<Move> act(const IndexPoset& P, int g, const std::vector<Move>& moves);

// ---- serialization ----------------------------------------------------------

json path_to_json(const IndexPoset& P, const Path& p);  // [[face1, face0, support], ...]
Path path_from_json(const IndexPoset& P, const json& j, std::optional<int> start = std::nullopt);
json simplex_to_json(const IndexPoset& P, const Simplex& x);
json moves_to_json(const IndexPoset& P, const std::vector<Move>& m);

}  // namespace sectorkit
