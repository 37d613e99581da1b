#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace sectorkit {

using Q = mpq_class;

// "p/q" (or bare "p"); throws Error(ParseError) on anything else
Q parse_q(const std::string& s);
// always "p/q" with q >= 1, so the printed form is canonical
std::string format_q(const Q& q);

int sgn(const Q& q);

// c * sqrt(r), r >= 0. Enough to hold cosines like sqrt(3)/2 exactly.
struct Surd {
  Q c;
  Q r;

  static Surd rational(const Q& v) { return {v, Q(1)}; }
  int sign() const { return r == 0 ? 0 : sgn(c); }
  Surd operator*(const Surd& o) const { return {c * o.c, r * o.r}; }
  Surd operator-() const { return {-c, r}; }
  // v^2 as a rational
  Q square() const { return c * c * r; }
  bool operator==(const Surd& o) const;
};

// Exact sign of a short sum of surds. Repeated squaring; fine for the
// handful of terms the cap predicates need.
int sign_of_sum(std::vector<Surd> terms);

// sqrt(1 - v^2) for |v| <= 1
Surd complement_sine(const Surd& cosv);

}  // namespace sectorkit
