#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sectorkit/rational.hpp"

namespace sectorkit {

// Gaussian rational re + im i.
struct GaussQ {
  Q re, im;
  GaussQ() = default;
  GaussQ(const Q& r, const Q& i = 0) : re(r), im(i) {}
  GaussQ(long r) : re(r), im(0) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GaussQ conj() const { return {re, -im}; }
  Q norm2() const { return re * re + im * im; }
  GaussQ operator+(const GaussQ& o) const { return {re + o.re, im + o.im}; }
  GaussQ operator-(const GaussQ& o) const { return {re - o.re, im - o.im}; }
  GaussQ operator-() const { return {-re, -im}; }
  GaussQ operator*(const GaussQ& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  GaussQ operator/(const GaussQ& o) const;  // InvariantViolation on a zero divisor
  bool operator==(const GaussQ& o) const { return re == o.re && im == o.im; }
  bool operator!=(const GaussQ& o) const { return !(*this == o); }

  static GaussQ i_pow(int k);  // i^k
  std::string str() const;     // "( a/b + c/d i )"
};

constexpr int kMaxSites = 128;

// Hermitian Pauli string i^{x·z} X^x Z^z; bit k of x/z is site k (0-based).
struct PauliString {
  std::array<uint64_t, 2> x{}, z{};

  static PauliString identity() { return {}; }
  static PauliString X(int site);
  static PauliString Y(int site);
  static PauliString Z(int site);

  bool get_x(int k) const { return (x[k >> 6] >> (k & 63)) & 1; }
  bool get_z(int k) const { return (z[k >> 6] >> (k & 63)) & 1; }
  void set_x(int k, bool v);
  void set_z(int k, bool v);

  bool is_identity() const { return !(x[0] | x[1] | z[0] | z[1]); }
  std::vector<int> support() const;
  bool commutes(const PauliString& o) const;
  // this * o = i^phase * (this ⊕ o)
  int product_phase(const PauliString& o) const;
  PauliString operator^(const PauliString& o) const;
  // image under the site map k -> perm[k]
  PauliString permuted(const std::vector<int>& perm) const;

  bool operator==(const PauliString& o) const { return x == o.x && z == o.z; }
  bool operator!=(const PauliString& o) const { return !(*this == o); }
  bool operator<(const PauliString& o) const { return x != o.x ? x < o.x : z < o.z; }

  std::string str() const;  // "X1 Z3", "I" for the identity
};

// Finite linear combination of Pauli strings, kept sorted with no zero terms.
class PauliElement {
 public:
  using Term = std::pair<PauliString, GaussQ>;

  PauliElement() = default;
  PauliElement(const GaussQ& c);  // c * identity
  PauliElement(const PauliString& s, const GaussQ& c = GaussQ(1));
  static PauliElement from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_scalar() const;
  GaussQ scalar_part() const;  // coefficient of the identity
  // phased single string, if the element is one
  bool is_monomial() const { return terms_.size() == 1; }

  PauliElement operator+(const PauliElement& o) const;
  PauliElement operator-(const PauliElement& o) const;
  PauliElement operator*(const PauliElement& o) const;
  PauliElement operator*(const GaussQ& c) const;
  PauliElement adjoint() const;
  PauliElement permuted(const std::vector<int>& perm) const;
  bool operator==(const PauliElement& o) const { return terms_ == o.terms_; }
  bool operator!=(const PauliElement& o) const { return !(*this == o); }

  bool is_unitary() const;     // U U* = U* U = 1
  bool is_projection() const;  // E = E* = E E
  bool commutes(const PauliElement& o) const { return *this * o == o * *this; }

  // "( a/b + c/d i ) X1 Z3 ; ( ... ) Y2", "0" for zero; sites 1-indexed
  std::string str() const;
  static PauliElement parse(const std::string& s);

 private:
  std::vector<Term> terms_;
};

PauliElement operator*(const GaussQ& c, const PauliElement& e);

}  // namespace sectorkit
