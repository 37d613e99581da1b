#include "sectorkit/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>

#include "sectorkit/error.hpp"

namespace sectorkit {

GaussQ GaussQ::operator/(const GaussQ& o) const {
  Q n = o.norm2();
  if (n == 0) throw Error(ErrorKind::InvariantViolation, "division by zero");
  GaussQ t = *this * o.conj();
  return {t.re / n, t.im / n};
}

GaussQ GaussQ::i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

std::string GaussQ::str() const { return "( " + format_q(re) + " + " + format_q(im) + " i )"; }

// ---- strings ----------------------------------------------------------------

namespace {

void check_site(int k) {
  if (k < 0 || k >= kMaxSites) throw Error(ErrorKind::IndexOutOfRange, "site " + std::to_string(k + 1));
}

int dot(const std::array<uint64_t, 2>& a, const std::array<uint64_t, 2>& b) {
  return std::popcount(a[0] & b[0]) + std::popcount(a[1] & b[1]);
}

}  // namespace

void PauliString::set_x(int k, bool v) {
  check_site(k);
  uint64_t m = uint64_t(1) << (k & 63);
  x[k >> 6] = v ? (x[k >> 6] | m) : (x[k >> 6] & ~m);
}

void PauliString::set_z(int k, bool v) {
  check_site(k);
  uint64_t m = uint64_t(1) << (k & 63);
  z[k >> 6] = v ? (z[k >> 6] | m) : (z[k >> 6] & ~m);
}

PauliString PauliString::X(int s) { PauliString p; p.set_x(s, true); return p; }
PauliString PauliString::Z(int s) { PauliString p; p.set_z(s, true); return p; }
PauliString PauliString::Y(int s) { PauliString p; p.set_x(s, true); p.set_z(s, true); return p; }

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int w = 0; w < 2; ++w) {
    uint64_t m = x[w] | z[w];
    while (m) {
      out.push_back(w * 64 + std::countr_zero(m));
      m &= m - 1;
    }
  }
  return out;
}

bool PauliString::commutes(const PauliString& o) const { return ((dot(x, o.z) + dot(z, o.x)) & 1) == 0; }

int PauliString::product_phase(const PauliString& o) const {
  PauliString r = *this ^ o;
  int e = dot(x, z) + dot(o.x, o.z) + 2 * dot(z, o.x) - dot(r.x, r.z);
  return ((e % 4) + 4) % 4;
}

PauliString PauliString::operator^(const PauliString& o) const {
  PauliString r;
  for (int w = 0; w < 2; ++w) {
    r.x[w] = x[w] ^ o.x[w];
    r.z[w] = z[w] ^ o.z[w];
  }
  return r;
}

PauliString PauliString::permuted(const std::vector<int>& perm) const {
  PauliString r;
  for (int k : support()) {
    if (k >= static_cast<int>(perm.size()))
      throw Error(ErrorKind::IndexOutOfRange, "site " + std::to_string(k + 1) + " outside permutation");
    r.set_x(perm[k], get_x(k));
    r.set_z(perm[k], get_z(k));
  }
  return r;
}

std::string PauliString::str() const {
  if (is_identity()) return "I";
  std::string out;
  for (int k : support()) {
    if (!out.empty()) out += ' ';
    out += get_x(k) ? (get_z(k) ? 'Y' : 'X') : 'Z';
    out += std::to_string(k + 1);
  }
  return out;
}

// ---- elements ---------------------------------------------------------------

PauliElement::PauliElement(const GaussQ& c) {
  if (!c.is_zero()) terms_.emplace_back(PauliString{}, c);
}

PauliElement::PauliElement(const PauliString& s, const GaussQ& c) {
  if (!c.is_zero()) terms_.emplace_back(s, c);
}

PauliElement PauliElement::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  PauliElement e;
  for (auto& t : terms) {
    if (!e.terms_.empty() && e.terms_.back().first == t.first) {
      e.terms_.back().second = e.terms_.back().second + t.second;
      if (e.terms_.back().second.is_zero()) e.terms_.pop_back();
    } else if (!t.second.is_zero()) {
      e.terms_.push_back(std::move(t));
    }
  }
  return e;
}

bool PauliElement::is_scalar() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_identity());
}

GaussQ PauliElement::scalar_part() const {
  if (!terms_.empty() && terms_[0].first.is_identity()) return terms_[0].second;
  return GaussQ(0);
}

PauliElement PauliElement::operator+(const PauliElement& o) const {
  std::vector<Term> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return from_terms(std::move(t));
}

PauliElement PauliElement::operator-(const PauliElement& o) const { return *this + o * GaussQ(-1); }

PauliElement PauliElement::operator*(const PauliElement& o) const {
  if (terms_.size() == 1 && o.terms_.size() == 1) {
    const auto& [a, ca] = terms_[0];
    const auto& [b, cb] = o.terms_[0];
    return PauliElement(a ^ b, ca * cb * GaussQ::i_pow(a.product_phase(b)));
  }
  std::vector<Term> t;
  t.reserve(terms_.size() * o.terms_.size());
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) t.emplace_back(a ^ b, ca * cb * GaussQ::i_pow(a.product_phase(b)));
  return from_terms(std::move(t));
}

PauliElement PauliElement::operator*(const GaussQ& c) const {
  if (c.is_zero()) return {};
  PauliElement e = *this;
  for (auto& t : e.terms_) t.second = t.second * c;
  return e;
}

PauliElement operator*(const GaussQ& c, const PauliElement& e) { return e * c; }

PauliElement PauliElement::adjoint() const {
  PauliElement e = *this;
  for (auto& t : e.terms_) t.second = t.second.conj();
  return e;
}

PauliElement PauliElement::permuted(const std::vector<int>& perm) const {
  std::vector<Term> t;
  t.reserve(terms_.size());
  for (const auto& [s, c] : terms_) t.emplace_back(s.permuted(perm), c);
  return from_terms(std::move(t));
}

bool PauliElement::is_unitary() const {
  PauliElement one(GaussQ(1));
  PauliElement a = adjoint();
  return *this * a == one && a * *this == one;
}

bool PauliElement::is_projection() const { return adjoint() == *this && *this * *this == *this; }

std::string PauliElement::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [s, c] : terms_) {
    if (!out.empty()) out += " ; ";
    out += c.str() + " " + s.str();
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\n\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\n\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& what, const std::string& s) {
  throw Error(ErrorKind::ParseError, what + " in '" + s + "'");
}

PauliElement::Term parse_term(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty() || s[0] != '(') bad("expected '('", raw);
  size_t close = s.find(')');
  if (close == std::string::npos) bad("missing ')'", raw);
  std::istringstream coeff(s.substr(1, close - 1));
  std::string re, plus, im, unit, extra;
  coeff >> re >> plus >> im >> unit;
  if (plus != "+" || unit != "i" || (coeff >> extra)) bad("bad coefficient", raw);
  GaussQ c(parse_q(re), parse_q(im));

  PauliString p;
  std::istringstream ops(s.substr(close + 1));
  std::string tok;
  bool any = false, saw_identity = false;
  while (ops >> tok) {
    if (tok == "I") {
      saw_identity = true;
      continue;
    }
    char op = tok[0];
    if ((op != 'X' && op != 'Y' && op != 'Z') || tok.size() < 2) bad("bad operator '" + tok + "'", raw);
    for (size_t i = 1; i < tok.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(tok[i]))) bad("bad site in '" + tok + "'", raw);
    int site = std::stoi(tok.substr(1)) - 1;
    check_site(site);
    if (p.get_x(site) || p.get_z(site)) bad("repeated site in '" + tok + "'", raw);
    p.set_x(site, op != 'Z');
    p.set_z(site, op != 'X');
    any = true;
  }
  if (saw_identity && any) bad("identity mixed with operators", raw);
  if (!saw_identity && !any) bad("missing operators", raw);
  return {p, c};
}

}  // namespace

PauliElement PauliElement::parse(const std::string& text) {
  std::string s = trim(text);
  if (s == "0") return {};
  if (s.empty()) bad("empty element", text);
  std::vector<Term> terms;
  size_t pos = 0;
  while (true) {
    size_t next = s.find(';', pos);
    terms.push_back(parse_term(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return from_terms(std::move(terms));
}

}  // namespace sectorkit
