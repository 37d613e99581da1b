#include "sectorkit/rational.hpp"

#include <map>

#include "sectorkit/error.hpp"

namespace sectorkit {

Q parse_q(const std::string& s) {
  if (s.empty()) throw Error(ErrorKind::ParseError, "empty rational");
  for (char ch : s) {
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '/' || ch == '+'))
      throw Error(ErrorKind::ParseError, "bad rational '" + s + "'");
  }
  Q q;
  if (q.set_str(s, 10) != 0) throw Error(ErrorKind::ParseError, "bad rational '" + s + "'");
  if (q.get_den() == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string format_q(const Q& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

int sgn(const Q& q) { return ::sgn(q); }

bool Surd::operator==(const Surd& o) const {
  return sign() == o.sign() && square() == o.square();
}

namespace {

bool perfect_square(const Q& r, Q& root) {
  if (r < 0) return false;
  mpz_class n = r.get_num(), d = r.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  mpz_class sn, sd;
  mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
  root = Q(sn, sd);
  root.canonicalize();
  return true;
}

// fold rational radicands into the rational part, merge equal radicands
std::vector<Surd> simplify(const std::vector<Surd>& in) {
  std::map<Q, Q> by_radicand;  // radicand -> coefficient
  for (const auto& t : in) {
    if (t.c == 0 || t.r == 0) continue;
    Q root;
    if (perfect_square(t.r, root))
      by_radicand[Q(1)] += t.c * root;
    else
      by_radicand[t.r] += t.c;
  }
  std::vector<Surd> out;
  for (auto& [r, c] : by_radicand)
    if (c != 0) out.push_back({c, r});
  return out;
}

std::vector<Surd> square_of(const std::vector<Surd>& a) {
  std::vector<Surd> out;
  for (size_t i = 0; i < a.size(); ++i) {
    out.push_back(a[i] * a[i]);
    for (size_t j = i + 1; j < a.size(); ++j) {
      Surd p = a[i] * a[j];
      p.c *= 2;
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

int sign_of_sum(std::vector<Surd> terms) {
  terms = simplify(terms);
  if (terms.empty()) return 0;
  if (terms.size() == 1) return terms[0].sign();
  size_t half = terms.size() / 2;
  std::vector<Surd> a(terms.begin(), terms.begin() + half), b(terms.begin() + half, terms.end());
  int sa = sign_of_sum(a), sb = sign_of_sum(b);
  if (sa == 0) return sb;
  if (sb == 0 || sa == sb) return sa;
  // opposite signs: the larger magnitude wins
  std::vector<Surd> diff = square_of(a);
  for (auto t : square_of(b)) diff.push_back(-t);
  return sa * sign_of_sum(diff);
}

Surd complement_sine(const Surd& cosv) { return {Q(1), Q(1) - cosv.square()}; }

}  // namespace sectorkit
