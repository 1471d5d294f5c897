#include "latgeo/rational.hpp"

#include <cctype>

namespace latgeo {

Rat parse_rat(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail(ErrorCode::ParseError, "empty rational literal");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (num.empty() || den.empty())
      fail(ErrorCode::ParseError, "malformed rational '" + text + "'");
    try {
      Rat r(num + "/" + den);
      if (r.get_den() == 0) fail(ErrorCode::DivisionByZero, "zero denominator");
      r.canonicalize();
      return r;
    } catch (const std::invalid_argument&) {
      fail(ErrorCode::ParseError, "malformed rational '" + text + "'");
    }
  }

  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    if (tail.find_first_not_of("0123456789") != std::string::npos)
      fail(ErrorCode::ParseError, "malformed decimal '" + text + "'");
    bool neg = !head.empty() && head[0] == '-';
    if (neg || (!head.empty() && head[0] == '+')) head = head.substr(1);
    if (head.empty()) head = "0";
    try {
      Int ip(head), frac(tail.empty() ? "0" : tail);
      Int scale = 1;
      for (size_t i = 0; i < tail.size(); i++) scale *= 10;
      Rat r(ip * scale + frac, scale);
      r.canonicalize();
      return neg ? Rat(-r) : r;
    } catch (const std::invalid_argument&) {
      fail(ErrorCode::ParseError, "malformed decimal '" + text + "'");
    }
  }

  try {
    Rat r(s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    fail(ErrorCode::ParseError, "malformed rational '" + text + "'");
  }
}

std::string rat_str(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Int floor_rat(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

Int ceil_rat(const Rat& x) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

Int round_nearest(const Rat& x) {
  // half-away-from-zero: floor(x + 1/2) for x >= 0, ceil(x - 1/2) otherwise
  if (x >= 0) return floor_rat(x + Rat(1, 2));
  return ceil_rat(x - Rat(1, 2));
}

Rat pow_rat(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  if (base == 0 && e < 0) fail(ErrorCode::DivisionByZero, "0^negative");
  Rat b = e < 0 ? Rat(1 / base) : base;
  unsigned long n = e < 0 ? static_cast<unsigned long>(-e)
                          : static_cast<unsigned long>(e);
  Rat out;
  mpz_pow_ui(out.get_num().get_mpz_t(), b.get_num().get_mpz_t(), n);
  mpz_pow_ui(out.get_den().get_mpz_t(), b.get_den().get_mpz_t(), n);
  out.canonicalize();
  return out;
}

}  // namespace latgeo
