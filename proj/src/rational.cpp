#include "framecheck/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace framecheck {

namespace {

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den))
      throw std::invalid_argument("bad rational literal: " + text);
    BigInt d(den);
    if (d == 0) throw std::invalid_argument("zero denominator: " + text);
    return Rational(BigInt(num), d);
  }
  const auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string head = text.substr(0, dot);
    const std::string tail = text.substr(dot + 1);
    bool neg = false;
    if (!head.empty() && (head[0] == '-' || head[0] == '+')) {
      neg = head[0] == '-';
      head = head.substr(1);
    }
    const auto all_digits = [](const std::string& s) {
      for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
      return true;
    };
    if ((head.empty() && tail.empty()) || !all_digits(head) || !all_digits(tail))
      throw std::invalid_argument("bad rational literal: " + text);
    BigInt scale = 1;
    for (std::size_t i = 0; i < tail.size(); ++i) scale *= 10;
    BigInt whole(head.empty() ? std::string("0") : head);
    BigInt frac(tail.empty() ? std::string("0") : tail);
    BigInt num = whole * scale + frac;
    if (neg) num = -num;
    return Rational(num, scale);
  }
  if (!is_integer_literal(text)) throw std::invalid_argument("bad rational literal: " + text);
  return Rational(BigInt(text));
}

std::string rational_to_string(const Rational& r) {
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  if (r == 0) return Rational(0);
  const BigInt num = numerator(r);
  const BigInt den = denominator(r);
  const BigInt sn = boost::multiprecision::sqrt(num);
  const BigInt sd = boost::multiprecision::sqrt(den);
  if (sn * sn != num || sd * sd != den) return std::nullopt;
  return Rational(sn, sd);
}

}  // namespace framecheck
