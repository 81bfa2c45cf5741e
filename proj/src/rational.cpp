#include "bq/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "bq/errors.hpp"

namespace bq {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw PreconditionError("rational denominator must be positive");
  if (num < 0) throw PreconditionError("rational must be nonnegative");
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational Rational::parse(std::string_view text) {
  auto to_int = [&](std::string_view part) {
    std::int64_t v = 0;
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, v);
    if (ec != std::errc() || ptr != end || part.empty()) {
      throw PreconditionError("malformed rational '" + std::string(text) + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(to_int(text));
  return Rational(to_int(text.substr(0, slash)), to_int(text.substr(slash + 1)));
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational operator*(Rational a, Rational b) {
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(Rational a, std::int64_t k) { return Rational(a.num_, a.den_ * k); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return a.num_ * b.den_ <=> b.num_ * a.den_;
}

std::vector<Rational> convergents(double value, std::int64_t max_den) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw PreconditionError("convergents need a finite nonnegative value");
  }
  std::vector<Rational> out;
  // h/k recurrences seeded with h_{-1}=1, h_{-2}=0, k_{-1}=0, k_{-2}=1.
  std::int64_t h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  double x = value;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(x);
    if (a_real > 1e15) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t h = a * h_prev + h_prev2;
    const std::int64_t k = a * k_prev + k_prev2;
    if (k > max_den) break;
    out.emplace_back(h, k);
    const double frac = x - a_real;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
  }
  return out;
}

}  // namespace bq
