#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bq {

/// Exact nonnegative rational num/den in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  /// Parses "m/n" or "m".
  static Rational parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }
  std::string str() const;

  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, std::int64_t k);
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Continued-fraction convergents of a nonnegative real, in order, stopping
/// at the last one whose denominator does not exceed max_den.
std::vector<Rational> convergents(double value, std::int64_t max_den);

}  // namespace bq
