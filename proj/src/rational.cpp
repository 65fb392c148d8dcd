#include "otdual/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "otdual/error.hpp"

namespace otdual {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kInconsistent: return "inconsistent";
    case ErrorCode::kNonConvergence: return "non_convergence";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNumericalRange: return "numerical_range";
    case ErrorCode::kInternal: return "internal";
  }
  return "internal";
}

namespace {

[[noreturn]] void bad_number(std::string_view text) {
  fail(ErrorCode::kSchema, "number", "not a rational number: '" + std::string(text) + "'");
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  return true;
}

mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

Rational parse_decimal(std::string_view text, std::string_view original) {
  bool negative = false;
  if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
    negative = text[0] == '-';
    text.remove_prefix(1);
  }
  long exponent = 0;
  auto epos = text.find_first_of("eE");
  if (epos != std::string_view::npos) {
    std::string_view exp_part = text.substr(epos + 1);
    bool exp_neg = false;
    if (!exp_part.empty() && (exp_part[0] == '+' || exp_part[0] == '-')) {
      exp_neg = exp_part[0] == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) bad_number(original);
    exponent = std::stol(std::string(exp_part));
    if (exp_neg) exponent = -exponent;
    text = text.substr(0, epos);
  }
  std::string_view int_part = text, frac_part;
  auto dot = text.find('.');
  if (dot != std::string_view::npos) {
    int_part = text.substr(0, dot);
    frac_part = text.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) bad_number(original);
  if (!int_part.empty() && !all_digits(int_part)) bad_number(original);
  if (!frac_part.empty() && !all_digits(frac_part)) bad_number(original);

  std::string digits = std::string(int_part) + std::string(frac_part);
  mpz_class numerator(digits.empty() ? std::string("0") : digits, 10);
  exponent -= static_cast<long>(frac_part.size());
  Rational value;
  if (exponent >= 0) {
    value = Rational(numerator * pow10(static_cast<unsigned long>(exponent)));
  } else {
    value = Rational(numerator, pow10(static_cast<unsigned long>(-exponent)));
  }
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view original = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) bad_number(original);

  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text, original);

  Rational num = parse_decimal(text.substr(0, slash), original);
  std::string_view den_text = text.substr(slash + 1);
  if (!den_text.empty() && (den_text[0] == '-' || den_text[0] == '+')) bad_number(original);
  Rational den = parse_decimal(den_text, original);
  if (den == 0) bad_number(original);
  Rational q = num / den;
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  return v.get_str();
}

Rational from_double(double value) {
  if (!std::isfinite(value))
    fail(ErrorCode::kNumericalRange, "finite", "cannot convert a non-finite value to a rational");
  Rational r(value);
  r.canonicalize();
  return r;
}

double to_double(const Rational& value) { return value.get_d(); }

Rational round_to_denominator(double value, unsigned long denominator) {
  if (!std::isfinite(value))
    fail(ErrorCode::kNumericalRange, "finite", "cannot round a non-finite value");
  double scaled = std::nearbyint(value * static_cast<double>(denominator));
  Rational r{mpz_class(scaled), mpz_class(denominator)};
  r.canonicalize();
  return r;
}

Table<double> to_double(const Table<Rational>& table) {
  Table<double> out(table.rows(), table.cols(), 0.0);
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (std::size_t j = 0; j < table.cols(); ++j) out(i, j) = table(i, j).get_d();
  return out;
}

std::vector<double> to_double(const std::vector<Rational>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.get_d());
  return out;
}

Table<Rational> from_double(const Table<double>& table) {
  Table<Rational> out(table.rows(), table.cols(), Rational(0));
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (std::size_t j = 0; j < table.cols(); ++j) out(i, j) = from_double(table(i, j));
  return out;
}

std::vector<Rational> from_double(const std::vector<double>& values) {
  std::vector<Rational> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(from_double(v));
  return out;
}

}  // namespace otdual
