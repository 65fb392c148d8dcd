#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace otdual {

/// Exact arbitrary-precision rational. All combinatorial decisions
/// (support membership, tightness, interval endpoints) are made in this type.
using Rational = mpq_class;

/// Parses "3", "-0.25", "1.5e-3", "7/20" into an exact rational.
/// Throws Error(kSchema) on malformed input.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("p" when the denominator is 1).
std::string to_string(const Rational& value);

/// Exact value of a finite double (every finite double is a dyadic rational).
Rational from_double(double value);

double to_double(const Rational& value);

/// Rational approximation with denominator `denominator`, rounded to nearest.
Rational round_to_denominator(double value, unsigned long denominator);

/// Dense row-major table used for cost matrices, couplings and floating plans.
template <typename T>
class Table {
 public:
  Table() = default;
  Table(std::size_t rows, std::size_t cols, const T& fill = T())
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<T>& data() const noexcept { return data_; }

  std::vector<T> row_sums() const {
    std::vector<T> sums(rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) sums[i] += (*this)(i, j);
    return sums;
  }

  std::vector<T> col_sums() const {
    std::vector<T> sums(cols_, T(0));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) sums[j] += (*this)(i, j);
    return sums;
  }

  friend bool operator==(const Table& a, const Table& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

Table<double> to_double(const Table<Rational>& table);
std::vector<double> to_double(const std::vector<Rational>& values);
Table<Rational> from_double(const Table<double>& table);
std::vector<Rational> from_double(const std::vector<double>& values);

}  // namespace otdual
