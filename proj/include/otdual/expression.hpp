#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace otdual {

/// Arithmetic expression over nu1..nuN and k1..kN.
/// Supports + - * / ^, parentheses, numbers, and sqrt, exp, log, abs.
class Expression {
 public:
  Expression() = default;
  /// Throws Error(kSchema) on syntax errors or variables beyond `dimension`.
  static Expression parse(std::string_view text, std::size_t dimension);

  double evaluate(const std::vector<double>& nu, const std::vector<double>& k) const;
  bool depends_on_k() const noexcept { return uses_k_; }
  const std::string& text() const noexcept { return text_; }
  bool empty() const noexcept { return nodes_.empty(); }

 private:
  enum class Op { kConst, kNu, kK, kAdd, kSub, kMul, kDiv, kPow, kNeg, kSqrt, kExp, kLog, kAbs };
  struct Node {
    Op op;
    double value = 0;
    std::size_t index = 0;  // variable index, or left child
    std::size_t right = 0;
  };
  friend class ExpressionParser;

  double eval(std::size_t node, const std::vector<double>& nu, const std::vector<double>& k) const;

  std::string text_;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
  bool uses_k_ = false;
};

}  // namespace otdual
