#include "otdual/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "otdual/error.hpp"

namespace otdual {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, std::size_t dimension, Expression& out)
      : text_(text), dim_(dimension), out_(out) {}

  std::size_t parse() {
    std::size_t root = sum();
    skip();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::kSchema, "objective.expr", "expression: " + what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::size_t node(Op op, std::size_t left = 0, std::size_t right = 0, double value = 0) {
    out_.nodes_.push_back({op, value, left, right});
    return out_.nodes_.size() - 1;
  }

  std::size_t sum() {
    std::size_t left = product();
    for (;;) {
      if (accept('+')) left = node(Op::kAdd, left, product());
      else if (accept('-')) left = node(Op::kSub, left, product());
      else return left;
    }
  }

  std::size_t product() {
    std::size_t left = unary();
    for (;;) {
      if (accept('*')) left = node(Op::kMul, left, unary());
      else if (accept('/')) left = node(Op::kDiv, left, unary());
      else return left;
    }
  }

  std::size_t unary() {
    if (accept('-')) return node(Op::kNeg, unary());
    if (accept('+')) return unary();
    return power();
  }

  std::size_t power() {
    std::size_t base = primary();
    if (accept('^')) return node(Op::kPow, base, unary());
    return base;
  }

  std::size_t primary() {
    skip();
    if (pos_ >= text_.size()) error("unexpected end");
    char ch = text_[pos_];
    if (accept('(')) {
      std::size_t inner = sum();
      if (!accept(')')) error("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(ch))) return identifier();
    error("unexpected '" + std::string(1, ch) + "'");
  }

  std::size_t number() {
    double v = 0;
    auto [end, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) error("bad number");
    pos_ = static_cast<std::size_t>(end - text_.data());
    return node(Op::kConst, 0, 0, v);
  }

  std::size_t identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    std::size_t digits_start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string digits(text_.substr(digits_start, pos_ - digits_start));

    if (!digits.empty()) {
      std::size_t idx = std::stoul(digits);
      if (idx == 0 || idx > dim_) error("variable index out of range in '" + name + digits + "'");
      if (name == "nu") return node(Op::kNu, idx - 1);
      if (name == "k") {
        out_.uses_k_ = true;
        return node(Op::kK, idx - 1);
      }
      error("unknown variable '" + name + digits + "'");
    }
    Op op;
    if (name == "sqrt") op = Op::kSqrt;
    else if (name == "exp") op = Op::kExp;
    else if (name == "log") op = Op::kLog;
    else if (name == "abs") op = Op::kAbs;
    else error("unknown name '" + name + "'");
    if (!accept('(')) error("expected '(' after " + name);
    std::size_t arg = sum();
    if (!accept(')')) error("missing ')'");
    return node(op, arg);
  }

  std::string_view text_;
  std::size_t dim_;
  Expression& out_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view text, std::size_t dimension) {
  Expression e;
  e.text_ = std::string(text);
  ExpressionParser parser(e.text_, dimension, e);
  e.root_ = parser.parse();
  return e;
}

double Expression::evaluate(const std::vector<double>& nu, const std::vector<double>& k) const {
  if (nodes_.empty()) fail(ErrorCode::kInvalidArgument, "objective.expr", "empty expression");
  return eval(root_, nu, k);
}

double Expression::eval(std::size_t at, const std::vector<double>& nu, const std::vector<double>& k) const {
  const Node& n = nodes_[at];
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kNu: return nu.at(n.index);
    case Op::kK: return k.at(n.index);
    case Op::kAdd: return eval(n.index, nu, k) + eval(n.right, nu, k);
    case Op::kSub: return eval(n.index, nu, k) - eval(n.right, nu, k);
    case Op::kMul: return eval(n.index, nu, k) * eval(n.right, nu, k);
    case Op::kDiv: return eval(n.index, nu, k) / eval(n.right, nu, k);
    case Op::kPow: return std::pow(eval(n.index, nu, k), eval(n.right, nu, k));
    case Op::kNeg: return -eval(n.index, nu, k);
    case Op::kSqrt: return std::sqrt(eval(n.index, nu, k));
    case Op::kExp: return std::exp(eval(n.index, nu, k));
    case Op::kLog: return std::log(eval(n.index, nu, k));
    case Op::kAbs: return std::abs(eval(n.index, nu, k));
  }
  return 0;
}

}  // namespace otdual
