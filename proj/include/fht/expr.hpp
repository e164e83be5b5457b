#ifndef FHT_EXPR_HPP
#define FHT_EXPR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace fht {

struct ExprError : std::runtime_error {
  explicit ExprError(const std::string& msg) : std::runtime_error(msg) {}
};

// Closed-form scalar expression in one variable `z`.
// Grammar: + - * / ^ (right associative), unary minus, sqrt(...), parentheses,
// decimal literals. Compiled to a small stack program.
class Expr {
 public:
  Expr() = default;

  static Expr parse(const std::string& source);

  double operator()(double z) const;

  const std::string& source() const { return source_; }
  bool empty() const { return program_.empty(); }

 private:
  enum class Op : std::uint8_t {
    PushConst,
    PushZ,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sqrt,
    Neg,
  };
  struct Instr {
    Op op;
    double value = 0.0;
  };

  std::string source_;
  std::vector<Instr> program_;

  friend class ExprParser;
};

}  // namespace fht

#endif
