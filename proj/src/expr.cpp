#include "fht/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace fht {

namespace {

std::string context_at(const std::string& s, std::size_t pos) {
  return "'" + s + "' at position " + std::to_string(pos);
}

}  // namespace

class ExprParser {
 public:
  explicit ExprParser(const std::string& src) : src_(src) {}

  Expr parse() {
    Expr e;
    e.source_ = src_;
    parse_sum(e.program_);
    skip_ws();
    if (pos_ != src_.size())
      throw ExprError("trailing input in expression " + context_at(src_, pos_));
    if (e.program_.empty())
      throw ExprError("empty expression");
    return e;
  }

 private:
  using Prog = std::vector<Expr::Instr>;

  const std::string& src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  void parse_sum(Prog& out) {
    parse_term(out);
    while (true) {
      if (accept('+')) {
        parse_term(out);
        out.push_back({Expr::Op::Add});
      } else if (accept('-')) {
        parse_term(out);
        out.push_back({Expr::Op::Sub});
      } else {
        return;
      }
    }
  }

  void parse_term(Prog& out) {
    parse_unary(out);
    while (true) {
      if (accept('*')) {
        parse_unary(out);
        out.push_back({Expr::Op::Mul});
      } else if (accept('/')) {
        parse_unary(out);
        out.push_back({Expr::Op::Div});
      } else {
        return;
      }
    }
  }

  void parse_unary(Prog& out) {
    if (accept('-')) {
      parse_unary(out);
      out.push_back({Expr::Op::Neg});
      return;
    }
    parse_power(out);
  }

  void parse_power(Prog& out) {
    parse_atom(out);
    if (accept('^')) {
      parse_unary(out);  // right associative, allows negative exponents
      out.push_back({Expr::Op::Pow});
    }
  }

  void parse_atom(Prog& out) {
    skip_ws();
    if (pos_ >= src_.size())
      throw ExprError("unexpected end of expression " + context_at(src_, pos_));
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      parse_sum(out);
      if (!accept(')'))
        throw ExprError("missing ')' in expression " + context_at(src_, pos_));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin)
        throw ExprError("bad numeric literal in " + context_at(src_, pos_));
      pos_ += static_cast<std::size_t>(end - begin);
      out.push_back({Expr::Op::PushConst, v});
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             std::isalpha(static_cast<unsigned char>(src_[pos_])))
        ++pos_;
      const std::string word = src_.substr(start, pos_ - start);
      if (word == "z") {
        out.push_back({Expr::Op::PushZ});
        return;
      }
      if (word == "sqrt") {
        if (!accept('('))
          throw ExprError("sqrt requires '(' in " + context_at(src_, start));
        parse_sum(out);
        if (!accept(')'))
          throw ExprError("missing ')' after sqrt in " + context_at(src_, pos_));
        out.push_back({Expr::Op::Sqrt});
        return;
      }
      throw ExprError("unknown identifier '" + word + "' in " +
                      context_at(src_, start));
    }
    throw ExprError(std::string("unexpected character '") + c + "' in " +
                    context_at(src_, pos_));
  }
};

Expr Expr::parse(const std::string& source) { return ExprParser(source).parse(); }

double Expr::operator()(double z) const {
  if (program_.empty()) throw ExprError("evaluating empty expression");
  double stack[64];
  int top = -1;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::PushConst:
        stack[++top] = in.value;
        break;
      case Op::PushZ:
        stack[++top] = z;
        break;
      case Op::Add:
        stack[top - 1] += stack[top];
        --top;
        break;
      case Op::Sub:
        stack[top - 1] -= stack[top];
        --top;
        break;
      case Op::Mul:
        stack[top - 1] *= stack[top];
        --top;
        break;
      case Op::Div:
        stack[top - 1] /= stack[top];
        --top;
        break;
      case Op::Pow:
        stack[top - 1] = std::pow(stack[top - 1], stack[top]);
        --top;
        break;
      case Op::Sqrt:
        stack[top] = std::sqrt(stack[top]);
        break;
      case Op::Neg:
        stack[top] = -stack[top];
        break;
    }
    if (top >= 63) throw ExprError("expression too deep");
  }
  return stack[0];
}

}  // namespace fht
