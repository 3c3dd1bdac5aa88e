#include "mincap/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "mincap/error.hpp"

namespace mincap {

struct Expression::Node {
  enum class Kind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sin, Cos, Abs, Min, Max };
  Kind kind = Kind::Constant;
  long double constant = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->lhs = std::move(lhs);
  node->rhs = std::move(rhs);
  return node;
}

NodePtr make_constant(long double value) {
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::Constant;
  node->constant = value;
  return node;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    NodePtr node = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("expression '" + text_ + "': " + why + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Kind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Kind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  // right associative: a^b^c == a^(b^c)
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expression();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const long double value = std::strtold(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return make_constant(value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "r") return make(Node::Kind::Variable);
    if (name == "pi") return make_constant(std::numbers::pi_v<long double>);

    struct Call {
      const char* name;
      Node::Kind kind;
      int arity;
    };
    static constexpr Call calls[] = {
        {"pow", Node::Kind::Pow, 2}, {"exp", Node::Kind::Exp, 1}, {"log", Node::Kind::Log, 1},
        {"sin", Node::Kind::Sin, 1}, {"cos", Node::Kind::Cos, 1}, {"abs", Node::Kind::Abs, 1},
        {"min", Node::Kind::Min, 2}, {"max", Node::Kind::Max, 2},
    };
    for (const Call& call : calls) {
      if (name != call.name) continue;
      expect('(');
      NodePtr first = expression();
      NodePtr second;
      if (call.arity == 2) {
        expect(',');
        second = expression();
      }
      expect(')');
      return make(call.kind, first, second);
    }
    fail("unknown identifier '" + name + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

long double eval(const Node& node, long double r) {
  using K = Node::Kind;
  switch (node.kind) {
    case K::Constant: return node.constant;
    case K::Variable: return r;
    case K::Neg: return -eval(*node.lhs, r);
    case K::Add: return eval(*node.lhs, r) + eval(*node.rhs, r);
    case K::Sub: return eval(*node.lhs, r) - eval(*node.rhs, r);
    case K::Mul: return eval(*node.lhs, r) * eval(*node.rhs, r);
    case K::Div: return eval(*node.lhs, r) / eval(*node.rhs, r);
    case K::Pow: return std::pow(eval(*node.lhs, r), eval(*node.rhs, r));
    case K::Exp: return std::exp(eval(*node.lhs, r));
    case K::Log: return std::log(eval(*node.lhs, r));
    case K::Sin: return std::sin(eval(*node.lhs, r));
    case K::Cos: return std::cos(eval(*node.lhs, r));
    case K::Abs: return std::fabs(eval(*node.lhs, r));
    case K::Min: return std::fmin(eval(*node.lhs, r), eval(*node.rhs, r));
    case K::Max: return std::fmax(eval(*node.lhs, r), eval(*node.rhs, r));
  }
  return 0;
}

}  // namespace

Expression Expression::parse(const std::string& source) {
  Parser parser(source);
  return Expression(source, parser.parse());
}

long double Expression::evaluate(long double r) const { return eval(*root_, r); }

}  // namespace mincap
