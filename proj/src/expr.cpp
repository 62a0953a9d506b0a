#include "lagphase/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace lagphase {

struct Expression::Node {
  enum class Op {
    kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg,
    kSin, kCos, kTan, kAtan, kExp, kAbs,
  };
  Op op;
  double value = 0.0;  // kConst
  int var = 0;         // kVar, 0-based
  std::unique_ptr<Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using Op = Node::Op;

std::unique_ptr<Node> MakeConst(double v) {
  auto n = std::make_unique<Node>();
  n->op = Op::kConst;
  n->value = v;
  return n;
}

std::unique_ptr<Node> MakeUnary(Op op, std::unique_ptr<Node> a) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->lhs = std::move(a);
  return n;
}

std::unique_ptr<Node> MakeBinary(Op op, std::unique_ptr<Node> a,
                                 std::unique_ptr<Node> b) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  std::unique_ptr<Node> Run() {
    auto node = ParseSum();
    SkipSpace();
    if (pos_ != text_.size()) throw ExprError("unexpected trailing input", pos_);
    return node;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool Consume(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  std::unique_ptr<Node> ParseSum() {
    auto node = ParseProduct();
    for (;;) {
      if (Consume('+')) node = MakeBinary(Op::kAdd, std::move(node), ParseProduct());
      else if (Consume('-')) node = MakeBinary(Op::kSub, std::move(node), ParseProduct());
      else return node;
    }
  }

  std::unique_ptr<Node> ParseProduct() {
    auto node = ParseUnary();
    for (;;) {
      if (Consume('*')) node = MakeBinary(Op::kMul, std::move(node), ParseUnary());
      else if (Consume('/')) node = MakeBinary(Op::kDiv, std::move(node), ParseUnary());
      else return node;
    }
  }

  std::unique_ptr<Node> ParseUnary() {
    if (Consume('-')) return MakeUnary(Op::kNeg, ParseUnary());
    Consume('+');
    return ParsePower();
  }

  std::unique_ptr<Node> ParsePower() {
    auto base = ParseAtom();
    if (Consume('^')) {
      // Right-associative; exponent may carry a unary sign.
      return MakeBinary(Op::kPow, std::move(base), ParseUnary());
    }
    return base;
  }

  std::unique_ptr<Node> ParseAtom() {
    SkipSpace();
    if (pos_ >= text_.size()) throw ExprError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto node = ParseSum();
      if (!Consume(')')) throw ExprError("missing ')'", pos_);
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return ParseNumber();
    if (std::isalpha(static_cast<unsigned char>(c))) return ParseIdentifier();
    throw ExprError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::unique_ptr<Node> ParseNumber() {
    const size_t start = pos_;
    size_t consumed = 0;
    double v;
    try {
      v = std::stod(text_.substr(start), &consumed);
    } catch (const std::exception&) {
      throw ExprError("malformed number", static_cast<int>(start));
    }
    pos_ = start + consumed;
    return MakeConst(v);
  }

  std::unique_ptr<Node> ParseIdentifier() {
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])))) ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "pi") return MakeConst(std::numbers::pi);
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '4') {
      auto n = std::make_unique<Node>();
      n->op = Op::kVar;
      n->var = name[1] - '1';
      return n;
    }
    static const std::pair<const char*, Op> kFns[] = {
        {"sin", Op::kSin}, {"cos", Op::kCos}, {"tan", Op::kTan},
        {"atan", Op::kAtan}, {"exp", Op::kExp}, {"abs", Op::kAbs},
    };
    for (const auto& [fname, op] : kFns) {
      if (name == fname) {
        if (!Consume('(')) throw ExprError("expected '(' after function name", pos_);
        auto arg = ParseSum();
        if (!Consume(')')) throw ExprError("missing ')'", pos_);
        return MakeUnary(op, std::move(arg));
      }
    }
    throw ExprError("unknown identifier '" + name + "'", static_cast<int>(start));
  }

  const std::string& text_;
  size_t pos_ = 0;
};

double EvalNode(const Node& n, const Eigen::VectorXd& x) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar:
      if (n.var >= x.size()) {
        throw std::invalid_argument("Expression references x" +
                                    std::to_string(n.var + 1) +
                                    " beyond the domain dimension");
      }
      return x[n.var];
    case Op::kAdd: return EvalNode(*n.lhs, x) + EvalNode(*n.rhs, x);
    case Op::kSub: return EvalNode(*n.lhs, x) - EvalNode(*n.rhs, x);
    case Op::kMul: return EvalNode(*n.lhs, x) * EvalNode(*n.rhs, x);
    case Op::kDiv: return EvalNode(*n.lhs, x) / EvalNode(*n.rhs, x);
    case Op::kPow: return std::pow(EvalNode(*n.lhs, x), EvalNode(*n.rhs, x));
    case Op::kNeg: return -EvalNode(*n.lhs, x);
    case Op::kSin: return std::sin(EvalNode(*n.lhs, x));
    case Op::kCos: return std::cos(EvalNode(*n.lhs, x));
    case Op::kTan: return std::tan(EvalNode(*n.lhs, x));
    case Op::kAtan: return std::atan(EvalNode(*n.lhs, x));
    case Op::kExp: return std::exp(EvalNode(*n.lhs, x));
    case Op::kAbs: return std::abs(EvalNode(*n.lhs, x));
  }
  throw std::logic_error("EvalNode: unreachable");
}

int MaxVariable(const Node& n) {
  int v = n.op == Op::kVar ? n.var + 1 : 0;
  if (n.lhs) v = std::max(v, MaxVariable(*n.lhs));
  if (n.rhs) v = std::max(v, MaxVariable(*n.rhs));
  return v;
}

}  // namespace

Expression Expression::Parse(const std::string& text) {
  return Expression(Parser(text).Run());
}

Expression::Expression(std::unique_ptr<Node> root) : root_(std::move(root)) {}
Expression::~Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::Eval(const Eigen::VectorXd& x) const {
  return EvalNode(*root_, x);
}

int Expression::max_variable() const { return MaxVariable(*root_); }

}  // namespace lagphase
