// SPDX-License-Identifier: Apache-2.0

#include "dtn/field_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "dtn/hash.hpp"

namespace dtn
{

namespace
{

enum class Op
{
  Const,
  Var,  // x, y, theta, s
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Sin,
  Cos,
  Exp,
  Log,
  Sqrt,
  Abs,
  Min,
  Max
};

bool IsFunction(Op op)
{
  return op == Op::Sin || op == Op::Cos || op == Op::Exp || op == Op::Log ||
         op == Op::Sqrt || op == Op::Abs || op == Op::Min || op == Op::Max;
}

const char *FunctionName(Op op)
{
  switch (op)
  {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sqrt: return "sqrt";
    case Op::Abs: return "abs";
    case Op::Min: return "min";
    case Op::Max: return "max";
    default: return "";
  }
}

std::string Fmt17(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

struct FieldExpr::Node
{
  Op op;
  double value = 0.0;  // Const
  int var = 0;         // Var: 0=x 1=y 2=theta 3=s
  std::shared_ptr<const Node> lhs, rhs;
};

namespace
{

using NodePtr = std::shared_ptr<const FieldExpr::Node>;

NodePtr MakeConst(double v)
{
  auto n = std::make_shared<FieldExpr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr MakeVar(int var)
{
  auto n = std::make_shared<FieldExpr::Node>();
  n->op = Op::Var;
  n->var = var;
  return n;
}

NodePtr MakeNode(Op op, NodePtr lhs, NodePtr rhs = nullptr)
{
  auto n = std::make_shared<FieldExpr::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

//
// Recursive descent parser. Grammar, loosest binding first:
//   sum     := product (('+'|'-') product)*
//   product := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          (right associative)
//   primary := number | identifier | identifier '(' args ')' | '(' sum ')'
//
class Parser
{
public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr Run()
  {
    SkipSpace();
    if (pos_ >= text_.size())
    {
      throw FieldParseError("empty expression", 0);
    }
    NodePtr e = ParseSum();
    SkipSpace();
    if (pos_ < text_.size())
    {
      throw FieldParseError("unexpected trailing input", pos_);
    }
    return e;
  }

private:
  void SkipSpace()
  {
    while (pos_ < text_.size() && std::isspace((unsigned char)text_[pos_]))
    {
      pos_++;
    }
  }

  bool Accept(char c)
  {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c)
    {
      pos_++;
      return true;
    }
    return false;
  }

  char Peek()
  {
    SkipSpace();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr ParseSum()
  {
    NodePtr e = ParseProduct();
    while (true)
    {
      if (Accept('+'))
      {
        e = MakeNode(Op::Add, e, ParseProduct());
      }
      else if (Accept('-'))
      {
        e = MakeNode(Op::Sub, e, ParseProduct());
      }
      else
      {
        return e;
      }
    }
  }

  NodePtr ParseProduct()
  {
    NodePtr e = ParseUnary();
    while (true)
    {
      if (Accept('*'))
      {
        e = MakeNode(Op::Mul, e, ParseUnary());
      }
      else if (Accept('/'))
      {
        e = MakeNode(Op::Div, e, ParseUnary());
      }
      else
      {
        return e;
      }
    }
  }

  NodePtr ParseUnary()
  {
    if (Accept('-'))
    {
      return MakeNode(Op::Neg, ParseUnary());
    }
    return ParsePower();
  }

  NodePtr ParsePower()
  {
    NodePtr base = ParsePrimary();
    if (Accept('^'))
    {
      return MakeNode(Op::Pow, base, ParseUnary());
    }
    return base;
  }

  NodePtr ParsePrimary()
  {
    SkipSpace();
    if (pos_ >= text_.size())
    {
      throw FieldParseError("unexpected end of expression", pos_);
    }
    const char ch = text_[pos_];
    if (std::isdigit((unsigned char)ch) || ch == '.')
    {
      return ParseNumber();
    }
    if (std::isalpha((unsigned char)ch))
    {
      return ParseIdentifier();
    }
    if (ch == '(')
    {
      pos_++;
      NodePtr e = ParseSum();
      if (!Accept(')'))
      {
        throw FieldParseError("expected ')'", pos_);
      }
      return e;
    }
    throw FieldParseError(std::string("unexpected character '") + ch + "'", pos_);
  }

  NodePtr ParseNumber()
  {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit((unsigned char)text_[pos_]) || text_[pos_] == '.'))
    {
      pos_++;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E'))
    {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-'))
      {
        p++;
      }
      if (p < text_.size() && std::isdigit((unsigned char)text_[p]))
      {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_]))
        {
          pos_++;
        }
      }
    }
    const std::string tok(text_.substr(start, pos_ - start));
    char *end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
    {
      throw FieldParseError("malformed number '" + tok + "'", start);
    }
    return MakeConst(v);
  }

  NodePtr ParseIdentifier()
  {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_'))
    {
      pos_++;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return MakeVar(0);
    if (name == "y") return MakeVar(1);
    if (name == "theta") return MakeVar(2);
    if (name == "s") return MakeVar(3);

    Op op;
    int arity = 1;
    if (name == "sin") op = Op::Sin;
    else if (name == "cos") op = Op::Cos;
    else if (name == "exp") op = Op::Exp;
    else if (name == "log") op = Op::Log;
    else if (name == "sqrt") op = Op::Sqrt;
    else if (name == "abs") op = Op::Abs;
    else if (name == "min") { op = Op::Min; arity = 2; }
    else if (name == "max") { op = Op::Max; arity = 2; }
    else
    {
      throw FieldParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    if (!Accept('('))
    {
      throw FieldParseError("expected '(' after function '" + std::string(name) + "'", pos_);
    }
    std::vector<NodePtr> args;
    args.push_back(ParseSum());
    while (Accept(','))
    {
      args.push_back(ParseSum());
    }
    if (!Accept(')'))
    {
      throw FieldParseError("expected ')' in call of '" + std::string(name) + "'", pos_);
    }
    if ((int)args.size() != arity)
    {
      throw FieldParseError("function '" + std::string(name) + "' expects " +
                            std::to_string(arity) + " argument(s), got " +
                            std::to_string(args.size()), start);
    }
    return MakeNode(op, args[0], arity == 2 ? args[1] : nullptr);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int Precedence(Op op)
{
  switch (op)
  {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;  // atoms and calls never need parentheses
  }
}

void PrintNode(const FieldExpr::Node &n, std::string &out)
{
  const auto child = [&](const FieldExpr::Node &c, bool parens) {
    if (parens)
    {
      out += '(';
      PrintNode(c, out);
      out += ')';
    }
    else
    {
      PrintNode(c, out);
    }
  };

  switch (n.op)
  {
    case Op::Const:
      out += Fmt17(n.value);
      return;
    case Op::Var:
      out += (n.var == 0 ? "x" : n.var == 1 ? "y" : n.var == 2 ? "theta" : "s");
      return;
    case Op::Neg:
      out += '-';
      // operand of tighter or equal binding prints bare; Pow binds tighter than Neg
      child(*n.lhs, Precedence(n.lhs->op) < Precedence(Op::Neg));
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    {
      const int p = Precedence(n.op);
      child(*n.lhs, Precedence(n.lhs->op) < p);
      out += (n.op == Op::Add ? "+" : n.op == Op::Sub ? "-" : n.op == Op::Mul ? "*" : "/");
      // left associative: the right child needs parens at equal precedence too
      child(*n.rhs, Precedence(n.rhs->op) <= p);
      return;
    }
    case Op::Pow:
      // right associative, and unary minus below must be parenthesized on the left
      child(*n.lhs, Precedence(n.lhs->op) <= Precedence(Op::Pow));
      out += '^';
      child(*n.rhs, Precedence(n.rhs->op) < Precedence(Op::Pow));
      return;
    default:
      out += FunctionName(n.op);
      out += '(';
      PrintNode(*n.lhs, out);
      if (n.rhs)
      {
        out += ',';
        PrintNode(*n.rhs, out);
      }
      out += ')';
      return;
  }
}

double EvalNode(const FieldExpr::Node &n, const EvalContext &ctx)
{
  const auto finite = [](double v, const char *what) {
    if (!std::isfinite(v))
    {
      throw FieldEvalError(std::string("non-finite result in ") + what);
    }
    return v;
  };
  switch (n.op)
  {
    case Op::Const:
      return n.value;
    case Op::Var:
      switch (n.var)
      {
        case 0: return ctx.x;
        case 1: return ctx.y;
        case 2:
          if (!ctx.theta)
          {
            throw FieldEvalError("variable 'theta' is only available on boundary points");
          }
          return *ctx.theta;
        default:
          if (!ctx.s)
          {
            throw FieldEvalError("variable 's' is only available on boundary points");
          }
          return *ctx.s;
      }
    case Op::Add:
      return finite(EvalNode(*n.lhs, ctx) + EvalNode(*n.rhs, ctx), "+");
    case Op::Sub:
      return finite(EvalNode(*n.lhs, ctx) - EvalNode(*n.rhs, ctx), "-");
    case Op::Mul:
      return finite(EvalNode(*n.lhs, ctx) * EvalNode(*n.rhs, ctx), "*");
    case Op::Div:
    {
      const double den = EvalNode(*n.rhs, ctx);
      if (den == 0.0)
      {
        throw FieldEvalError("division by zero");
      }
      return finite(EvalNode(*n.lhs, ctx) / den, "/");
    }
    case Op::Pow:
    {
      const double b = EvalNode(*n.lhs, ctx);
      const double e = EvalNode(*n.rhs, ctx);
      const double v = std::pow(b, e);
      if (!std::isfinite(v))
      {
        throw FieldEvalError("domain error in '^'");
      }
      return v;
    }
    case Op::Neg:
      return -EvalNode(*n.lhs, ctx);
    case Op::Sin:
      return std::sin(EvalNode(*n.lhs, ctx));
    case Op::Cos:
      return std::cos(EvalNode(*n.lhs, ctx));
    case Op::Exp:
      return finite(std::exp(EvalNode(*n.lhs, ctx)), "exp");
    case Op::Log:
    {
      const double v = EvalNode(*n.lhs, ctx);
      if (!(v > 0.0))
      {
        throw FieldEvalError("log of non-positive value");
      }
      return std::log(v);
    }
    case Op::Sqrt:
    {
      const double v = EvalNode(*n.lhs, ctx);
      if (v < 0.0)
      {
        throw FieldEvalError("sqrt of negative value");
      }
      return std::sqrt(v);
    }
    case Op::Abs:
      return std::abs(EvalNode(*n.lhs, ctx));
    case Op::Min:
      return std::min(EvalNode(*n.lhs, ctx), EvalNode(*n.rhs, ctx));
    case Op::Max:
      return std::max(EvalNode(*n.lhs, ctx), EvalNode(*n.rhs, ctx));
  }
  throw FieldEvalError("corrupt expression node");
}

bool SameNode(const FieldExpr::Node &a, const FieldExpr::Node &b)
{
  if (a.op != b.op)
  {
    return false;
  }
  switch (a.op)
  {
    case Op::Const:
      // bit-level identity so printing stays a faithful canonical form
      return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
    case Op::Var:
      return a.var == b.var;
    default:
      if ((a.lhs == nullptr) != (b.lhs == nullptr) || (a.rhs == nullptr) != (b.rhs == nullptr))
      {
        return false;
      }
      if (a.lhs && !SameNode(*a.lhs, *b.lhs))
      {
        return false;
      }
      if (a.rhs && !SameNode(*a.rhs, *b.rhs))
      {
        return false;
      }
      return true;
  }
}

bool NodeUsesBoundary(const FieldExpr::Node &n)
{
  if (n.op == Op::Var)
  {
    return n.var >= 2;
  }
  if (n.lhs && NodeUsesBoundary(*n.lhs))
  {
    return true;
  }
  return n.rhs && NodeUsesBoundary(*n.rhs);
}

}  // namespace

FieldExpr::FieldExpr() : root_(MakeConst(0.0)) {}

FieldExpr FieldExpr::Parse(std::string_view text)
{
  return FieldExpr(Parser(text).Run());
}

FieldExpr FieldExpr::Constant(double value)
{
  return FieldExpr(MakeConst(value));
}

std::string FieldExpr::Print() const
{
  std::string out;
  PrintNode(*root_, out);
  return out;
}

double FieldExpr::Eval(const EvalContext &ctx) const
{
  return EvalNode(*root_, ctx);
}

bool FieldExpr::SameTree(const FieldExpr &other) const
{
  return SameNode(*root_, *other.root_);
}

bool FieldExpr::IsConstant(double &value) const
{
  if (root_->op == Op::Const)
  {
    value = root_->value;
    return true;
  }
  if (root_->op == Op::Neg && root_->lhs->op == Op::Const)
  {
    value = -root_->lhs->value;
    return true;
  }
  return false;
}

bool FieldExpr::DependsOnBoundary() const
{
  return NodeUsesBoundary(*root_);
}

std::complex<double> ParseComplex(std::string_view text)
{
  std::string t;
  for (char c : text)
  {
    if (!std::isspace((unsigned char)c))
    {
      t += c;
    }
  }
  if (t.empty())
  {
    throw FieldParseError("empty complex literal", 0);
  }
  // split at the last top-level +/- that is not an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t i = 1; i < t.size(); i++)
  {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E')
    {
      split = i;
    }
  }
  const auto parse_part = [&](std::string part, bool imag_required) -> double {
    bool imag = false;
    if (!part.empty() && (part.back() == 'i' || part.back() == 'I'))
    {
      imag = true;
      part.pop_back();
      if (part.empty() || part == "+" || part == "-")
      {
        part += '1';
      }
    }
    if (imag != imag_required)
    {
      throw FieldParseError("malformed complex literal '" + std::string(text) + "'", 0);
    }
    char *end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    if (end != part.c_str() + part.size())
    {
      throw FieldParseError("malformed complex literal '" + std::string(text) + "'", 0);
    }
    return v;
  };

  if (split == std::string::npos)
  {
    const bool is_imag = t.back() == 'i' || t.back() == 'I';
    return is_imag ? std::complex<double>(0.0, parse_part(t, true))
                   : std::complex<double>(parse_part(t, false), 0.0);
  }
  return {parse_part(t.substr(0, split), false), parse_part(t.substr(split), true)};
}

std::string FormatComplex(std::complex<double> z)
{
  std::string s = Fmt17(z.real());
  if (z.imag() >= 0.0)
  {
    s += '+';
  }
  s += Fmt17(z.imag());
  s += 'i';
  return s;
}

CoefficientSet CoefficientSet::LaplaceBeltrami()
{
  CoefficientSet cs;
  cs.a = {FieldExpr::Constant(1.0), FieldExpr::Constant(0.0), FieldExpr::Constant(0.0),
          FieldExpr::Constant(1.0)};
  cs.b = {FieldExpr::Constant(0.0), FieldExpr::Constant(0.0)};
  cs.c = FieldExpr::Constant(0.0);
  cs.d = FieldExpr::Constant(0.0);
  cs.beta = FieldExpr::Constant(1.0);
  cs.lambda = {1.0, 0.0};
  return cs;
}

Eigen::Matrix2d CoefficientSet::EvalA(double x, double y) const
{
  EvalContext ctx{x, y, {}, {}};
  Eigen::Matrix2d m;
  m << a[0].Eval(ctx), a[1].Eval(ctx), a[2].Eval(ctx), a[3].Eval(ctx);
  return m;
}

namespace
{

// 1 inside r0, 0 outside r1, C^1 cubic blend between.
double SupportCutoff(double r, double r0, double r1)
{
  if (r <= r0)
  {
    return 1.0;
  }
  if (r >= r1)
  {
    return 0.0;
  }
  const double t = (r - r0) / (r1 - r0);
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

}  // namespace

Eigen::Vector2d CoefficientSet::EvalB(double x, double y) const
{
  EvalContext ctx{x, y, {}, {}};
  const double w = SupportCutoff(std::hypot(x, y), b_support_inner, b_support_outer);
  if (w == 0.0)
  {
    return Eigen::Vector2d::Zero();
  }
  return {w * b[0].Eval(ctx), w * b[1].Eval(ctx)};
}

double CoefficientSet::EvalC(double x, double y) const
{
  return c.Eval(EvalContext{x, y, {}, {}});
}

double CoefficientSet::EvalD(const EvalContext &ctx) const
{
  return d.Eval(ctx);
}

double CoefficientSet::EvalBeta(const EvalContext &ctx) const
{
  const double v = beta.Eval(ctx);
  if (!(v > 0.0))
  {
    throw FieldEvalError("beta must be strictly positive on the boundary");
  }
  return v;
}

namespace
{

bool ExprIs(const FieldExpr &e, double v)
{
  double c = 0.0;
  return e.IsConstant(c) && c == v;
}

}  // namespace

bool CoefficientSet::HasIdentityA() const
{
  return ExprIs(a[0], 1.0) && ExprIs(a[1], 0.0) && ExprIs(a[2], 0.0) && ExprIs(a[3], 1.0);
}

bool CoefficientSet::HasZeroB() const
{
  return ExprIs(b[0], 0.0) && ExprIs(b[1], 0.0);
}

bool CoefficientSet::HasZeroC() const
{
  return ExprIs(c, 0.0);
}

bool CoefficientSet::HasZeroD() const
{
  return ExprIs(d, 0.0);
}

bool CoefficientSet::HasUnitBeta() const
{
  return ExprIs(beta, 1.0);
}

std::uint64_t CoefficientSet::Hash() const
{
  std::string bytes;
  for (const auto &e : a)
  {
    bytes += e.Print();
    bytes += ';';
  }
  for (const auto &e : b)
  {
    bytes += e.Print();
    bytes += ';';
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g;", b_support_inner, b_support_outer);
  bytes += buf;
  bytes += c.Print() + ";" + d.Print() + ";" + beta.Print() + ";";
  bytes += FormatComplex(lambda);
  return Fnv1a64(bytes);
}

}  // namespace dtn
