// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_FIELD_EXPR_HPP
#define DTN_FIELD_EXPR_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace dtn
{

class FieldParseError : public std::runtime_error
{
public:
  FieldParseError(const std::string &what, std::size_t offset)
    : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"), offset_(offset)
  {
  }
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class FieldEvalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Point at which a field is evaluated. The boundary variables theta (chart angle)
// and s (arc length along the loop) exist only on boundary points; referencing them
// elsewhere is a missing-variable error.
struct EvalContext
{
  double x = 0.0;
  double y = 0.0;
  std::optional<double> theta;
  std::optional<double> s;
};

//
// Immutable arithmetic expression over {x, y, theta, s}, constants, the operators
// + - * / ^ and the functions sin, cos, exp, log, sqrt, abs, min, max. Parsing uses
// standard precedence (^ above unary minus above */ above +-, ^ right-associative).
// Printing emits a canonical form whose reparse reproduces the tree, and evaluation
// is total: any NaN/Inf or domain violation raises FieldEvalError instead of
// propagating silently.
//
class FieldExpr
{
public:
  FieldExpr();  // the constant 0

  static FieldExpr Parse(std::string_view text);
  static FieldExpr Constant(double value);

  std::string Print() const;
  double Eval(const EvalContext &ctx) const;

  // Structural identity (used by the round-trip property tests).
  bool SameTree(const FieldExpr &other) const;

  bool IsConstant(double &value) const;
  bool DependsOnBoundary() const;  // references theta or s

  struct Node;

private:
  explicit FieldExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

// Parses "a", "bi", "a+bi", "a-bi" with optional spaces, e.g. "1+2i", "-0.5i".
std::complex<double> ParseComplex(std::string_view text);
std::string FormatComplex(std::complex<double> z);

//
// The full coefficient data of one problem: symmetric 2x2 tensor a, compactly
// supported vector field b, scalar c on the manifold, d and beta (> 0) on the
// boundary, and the complex spectral parameter lambda. The compact support of b is
// enforced by a C^1 polynomial cutoff in the chart radius: 1 inside support_inner,
// 0 outside support_outer.
//
struct CoefficientSet
{
  std::array<FieldExpr, 4> a;  // a11 a12 a21 a22
  std::array<FieldExpr, 2> b;
  double b_support_inner = 0.5;
  double b_support_outer = 0.8;
  FieldExpr c;
  FieldExpr d;
  FieldExpr beta;
  std::complex<double> lambda{1.0, 0.0};

  // a = id, b = 0, c = 0, d = 0, beta = 1, lambda = 1.
  static CoefficientSet LaplaceBeltrami();

  Eigen::Matrix2d EvalA(double x, double y) const;
  Eigen::Vector2d EvalB(double x, double y) const;  // includes the cutoff
  double EvalC(double x, double y) const;
  double EvalD(const EvalContext &ctx) const;
  double EvalBeta(const EvalContext &ctx) const;  // throws if <= 0

  bool HasIdentityA() const;
  bool HasZeroB() const;
  bool HasZeroC() const;
  bool HasZeroD() const;
  bool HasUnitBeta() const;
  // a = id, b = 0, c = 0 (the principal part is the plain Laplace-Beltrami operator).
  bool IsFlatPrincipal() const { return HasIdentityA() && HasZeroB() && HasZeroC(); }

  // Hash of the printed expressions and parameters; used for provenance.
  std::uint64_t Hash() const;
};

}  // namespace dtn

#endif  // DTN_FIELD_EXPR_HPP
