// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_ELLIPTIC_HPP
#define DTN_ELLIPTIC_HPP

#include <complex>
#include <memory>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "dtn/assembly.hpp"

namespace dtn
{

class SolveError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Solution of A_m u = 0, trace(u) = phi. The boundary data is imposed strongly, so
// trace(u) equals phi exactly; residual is the interior equation residual.
struct DirichletSolution
{
  VectorC u;             // full nodal vector
  VectorC boundary_data; // phi in boundary dof order
  double residual = 0.0;
};

// Solution of A_m u = 0, Bu - lambda trace(u) = phi.
struct RobinSolution
{
  VectorC u;
  std::complex<double> lambda;
  VectorC phi;
  VectorC flux;  // conormal feedback Bu at boundary dofs
  double residual = 0.0;  // sup norm of Bu - lambda Lu - phi
  bool extended_regime = false;  // Re(lambda) <= 0
  double condition_estimate = 0.0;
};

struct CoercivityReport
{
  bool positive_definite = false;
  double min_eigenvalue_estimate = 0.0;
};

//
// Dirichlet and Robin solvers over one Assembly. The interior block of
// A_op = K - K1 - K0 is factored once (complex sparse LU, deterministic ordering) and
// shared by every Dirichlet extension, so applying the Dirichlet operator columnwise
// reuses one factorization. Complex arithmetic is used throughout even for real data;
// solves against the stored factorizations are safe to run concurrently.
//
class EllipticSolver
{
public:
  explicit EllipticSolver(const Assembly &assembly);

  const Assembly &GetAssembly() const { return *assembly_; }

  // Harmonic (A_m-harmonic) extension of boundary data; realizes the Dirichlet
  // operator L0. Throws SolveError if the interior block is singular (a "lambda = 0
  // in the Dirichlet spectrum" situation, possible for large positive c).
  DirichletSolution DirichletExtend(const VectorC &phi) const;

  // max interior |u| / max boundary |phi| (the interior maximum principle quotient).
  static double MaxPrincipleRatio(const DirichletSolution &sol);

  // Weak-form Robin solve for complex lambda; Re(lambda) <= 0 is accepted and
  // labeled extended_regime. Throws SolveError on a singular system (lambda at a
  // generalized eigenvalue).
  RobinSolution RobinSolve(std::complex<double> lambda, const VectorC &phi) const;

  // |Re(lambda)| * max|u| / max|phi|.
  static double RobinMaxPrincipleRatio(const RobinSolution &sol);

  // Hermitian-part positive definiteness of the Robin system matrix for real
  // lambda > 0 (the discrete coercivity surrogate).
  CoercivityReport CoercivitySurrogate(double lambda) const;

private:
  const Assembly *assembly_;
  SparseComplex a_op_;           // K - K1 - K0, complex copy
  SparseComplex a_interior_;     // interior block
  SparseComplex a_ib_;           // interior rows, boundary columns
  std::shared_ptr<Eigen::SparseLU<SparseComplex>> interior_lu_;
};

}  // namespace dtn

#endif  // DTN_ELLIPTIC_HPP
