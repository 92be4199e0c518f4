// SPDX-License-Identifier: Apache-2.0

#include "dtn/elliptic.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SparseCholesky>

namespace dtn
{

namespace
{

using Cplx = std::complex<double>;

// Extract a row/column submatrix of a sparse matrix given index maps
// (new index = map[old index] or -1 to drop).
SparseComplex Submatrix(const SparseComplex &A, const std::vector<int> &row_map, int nrows,
                        const std::vector<int> &col_map, int ncols)
{
  std::vector<Eigen::Triplet<Cplx>> trips;
  trips.reserve(A.nonZeros());
  for (int k = 0; k < A.outerSize(); k++)
  {
    for (SparseComplex::InnerIterator it(A, k); it; ++it)
    {
      const int r = row_map[it.row()];
      const int c = col_map[it.col()];
      if (r >= 0 && c >= 0)
      {
        trips.emplace_back(r, c, it.value());
      }
    }
  }
  SparseComplex out(nrows, ncols);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace

EllipticSolver::EllipticSolver(const Assembly &assembly) : assembly_(&assembly)
{
  a_op_ = assembly.InteriorOperator().cast<Cplx>();

  const int n = assembly.NumTotal();
  const int ni = assembly.NumInterior();
  const int nb = assembly.NumBoundary();
  std::vector<int> bnd_map(n, -1);
  for (int ib = 0; ib < nb; ib++)
  {
    bnd_map[assembly.boundary.trace_map[ib]] = ib;
  }
  a_interior_ = Submatrix(a_op_, assembly.vertex_to_interior, ni,
                          assembly.vertex_to_interior, ni);
  a_ib_ = Submatrix(a_op_, assembly.vertex_to_interior, ni, bnd_map, nb);

  interior_lu_ = std::make_shared<Eigen::SparseLU<SparseComplex>>();
  interior_lu_->compute(a_interior_);
  if (interior_lu_->info() != Eigen::Success)
  {
    throw SolveError("interior block is singular (lambda = 0 lies in the Dirichlet "
                     "spectrum of the operator)");
  }
}

DirichletSolution EllipticSolver::DirichletExtend(const VectorC &phi) const
{
  const Assembly &asmb = *assembly_;
  const int nb = asmb.NumBoundary();
  if (phi.size() != nb)
  {
    throw SolveError("dirichlet extension: boundary data has wrong dimension");
  }
  DirichletSolution sol;
  sol.boundary_data = phi;
  const VectorC rhs = -(a_ib_ * phi);
  const VectorC ui = interior_lu_->solve(rhs);
  sol.u = VectorC::Zero(asmb.NumTotal());
  for (int i = 0; i < asmb.NumInterior(); i++)
  {
    sol.u[asmb.interior_dofs[i]] = ui[i];
  }
  for (int ib = 0; ib < nb; ib++)
  {
    sol.u[asmb.boundary.trace_map[ib]] = phi[ib];
  }
  sol.residual = (a_interior_ * ui - rhs).norm();
  return sol;
}

double EllipticSolver::MaxPrincipleRatio(const DirichletSolution &sol)
{
  const double phi_max = sol.boundary_data.cwiseAbs().maxCoeff();
  if (phi_max == 0.0)
  {
    return 0.0;
  }
  return sol.u.cwiseAbs().maxCoeff() / phi_max;
}

RobinSolution EllipticSolver::RobinSolve(std::complex<double> lambda, const VectorC &phi) const
{
  const Assembly &asmb = *assembly_;
  const int n = asmb.NumTotal();
  const int nb = asmb.NumBoundary();
  if (phi.size() != nb)
  {
    throw SolveError("robin solve: boundary data has wrong dimension");
  }

  // A_op + T' M_bnd diag(1/beta) (lambda - diag(d)) T, rhs -T' M_bnd diag(1/beta) phi
  std::vector<Eigen::Triplet<Cplx>> extra;
  for (int k = 0; k < asmb.M_bnd.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(asmb.M_bnd, k); it; ++it)
    {
      const int ib = static_cast<int>(it.row());
      const int jb = static_cast<int>(it.col());
      const Cplx w = it.value() / asmb.beta_diag[ib] * (lambda - Cplx(asmb.d_diag[jb]));
      extra.emplace_back(asmb.boundary.trace_map[ib], asmb.boundary.trace_map[jb], w);
    }
  }
  SparseComplex boundary_term(n, n);
  boundary_term.setFromTriplets(extra.begin(), extra.end());
  SparseComplex system = a_op_ + boundary_term;

  VectorC scaled(nb);
  for (int ib = 0; ib < nb; ib++)
  {
    scaled[ib] = phi[ib] / asmb.beta_diag[ib];
  }
  VectorC rhs_b = VectorC::Zero(nb);
  rhs_b.real() = -(asmb.M_bnd * scaled.real()).eval();
  rhs_b.imag() = -(asmb.M_bnd * scaled.imag()).eval();
  VectorC rhs = VectorC::Zero(n);
  for (int ib = 0; ib < nb; ib++)
  {
    rhs[asmb.boundary.trace_map[ib]] = rhs_b[ib];
  }

  Eigen::SparseLU<SparseComplex> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success)
  {
    throw SolveError("robin solve: system singular, lambda sits at (or numerically "
                     "near) a generalized eigenvalue");
  }

  RobinSolution sol;
  sol.lambda = lambda;
  sol.phi = phi;
  sol.u = lu.solve(rhs);
  sol.flux = ConormalMap(asmb, sol.u);
  VectorC trace(nb);
  for (int ib = 0; ib < nb; ib++)
  {
    trace[ib] = sol.u[asmb.boundary.trace_map[ib]];
  }
  sol.residual = (sol.flux - lambda * trace - phi).cwiseAbs().maxCoeff();
  sol.extended_regime = lambda.real() <= 0.0;

  // one-sided condition estimate: ||A||_1 times a power-iteration estimate of
  // ||A^{-1}||_1 through a few solves
  double norm_a = 0.0;
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < system.outerSize(); k++)
  {
    for (SparseComplex::InnerIterator it(system, k); it; ++it)
    {
      colsum[it.col()] += std::abs(it.value());
    }
  }
  norm_a = colsum.maxCoeff();
  VectorC z = VectorC::Constant(n, Cplx(1.0 / n, 0.0));
  double inv_est = 0.0;
  for (int iter = 0; iter < 3; iter++)
  {
    z = lu.solve(z);
    const double znorm = z.cwiseAbs().sum();
    inv_est = znorm;
    if (znorm == 0.0)
    {
      break;
    }
    z /= znorm;
  }
  sol.condition_estimate = norm_a * inv_est;
  return sol;
}

double EllipticSolver::RobinMaxPrincipleRatio(const RobinSolution &sol)
{
  const double phi_max = sol.phi.cwiseAbs().maxCoeff();
  if (phi_max == 0.0)
  {
    return 0.0;
  }
  return std::abs(sol.lambda.real()) * sol.u.cwiseAbs().maxCoeff() / phi_max;
}

CoercivityReport EllipticSolver::CoercivitySurrogate(double lambda) const
{
  const Assembly &asmb = *assembly_;
  const int n = asmb.NumTotal();
  // real lambda, real data: the Hermitian part is the symmetrized real system
  std::vector<Eigen::Triplet<double>> extra;
  for (int k = 0; k < asmb.M_bnd.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(asmb.M_bnd, k); it; ++it)
    {
      const int ib = static_cast<int>(it.row());
      const int jb = static_cast<int>(it.col());
      extra.emplace_back(asmb.boundary.trace_map[ib], asmb.boundary.trace_map[jb],
                         it.value() / asmb.beta_diag[ib] *
                             (lambda - asmb.d_diag[jb]));
    }
  }
  SparseReal boundary_term(n, n);
  boundary_term.setFromTriplets(extra.begin(), extra.end());
  SparseReal system = asmb.InteriorOperator() + boundary_term;
  SparseReal herm = 0.5 * (SparseReal(system.transpose()) + system);

  CoercivityReport rep;
  Eigen::SimplicialLDLT<SparseReal> ldlt;
  ldlt.compute(herm);
  if (ldlt.info() != Eigen::Success)
  {
    return rep;  // not positive definite
  }
  const auto D = ldlt.vectorD();
  if ((D.array() <= 0.0).any())
  {
    return rep;
  }
  rep.positive_definite = true;
  // inverse power iteration for the smallest eigenvalue
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt((double)n));
  double mu = 0.0;
  for (int iter = 0; iter < 12; iter++)
  {
    v = ldlt.solve(v);
    v /= v.norm();
    mu = v.dot(herm * v);
  }
  rep.min_eigenvalue_estimate = mu;
  return rep;
}

}  // namespace dtn
