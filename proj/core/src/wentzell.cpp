// SPDX-License-Identifier: Apache-2.0

#include "dtn/wentzell.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace dtn
{

namespace
{

using Cplx = std::complex<double>;

}  // namespace

WentzellGenerator AssembleWentzell(const Assembly &assembly)
{
  const int n = assembly.NumTotal();
  const int ni = assembly.NumInterior();
  const int nb = assembly.NumBoundary();

  WentzellGenerator gen;
  gen.n_interior = ni;
  gen.n_boundary = nb;
  gen.dof_to_vertex.resize(n);
  gen.vertex_to_dof.assign(n, -1);
  for (int i = 0; i < ni; i++)
  {
    gen.dof_to_vertex[i] = assembly.interior_dofs[i];
    gen.vertex_to_dof[assembly.interior_dofs[i]] = i;
  }
  for (int ib = 0; ib < nb; ib++)
  {
    gen.dof_to_vertex[ni + ib] = assembly.boundary.trace_map[ib];
    gen.vertex_to_dof[assembly.boundary.trace_map[ib]] = ni + ib;
  }

  // K_eff = A_op - T' M_bnd diag(1/beta) diag(d) T, permuted to [interior; boundary]
  const SparseReal a_op = assembly.InteriorOperator();
  std::vector<Eigen::Triplet<double>> tk, tp;
  tk.reserve(a_op.nonZeros() + assembly.M_bnd.nonZeros());
  for (int k = 0; k < a_op.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(a_op, k); it; ++it)
    {
      tk.emplace_back(gen.vertex_to_dof[it.row()], gen.vertex_to_dof[it.col()], it.value());
    }
  }
  for (int k = 0; k < assembly.M_bnd.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(assembly.M_bnd, k); it; ++it)
    {
      const int ib = static_cast<int>(it.row());
      const int jb = static_cast<int>(it.col());
      tk.emplace_back(ni + ib, ni + jb,
                      -it.value() / assembly.beta_diag[ib] * assembly.d_diag[jb]);
      tp.emplace_back(ni + ib, ni + jb, it.value() / assembly.beta_diag[ib]);
    }
  }
  gen.K_eff.resize(n, n);
  gen.K_eff.setFromTriplets(tk.begin(), tk.end());

  // P = blockdiag(M_II, M_bnd diag(1/beta))
  for (int k = 0; k < assembly.M_vol.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(assembly.M_vol, k); it; ++it)
    {
      const int ri = assembly.vertex_to_interior[it.row()];
      const int ci = assembly.vertex_to_interior[it.col()];
      if (ri >= 0 && ci >= 0)
      {
        tp.emplace_back(ri, ci, it.value());
      }
    }
  }
  gen.P.resize(n, n);
  gen.P.setFromTriplets(tp.begin(), tp.end());

  // interior mass factorization, applied blockwise to densify G = -P^{-1} K_eff
  SparseReal M_ii(ni, ni);
  {
    std::vector<Eigen::Triplet<double>> tm;
    for (int k = 0; k < assembly.M_vol.outerSize(); k++)
    {
      for (SparseReal::InnerIterator it(assembly.M_vol, k); it; ++it)
      {
        const int ri = assembly.vertex_to_interior[it.row()];
        const int ci = assembly.vertex_to_interior[it.col()];
        if (ri >= 0 && ci >= 0)
        {
          tm.emplace_back(ri, ci, it.value());
        }
      }
    }
    M_ii.setFromTriplets(tm.begin(), tm.end());
  }
  Eigen::SimplicialLDLT<SparseReal> mass_lu(M_ii);
  if (mass_lu.info() != Eigen::Success)
  {
    throw SolveError("wentzell: interior mass block is not positive definite");
  }

  const Eigen::MatrixXd K_dense(gen.K_eff);
  gen.G.resize(n, n);
  gen.G.topRows(ni) = -mass_lu.solve(K_dense.topRows(ni).eval());
  Eigen::MatrixXd bnd_rows(nb, n);
  for (int j = 0; j < n; j++)
  {
    bnd_rows.col(j) = assembly.mbnd_solver->solve(K_dense.block(ni, j, nb, 1).eval());
  }
  gen.G.bottomRows(nb) = -(assembly.beta_diag.asDiagonal() * bnd_rows);

  gen.symmetric_structure =
      assembly.flat_principal || (assembly.constant_beta && assembly.constant_d &&
                                  assembly.K1.nonZeros() == 0);
  return gen;
}

SpectrumReport WentzellSpectrum(const WentzellGenerator &gen)
{
  return ComputeSpectrum(gen.G);
}

WentzellEigen ComputeWentzellEigen(const WentzellGenerator &gen)
{
  WentzellEigen eig;
  if (gen.symmetric_structure)
  {
    // K_eff v = kappa P v with V^T P V = I, so G V = -V kappa and V^{-1} = V^T P
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        Eigen::MatrixXd(gen.K_eff), Eigen::MatrixXd(gen.P));
    if (ges.info() != Eigen::Success)
    {
      throw SolveError("wentzell eigendecomposition failed");
    }
    eig.kappa = ges.eigenvalues().cast<Cplx>();
    eig.V = ges.eigenvectors().cast<Cplx>();
    eig.V_inv = (ges.eigenvectors().transpose() * Eigen::MatrixXd(gen.P)).cast<Cplx>();
    eig.symmetric_route = true;
    return eig;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(gen.G);
  if (es.info() != Eigen::Success)
  {
    throw SolveError("wentzell eigendecomposition failed");
  }
  eig.kappa = -es.eigenvalues();
  eig.V = es.eigenvectors();
  eig.V_inv = es.eigenvectors().inverse();
  eig.symmetric_route = false;
  return eig;
}

Trajectory Evolve(const WentzellGenerator &gen, const VectorC &u0,
                  const std::vector<double> &times)
{
  return Evolve(gen, ComputeWentzellEigen(gen), u0, times);
}

Trajectory Evolve(const WentzellGenerator &gen, const WentzellEigen &eig, const VectorC &u0,
                  const std::vector<double> &times)
{
  if (u0.size() != gen.Size())
  {
    throw SolveError("evolve: initial state has wrong dimension");
  }
  for (std::size_t k = 0; k < times.size(); k++)
  {
    if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1]))
    {
      throw SolveError("evolve: times must be nonnegative and ascending");
    }
  }
  Trajectory traj;
  traj.times = times;
  traj.states.resize(gen.Size(), static_cast<Eigen::Index>(times.size()));
  const VectorC coeff = eig.V_inv * u0;
  double prev_sup = std::numeric_limits<double>::infinity();
  const double u0_sup = u0.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < times.size(); k++)
  {
    const VectorC scaled =
        (-times[k] * eig.kappa.array()).exp().matrix().asDiagonal() * coeff;
    traj.states.col(k) = eig.V * scaled;
    const double sup = traj.states.col(k).cwiseAbs().maxCoeff();
    if (sup > prev_sup + 1e-8 * u0_sup)
    {
      traj.sup_norm_nonincreasing = false;
    }
    prev_sup = sup;
  }
  return traj;
}

double AnalyticitySurrogate(const WentzellGenerator &gen, const WentzellEigen &eig,
                            const std::vector<double> &times)
{
  double worst = 0.0;
  if (eig.symmetric_route)
  {
    const Eigen::VectorXd kappa = eig.kappa.real();
    const Eigen::MatrixXd V = eig.V.real();
    const Eigen::MatrixXd V_inv = eig.V_inv.real();
    for (double t : times)
    {
      const Eigen::VectorXd f = (-kappa.array() * (-t * kappa.array()).exp()).matrix();
      const Eigen::MatrixXd GE = V * f.asDiagonal() * V_inv;
      worst = std::max(worst, t * GE.cwiseAbs().rowwise().sum().maxCoeff());
    }
    return worst;
  }
  for (double t : times)
  {
    const Eigen::MatrixXcd GE =
        eig.V * (-eig.kappa.array() * (-t * eig.kappa.array()).exp()).matrix().asDiagonal() *
        eig.V_inv;
    worst = std::max(worst, t * GE.cwiseAbs().rowwise().sum().maxCoeff());
  }
  return worst;
}

EllipticWentzellSolution SolveEllipticWentzell(const WentzellGenerator &gen, Cplx lambda,
                                               const VectorC &h)
{
  if (h.size() != gen.Size())
  {
    throw SolveError("elliptic wentzell: right-hand side has wrong dimension");
  }
  // (G - lambda) u = h, the discrete form of A_m f - lambda f = h with the Wentzell
  // coupling carried by the boundary rows of G
  Eigen::MatrixXcd A = gen.G.cast<Cplx>();
  A.diagonal().array() -= lambda;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  if (!(lu.rcond() > 1e-13))
  {
    throw SolveError("elliptic wentzell: lambda is numerically on the spectrum of G");
  }
  EllipticWentzellSolution sol;
  sol.u = lu.solve(h);
  sol.residual = (A * sol.u - h).cwiseAbs().maxCoeff();
  const double h_sup = h.cwiseAbs().maxCoeff();
  sol.max_principle_ratio =
      h_sup > 0.0 ? std::abs(lambda) * sol.u.cwiseAbs().maxCoeff() / h_sup : 0.0;
  return sol;
}

double WentzellDtnConsistency(const WentzellGenerator &gen, const EllipticSolver &solver,
                              const DtnOperator &dtn, const std::vector<VectorC> &probes)
{
  const Assembly &asmb = solver.GetAssembly();
  double worst = 0.0;
  for (const VectorC &phi : probes)
  {
    const DirichletSolution ext = solver.DirichletExtend(phi);
    VectorC u_perm(gen.Size());
    for (int k = 0; k < gen.Size(); k++)
    {
      u_perm[k] = ext.u[gen.dof_to_vertex[k]];
    }
    const VectorC bnd_rows =
        gen.G.bottomRows(gen.n_boundary).cast<Cplx>() * u_perm;
    const VectorC n_phi = dtn.N.cast<Cplx>() * phi;
    const double scale =
        std::max(n_phi.cwiseAbs().maxCoeff(), phi.cwiseAbs().maxCoeff());
    worst = std::max(worst, (bnd_rows - n_phi).cwiseAbs().maxCoeff() / scale);
    (void)asmb;
  }
  return worst;
}

}  // namespace dtn
