// SPDX-License-Identifier: Apache-2.0

#include "dtn/dtn_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

namespace dtn
{

namespace
{

using Cplx = std::complex<double>;

Eigen::MatrixXd DenseFromSparse(const SparseReal &A)
{
  return Eigen::MatrixXd(A);
}

// Symmetric square root factors of the boundary mass: M = Q diag(e) Q^T gives
// M^{1/2} = Q diag(sqrt(e)) Q^T.
struct MassRoot
{
  Eigen::MatrixXd half;
  Eigen::MatrixXd inv_half;
};

MassRoot ComputeMassRoot(const SparseReal &mass)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(DenseFromSparse(mass));
  const Eigen::VectorXd e = es.eigenvalues();
  MassRoot root;
  root.half = es.eigenvectors() * e.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  root.inv_half = es.eigenvectors() * e.cwiseSqrt().cwiseInverse().asDiagonal() *
                  es.eigenvectors().transpose();
  return root;
}

double SupOperatorNorm(const Eigen::MatrixXcd &A)
{
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

double SupOperatorNorm(const Eigen::MatrixXd &A)
{
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

DtnOperator AssembleDtn(const EllipticSolver &solver)
{
  const Assembly &asmb = solver.GetAssembly();
  const int nb = asmb.NumBoundary();
  DtnOperator dtn;
  dtn.N.resize(nb, nb);
  dtn.M_bnd = asmb.M_bnd;
  dtn.beta = asmb.beta_diag;
  dtn.d = asmb.d_diag;
  dtn.mesh_hash = asmb.mesh_hash;
  dtn.coeff_hash = asmb.coeff_hash;

  VectorC e = VectorC::Zero(nb);
  for (int j = 0; j < nb; j++)
  {
    e[j] = 1.0;
    const DirichletSolution ext = solver.DirichletExtend(e);
    dtn.N.col(j) = ConormalMap(asmb, ext.u).real();
    e[j] = 0.0;
  }
  return dtn;
}

Eigen::MatrixXd AssembleDtnSchur(const Assembly &assembly)
{
  const int n = assembly.NumTotal();
  const int ni = assembly.NumInterior();
  const int nb = assembly.NumBoundary();
  const SparseReal a_op = assembly.InteriorOperator();

  std::vector<int> bnd_map(n, -1);
  for (int ib = 0; ib < nb; ib++)
  {
    bnd_map[assembly.boundary.trace_map[ib]] = ib;
  }

  std::vector<Eigen::Triplet<double>> t_ii;
  Eigen::MatrixXd A_ib = Eigen::MatrixXd::Zero(ni, nb);
  Eigen::MatrixXd A_bi = Eigen::MatrixXd::Zero(nb, ni);
  Eigen::MatrixXd A_bb = Eigen::MatrixXd::Zero(nb, nb);
  for (int k = 0; k < a_op.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(a_op, k); it; ++it)
    {
      const int ri = assembly.vertex_to_interior[it.row()];
      const int ci = assembly.vertex_to_interior[it.col()];
      if (ri >= 0 && ci >= 0)
      {
        t_ii.emplace_back(ri, ci, it.value());
      }
      else if (ri >= 0)
      {
        A_ib(ri, bnd_map[it.col()]) += it.value();
      }
      else if (ci >= 0)
      {
        A_bi(bnd_map[it.row()], ci) += it.value();
      }
      else
      {
        A_bb(bnd_map[it.row()], bnd_map[it.col()]) += it.value();
      }
    }
  }
  SparseReal A_ii(ni, ni);
  A_ii.setFromTriplets(t_ii.begin(), t_ii.end());

  Eigen::SparseLU<SparseReal> lu;
  lu.compute(A_ii);
  if (lu.info() != Eigen::Success)
  {
    throw SolveError("schur complement: interior block singular");
  }
  const Eigen::MatrixXd S = A_bb - A_bi * lu.solve(A_ib);

  // N = -diag(beta) M^{-1} S + diag(d)
  Eigen::MatrixXd N(nb, nb);
  for (int j = 0; j < nb; j++)
  {
    N.col(j) = -assembly.mbnd_solver->solve(S.col(j).eval());
  }
  N = assembly.beta_diag.asDiagonal() * N;
  N += Eigen::MatrixXd(assembly.d_diag.asDiagonal());
  return N;
}

Eigen::MatrixXcd DtnResolvent(const DtnOperator &dtn, Cplx lambda)
{
  const int nb = dtn.Size();
  Eigen::MatrixXcd shifted = -dtn.N.cast<Cplx>();
  shifted.diagonal().array() += lambda;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  if (!(lu.rcond() > 1e-13))
  {
    throw SolveError("resolvent: lambda is numerically on the spectrum of N");
  }
  return lu.solve(Eigen::MatrixXcd::Identity(nb, nb));
}

double VerifyResolventIdentity(const EllipticSolver &solver, const DtnOperator &dtn,
                               Cplx lambda, const VectorC &phi)
{
  const RobinSolution robin = solver.RobinSolve(lambda, phi);

  Eigen::MatrixXcd shifted = -dtn.N.cast<Cplx>();
  shifted.diagonal().array() += lambda;
  const VectorC psi = Eigen::PartialPivLU<Eigen::MatrixXcd>(shifted).solve(phi);
  const DirichletSolution ext = solver.DirichletExtend(psi);

  return (robin.u + ext.u).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd BoundarySqrtOperator(const Assembly &assembly)
{
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      DenseFromSparse(assembly.K_bnd), DenseFromSparse(assembly.M_bnd));
  if (ges.info() != Eigen::Success)
  {
    throw SolveError("boundary sqrt: generalized eigensolve failed (mass not SPD?)");
  }
  // snap the per-loop kernel modes to exactly zero; the square root would otherwise
  // amplify their O(eps) eigenvalues to O(sqrt(eps))
  Eigen::VectorXd mu = ges.eigenvalues().cwiseMax(0.0);
  const double snap = 1e-12 * mu.maxCoeff();
  mu = (mu.array() < snap).select(0.0, mu);
  const Eigen::MatrixXd &V = ges.eigenvectors();  // M_bnd-orthonormal
  return -V * mu.cwiseSqrt().asDiagonal() * V.transpose() * DenseFromSparse(assembly.M_bnd);
}

PerturbationReport ComparePerturbation(const DtnOperator &dtn, const Eigen::MatrixXd &W)
{
  if (W.rows() != dtn.N.rows())
  {
    throw SolveError("perturbation report: dimension mismatch between N and W");
  }
  const Eigen::MatrixXd P = dtn.N - W;
  PerturbationReport rep;
  rep.sup_norm = SupOperatorNorm(P);

  const MassRoot root = ComputeMassRoot(dtn.M_bnd);
  rep.l2_norm = (root.half * P * root.inv_half).jacobiSvd().singularValues()(0);

  // W eigenbasis, smooth modes first: -W is M-self-adjoint, so diagonalize the
  // mass-weighted symmetric form and pull the M-orthonormal eigenvectors back
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(root.half * (-W) * root.inv_half);
  const Eigen::VectorXd sqrt_mu = sym.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd V = root.inv_half * sym.eigenvectors();  // M-orthonormal columns

  const auto low_norm = [&](int m) {
    m = std::min<int>(m, V.cols());
    return (root.half * (P * V.leftCols(m))).jacobiSvd().singularValues()(0);
  };
  rep.low8_l2_norm = low_norm(8);
  rep.low16_l2_norm = low_norm(16);

  // relative bound curve over the eigenbasis: C(eps) = max_k (||P v_k||_M - eps sqrt(mu_k))
  const Eigen::MatrixXd PV = root.half * (P * V);
  Eigen::VectorXd pnorm(V.cols());
  for (int k = 0; k < V.cols(); k++)
  {
    pnorm[k] = PV.col(k).norm();
  }
  for (double eps : {0.1, 0.25, 0.5, 1.0, 2.0})
  {
    double c = 0.0;
    for (int k = 0; k < V.cols(); k++)
    {
      c = std::max(c, pnorm[k] - eps * sqrt_mu[k]);
    }
    rep.relative_bound_curve.push_back({eps, c});
  }
  return rep;
}

SpectrumReport ComputeSpectrum(const Eigen::MatrixXd &matrix)
{
  Eigen::EigenSolver<Eigen::MatrixXd> es(matrix, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
  {
    throw SolveError("spectrum: dense eigensolver failed to converge");
  }
  SpectrumReport rep;
  rep.eigenvalues = es.eigenvalues();
  std::vector<int> order(rep.eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (rep.eigenvalues[a].real() != rep.eigenvalues[b].real())
    {
      return rep.eigenvalues[a].real() > rep.eigenvalues[b].real();
    }
    return rep.eigenvalues[a].imag() > rep.eigenvalues[b].imag();
  });
  Eigen::VectorXcd sorted(rep.eigenvalues.size());
  for (Eigen::Index i = 0; i < sorted.size(); i++)
  {
    sorted[i] = rep.eigenvalues[order[i]];
  }
  rep.eigenvalues = sorted;
  rep.spectral_radius = rep.eigenvalues.cwiseAbs().maxCoeff();
  rep.max_imag_ratio = rep.spectral_radius > 0.0
                           ? rep.eigenvalues.imag().cwiseAbs().maxCoeff() / rep.spectral_radius
                           : 0.0;
  const auto sv = es.eigenvectors().jacobiSvd().singularValues();
  rep.eigenvector_condition =
      sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                              : std::numeric_limits<double>::infinity();
  return rep;
}

SectorReport SectorProbe(const Eigen::MatrixXd &gen, const SparseReal &mass,
                         const std::vector<double> &angles_deg, const SectorOptions &options)
{
  const int nb = static_cast<int>(gen.rows());
  const SpectrumReport spec = ComputeSpectrum(gen);
  const double rho = std::max(spec.spectral_radius, 1e-12);
  const MassRoot root = ComputeMassRoot(mass);

  SectorReport rep;
  rep.angles_deg = angles_deg;
  rep.per_angle_sup.assign(angles_deg.size(), 0.0);
  rep.per_angle_l2.assign(angles_deg.size(), 0.0);

  const double lr0 = std::log10(options.radius_min_factor * rho);
  const double lr1 = std::log10(options.radius_max_factor * rho);
  for (std::size_t ai = 0; ai < angles_deg.size(); ai++)
  {
    const double th = angles_deg[ai] * M_PI / 180.0;
    for (int ri = 0; ri < options.num_radii; ri++)
    {
      const double r =
          std::pow(10.0, lr0 + (lr1 - lr0) * ri / std::max(1, options.num_radii - 1));
      const Cplx lambda = r * Cplx(std::cos(th), std::sin(th));
      double dist = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < spec.eigenvalues.size(); k++)
      {
        dist = std::min(dist, std::abs(lambda - spec.eigenvalues[k]));
      }
      if (dist < options.exclusion * rho)
      {
        rep.excluded++;
        continue;
      }
      Eigen::MatrixXcd shifted = -gen.cast<Cplx>();
      shifted.diagonal().array() += lambda;
      const Eigen::MatrixXcd R =
          Eigen::PartialPivLU<Eigen::MatrixXcd>(shifted).solve(
              Eigen::MatrixXcd::Identity(nb, nb));
      SectorSample sample;
      sample.theta_deg = angles_deg[ai];
      sample.radius = r;
      sample.bound_sup = r * SupOperatorNorm(R);
      sample.bound_l2 =
          r * (root.half * R * root.inv_half).jacobiSvd().singularValues()(0);
      rep.per_angle_sup[ai] = std::max(rep.per_angle_sup[ai], sample.bound_sup);
      rep.per_angle_l2[ai] = std::max(rep.per_angle_l2[ai], sample.bound_l2);
      rep.samples.push_back(sample);
    }
  }
  return rep;
}

Eigen::MatrixXd SemigroupApply(const Eigen::MatrixXd &gen, const SparseReal &mass, double t)
{
  const int n = static_cast<int>(gen.rows());
  if (t == 0.0)
  {
    return Eigen::MatrixXd::Identity(n, n);
  }
  const Eigen::MatrixXd MN = DenseFromSparse(mass) * gen;
  const double asym = (MN - MN.transpose()).cwiseAbs().maxCoeff();
  if (asym <= 1e-12 * std::max(1.0, MN.cwiseAbs().maxCoeff()))
  {
    // mass-self-adjoint: exact eigendecomposition through the symmetric pencil
    const MassRoot root = ComputeMassRoot(mass);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym(root.half * gen * root.inv_half);
    return root.inv_half * sym.eigenvectors() *
           (t * sym.eigenvalues().array()).exp().matrix().asDiagonal() *
           sym.eigenvectors().transpose() * root.half;
  }
  const SpectrumReport spec = ComputeSpectrum(gen);
  if (spec.eigenvector_condition < 1e6)
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(gen);
    const Eigen::MatrixXcd V = es.eigenvectors();
    const Eigen::VectorXcd expt = (t * es.eigenvalues().array()).exp();
    return (V * expt.asDiagonal() * V.inverse()).real();
  }
  // defective or ill-conditioned eigenbasis: scaling-and-squaring Pade
  return (t * gen).exp();
}

}  // namespace dtn
