// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_DTN_MAP_HPP
#define DTN_DTN_MAP_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dtn/elliptic.hpp"

namespace dtn
{

//
// Dense Dirichlet-to-Neumann matrix N = B L0: column j is the conormal feedback of
// the discrete harmonic extension of the j-th boundary nodal basis vector, with beta
// and d applied. Equivalently N = -diag(beta) M_bnd^{-1} S + diag(d) for the Schur
// complement S of the interior block; both constructions are implemented and agree
// to roundoff.
//
struct DtnOperator
{
  Eigen::MatrixXd N;
  SparseReal M_bnd;
  Eigen::VectorXd beta;
  Eigen::VectorXd d;
  std::uint64_t mesh_hash = 0;
  std::uint64_t coeff_hash = 0;

  int Size() const { return static_cast<int>(N.rows()); }
};

// Columnwise construction through the shared interior factorization.
DtnOperator AssembleDtn(const EllipticSolver &solver);

// Independent Schur-complement route (its own real factorization); cross-validates
// the columnwise build.
Eigen::MatrixXd AssembleDtnSchur(const Assembly &assembly);

// (lambda I - N)^{-1}; throws SolveError when lambda sits on the spectrum.
Eigen::MatrixXcd DtnResolvent(const DtnOperator &dtn, std::complex<double> lambda);

// Sup residual of the resolvent identity R_lambda = -L0 R(lambda, N): solves the
// Robin problem and compares with the Dirichlet extension of -R(lambda,N) phi.
double VerifyResolventIdentity(const EllipticSolver &solver, const DtnOperator &dtn,
                               std::complex<double> lambda, const VectorC &phi);

// W = -sqrt(-Lap_boundary): generalized symmetric eigensolve K_bnd V = M_bnd V mu,
// V M_bnd-orthonormal, W = -V sqrt(mu) V^T M_bnd. Annihilates constants per loop.
Eigen::MatrixXd BoundarySqrtOperator(const Assembly &assembly);

//
// Norms of the comparison perturbation P = N - W. The full operator norms are
// dominated by grid-scale modes (the two discretizations differ at order 1/h there);
// the low-mode norms restrict P to the span of the smoothest W eigenvectors, where
// the continuum order-0 behavior is visible.
//
struct PerturbationReport
{
  double sup_norm = 0.0;
  double l2_norm = 0.0;         // M_bnd-weighted operator norm
  double low8_l2_norm = 0.0;    // restricted to the first 8 W-modes
  double low16_l2_norm = 0.0;
  struct RelativeBound
  {
    double eps;
    double c;  // min C with ||P phi|| <= eps ||W phi|| + C ||phi|| over the eigenbasis
  };
  std::vector<RelativeBound> relative_bound_curve;
};

PerturbationReport ComparePerturbation(const DtnOperator &dtn, const Eigen::MatrixXd &W);

struct SpectrumReport
{
  Eigen::VectorXcd eigenvalues;   // sorted by real part, descending
  double max_imag_ratio = 0.0;    // max |Im| / spectral radius
  double eigenvector_condition = 0.0;
  double spectral_radius = 0.0;
};

// Dense nonsymmetric eigensolve with realness diagnostics.
SpectrumReport ComputeSpectrum(const Eigen::MatrixXd &matrix);

enum class OperatorNorm
{
  Sup,        // max absolute row sum (nodal sup norm)
  BoundaryL2  // M_bnd-weighted spectral norm
};

struct SectorSample
{
  double theta_deg;
  double radius;
  double bound_sup;  // |lambda| ||R(lambda,N)||_sup
  double bound_l2;   // |lambda| ||R(lambda,N)||_L2(M_bnd)
};

struct SectorReport
{
  std::vector<SectorSample> samples;
  std::vector<double> angles_deg;
  std::vector<double> per_angle_sup;  // supremum of bound_sup per angle
  std::vector<double> per_angle_l2;
  int excluded = 0;  // probes skipped by the near-spectrum exclusion
};

struct SectorOptions
{
  int num_radii = 24;
  double radius_min_factor = 1e-2;  // times the spectral radius
  double radius_max_factor = 1e2;
  double exclusion = 1e-8;          // relative to the spectral radius
};

// Probes |lambda| ||R(lambda, gen)|| along rays arg lambda = theta; both norms are
// recorded for every sample. mass supplies the L2(boundary) weight.
SectorReport SectorProbe(const Eigen::MatrixXd &gen, const SparseReal &mass,
                         const std::vector<double> &angles_deg,
                         const SectorOptions &options = {});

// e^{t gen}. Exact identity at t = 0. Uses the mass-symmetric eigendecomposition
// when gen is self-adjoint in the mass inner product, a dense eigendecomposition
// when the eigenvector condition stays below 1e6, and scaling-and-squaring Pade
// otherwise.
Eigen::MatrixXd SemigroupApply(const Eigen::MatrixXd &gen, const SparseReal &mass, double t);

}  // namespace dtn

#endif  // DTN_DTN_MAP_HPP
