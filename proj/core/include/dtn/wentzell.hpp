// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_WENTZELL_HPP
#define DTN_WENTZELL_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "dtn/dtn_map.hpp"
#include "dtn/elliptic.hpp"

namespace dtn
{

//
// Generator of the coupled interior/boundary dynamics with Wentzell boundary
// conditions, on the full dof set ordered [interior; boundary]:
//   interior rows:  du/dt = M_II^{-1} ( -(A_op u) )          (the action of A_m)
//   boundary rows:  du/dt = diag(beta) M_bnd^{-1}( -(A_op u)|bnd ) + diag(d) u|bnd
// i.e. G = -P^{-1} K_eff with P = blockdiag(M_II, M_bnd diag(1/beta)) and
// K_eff = A_op - T' M_bnd diag(1/beta) diag(d) T. The boundary rows ARE the boundary
// dynamics; applied to discrete harmonic vectors they reproduce the DtN matrix.
// For flat symmetric data (b = 0, constant beta and d) the pencil (K_eff, P) is
// symmetric, so the spectrum is real and the exponential has an exact
// eigendecomposition route.
//
struct WentzellGenerator
{
  Eigen::MatrixXd G;           // dense, [interior; boundary] ordering
  std::vector<int> dof_to_vertex;  // generator dof -> mesh vertex
  std::vector<int> vertex_to_dof;
  int n_interior = 0;
  int n_boundary = 0;
  bool symmetric_structure = false;
  SparseReal P;      // block mass pairing
  SparseReal K_eff;  // sign: G = -P^{-1} K_eff

  int Size() const { return n_interior + n_boundary; }
};

WentzellGenerator AssembleWentzell(const Assembly &assembly);

// Honest dense nonsymmetric eigensolve of G (realness is measured, not assumed).
SpectrumReport WentzellSpectrum(const WentzellGenerator &gen);

// Eigendecomposition of G for evolution: the symmetric pencil route when available,
// otherwise the dense nonsymmetric one. kappa holds eigenvalues of -G (so the flow is
// V exp(-t kappa) V_inv u0).
struct WentzellEigen
{
  Eigen::VectorXcd kappa;
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd V_inv;
  bool symmetric_route = false;
};

WentzellEigen ComputeWentzellEigen(const WentzellGenerator &gen);

struct Trajectory
{
  std::vector<double> times;
  Eigen::MatrixXcd states;  // one column per time, generator dof ordering
  bool sup_norm_nonincreasing = true;
};

// u(t) = e^{tG} u0 at the requested times (nonnegative, ascending). The sup-norm
// contraction flag tracks ||u(t)||_sup against a 1e-8 relative slack.
Trajectory Evolve(const WentzellGenerator &gen, const VectorC &u0,
                  const std::vector<double> &times);
Trajectory Evolve(const WentzellGenerator &gen, const WentzellEigen &eig, const VectorC &u0,
                  const std::vector<double> &times);

// max over the time grid of t * ||G e^{tG}||_sup, the analyticity surrogate.
double AnalyticitySurrogate(const WentzellGenerator &gen, const WentzellEigen &eig,
                            const std::vector<double> &times);

struct EllipticWentzellSolution
{
  VectorC u;  // generator dof ordering
  double residual = 0.0;
  double max_principle_ratio = 0.0;  // |lambda| ||u||_sup / ||h||_sup
};

// Solves (G - lambda) u = -h.
EllipticWentzellSolution SolveEllipticWentzell(const WentzellGenerator &gen,
                                               std::complex<double> lambda, const VectorC &h);

// Max relative error of the boundary rows of G on the discrete harmonic extensions
// of the given boundary data vectors against N phi (the decoupling consistency).
double WentzellDtnConsistency(const WentzellGenerator &gen, const EllipticSolver &solver,
                              const DtnOperator &dtn, const std::vector<VectorC> &probes);

}  // namespace dtn

#endif  // DTN_WENTZELL_HPP
