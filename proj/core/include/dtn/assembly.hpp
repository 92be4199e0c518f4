// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_ASSEMBLY_HPP
#define DTN_ASSEMBLY_HPP

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "dtn/field_expr.hpp"
#include "dtn/mesh.hpp"
#include "dtn/metric_transform.hpp"

namespace dtn
{

using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<std::complex<double>>;
using VectorC = Eigen::VectorXcd;

class AssemblyError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//
// All discrete operators for one (mesh, coefficients) pair, built with P1 elements
// and one-point (barycenter) quadrature for metric-dependent integrands; products of
// linears are integrated exactly once the metric is frozen per element. The principal
// part is assembled as the Laplace-Beltrami stiffness of the transformed metric
// g_tilde; the metric g is interpolated linearly to barycenters while coefficient
// fields are evaluated there directly.
//
// Sign table (used consistently by every solver and by the boundary operators):
//   K  [v,u] = Int g_tilde(grad u, grad v) dvol_gt        (SPD, constants in kernel)
//   K1 [v,u] = Int <b, grad_g u> v dvol_gt                (nonsymmetric)
//   K0 [v,u] = Int c u v dvol_gt                          (= M_vol when c = 1)
//   interior operator  A_op = K - K1 - K0                 (weak form of -A_m; the
//     divergence-form operator is A_m = Lap_gt + <b,grad> + c, so A_m u = 0 reads
//     A_op u = boundary flux)
//   conormal flux      M_bnd t = -(A_op u - f)|boundary   (t = -d/dnu u, inward flux)
//   feedback           Bu = diag(beta) t + diag(d) (trace u)
//   Robin system       [A_op + T' M_bnd diag(1/beta) (lambda - diag(d)) T] u
//                        = -T' M_bnd diag(1/beta) phi
// Boundary matrices (M_bnd consistent mass, K_bnd periodic 1D stiffness) use the
// induced metric of g_tilde on boundary edges.
//
struct Assembly
{
  // degree-of-freedom layout
  BoundaryMesh boundary;               // boundary dof -> mesh vertex, loop ordered
  std::vector<int> interior_dofs;      // mesh vertices not on the boundary, ascending
  std::vector<int> vertex_to_interior; // -1 for boundary vertices

  SparseReal K, K1, K0, M_vol;  // full size (num vertices)
  SparseReal M_bnd, K_bnd;      // boundary size
  Eigen::VectorXd beta_diag;    // beta at boundary dofs (diagonal of Beta_bnd)
  Eigen::VectorXd d_diag;       // d at boundary dofs (diagonal of D_bnd)

  TransformedMetric tmetric;
  std::uint64_t mesh_hash = 0;
  std::uint64_t coeff_hash = 0;
  bool flat_principal = false;  // a = id, b = 0, c = 0
  bool constant_beta = false;
  bool constant_d = false;

  int NumTotal() const { return static_cast<int>(vertex_to_interior.size()); }
  int NumInterior() const { return static_cast<int>(interior_dofs.size()); }
  int NumBoundary() const { return boundary.NumBoundary(); }

  // K - K1 - K0, the discrete interior operator.
  SparseReal InteriorOperator() const;

  // Solve M_bnd x = r (real SPD factorization, applied to complex data per part).
  VectorC SolveBoundaryMass(const VectorC &r) const;

  std::shared_ptr<const Eigen::SimplicialLDLT<SparseReal>> mbnd_solver;
};

// Assembles everything. Requires a strictly elliptic coefficient set (the ellipticity
// report must be positive); throws AssemblyError/EllipticityError otherwise, and on
// degenerate elements (metric area below 1e-14).
Assembly Assemble(const Mesh &mesh, const CoefficientSet &coeffs);

// Second, independent assembly route for the principal part: the divergence-form
// integrand with a-weights, Int (grad v)^T a g^{-1} (grad u) sqrt(det g / det a) dx,
// under the identical barycenter quadrature. Equals Assembly::K up to roundoff; kept
// as the cross-check of the metric reduction.
SparseReal AssembleDivergenceFormDirect(const Mesh &mesh, const CoefficientSet &coeffs);

// Variational conormal feedback of a discrete solution: with t defined by
// M_bnd t = -(A_op u - rhs) restricted to boundary test functions, returns
// diag(beta) t + diag(d) trace(u). Positive values are inward flux (B = -d/dnu).
// rhs may be empty (zero source).
VectorC ConormalMap(const Assembly &assembly, const VectorC &u,
                    const VectorC &rhs = VectorC());

// Max over (i,j) of |A-B| divided by max |A|; the element-equality metric used by the
// metric-reduction cross-check.
double RelativeMatrixDistance(const SparseReal &A, const SparseReal &B);

}  // namespace dtn

#endif  // DTN_ASSEMBLY_HPP
