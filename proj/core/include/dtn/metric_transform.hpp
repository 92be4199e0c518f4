// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_METRIC_TRANSFORM_HPP
#define DTN_METRIC_TRANSFORM_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dtn/field_expr.hpp"
#include "dtn/mesh.hpp"

namespace dtn
{

class EllipticityError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//
// The transformed metric of the coefficient reduction: the (2,0) tensor
// g_tilde^{kl} = a^k_i g^{il} per vertex, its inverse g_tilde (a Riemannian metric
// whenever a.g^{-1} is positive), and the determinant data certifying
// det g = det a * det g_tilde.
//
struct TransformedMetric
{
  std::vector<Eigen::Matrix2d> g_tilde_inv;
  std::vector<Eigen::Matrix2d> g_tilde;
  std::vector<double> det_g;
  std::vector<double> det_a;
  std::vector<double> det_g_tilde;

  // Max over vertices of |det_g - det_a*det_g_tilde| / |det_g|.
  double DeterminantIdentityResidual() const;
};

// Builds g_tilde per vertex by closed-form 2x2 algebra. Throws EllipticityError
// naming the vertex if a is not symmetric, a.g^{-1} is not symmetric (a not
// g-self-adjoint in this chart), or the result is not positive definite.
TransformedMetric BuildTransformedMetric(const Mesh &mesh, const CoefficientSet &coeffs);

struct EllipticityReport
{
  double min_eigenvalue = 0.0;  // over vertices and triangle barycenters
  int argmin_vertex = -1;       // vertex index, or -1 if the minimum sits at a barycenter
  int argmin_triangle = -1;     // barycenter's triangle, or -1
  bool positive = false;
};

// Minimum eigenvalue of a.g^{-1} sampled at vertices and triangle barycenters.
// A negative result is a report, not an error.
EllipticityReport ComputeEllipticityReport(const Mesh &mesh, const CoefficientSet &coeffs);

}  // namespace dtn

#endif  // DTN_METRIC_TRANSFORM_HPP
