// SPDX-License-Identifier: Apache-2.0

#include "dtn/metric_transform.hpp"

#include <cmath>
#include <string>

namespace dtn
{

namespace
{

Eigen::Matrix2d Adjugate(const Eigen::Matrix2d &m)
{
  Eigen::Matrix2d adj;
  adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return adj;
}

// Eigenvalues of a.g^{-1} are those of the symmetric g^{-1/2} a g^{-1/2}; both are
// the roots of the same characteristic polynomial, real whenever a is symmetric and
// g is SPD.
double MinProductEigenvalue(const Eigen::Matrix2d &a, const Eigen::Matrix2d &g)
{
  const Eigen::Matrix2d p = a * Adjugate(g) / g.determinant();
  const double tr = p.trace();
  const double det = p.determinant();
  const double disc = std::max(0.0, 0.25 * tr * tr - det);
  return 0.5 * tr - std::sqrt(disc);
}

}  // namespace

double TransformedMetric::DeterminantIdentityResidual() const
{
  double worst = 0.0;
  for (std::size_t v = 0; v < det_g.size(); v++)
  {
    worst = std::max(worst, std::abs(det_g[v] - det_a[v] * det_g_tilde[v]) / std::abs(det_g[v]));
  }
  return worst;
}

TransformedMetric BuildTransformedMetric(const Mesh &mesh, const CoefficientSet &coeffs)
{
  const int nv = mesh.NumVertices();
  TransformedMetric tm;
  tm.g_tilde_inv.resize(nv);
  tm.g_tilde.resize(nv);
  tm.det_g.resize(nv);
  tm.det_a.resize(nv);
  tm.det_g_tilde.resize(nv);

  for (int v = 0; v < nv; v++)
  {
    const Eigen::Vector2d &p = mesh.vertices[v];
    const Eigen::Matrix2d a = coeffs.EvalA(p.x(), p.y());
    const double ascale = 1.0 + a.cwiseAbs().maxCoeff();
    if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * ascale)
    {
      throw EllipticityError("coefficient a is not symmetric at vertex " + std::to_string(v));
    }
    const Eigen::Matrix2d &g = mesh.metric[v];
    const double det_g = g.determinant();
    const Eigen::Matrix2d g_inv = Adjugate(g) / det_g;
    const Eigen::Matrix2d gti = a * g_inv;  // g_tilde^{kl}
    if (std::abs(gti(0, 1) - gti(1, 0)) > 1e-12 * (1.0 + gti.cwiseAbs().maxCoeff()))
    {
      throw EllipticityError("a.g^{-1} is not symmetric at vertex " + std::to_string(v) +
                             " (a is not g-self-adjoint in this chart)");
    }
    // tr > 0 and det > 0 certify both eigenvalues positive for a symmetric 2x2
    if (!(gti.trace() > 0.0 && gti.determinant() > 0.0))
    {
      const double ev = MinProductEigenvalue(a, g);
      throw EllipticityError("strict ellipticity violated at vertex " + std::to_string(v) +
                             " (min eigenvalue of a.g^{-1} = " + std::to_string(ev) + ")");
    }
    tm.g_tilde_inv[v] = gti;
    tm.g_tilde[v] = Adjugate(gti) / gti.determinant();
    tm.det_g[v] = det_g;
    tm.det_a[v] = a.determinant();
    tm.det_g_tilde[v] = tm.g_tilde[v].determinant();
  }
  return tm;
}

EllipticityReport ComputeEllipticityReport(const Mesh &mesh, const CoefficientSet &coeffs)
{
  EllipticityReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.NumVertices(); v++)
  {
    const Eigen::Vector2d &p = mesh.vertices[v];
    const double ev = MinProductEigenvalue(coeffs.EvalA(p.x(), p.y()), mesh.metric[v]);
    if (ev < rep.min_eigenvalue)
    {
      rep.min_eigenvalue = ev;
      rep.argmin_vertex = v;
      rep.argmin_triangle = -1;
    }
  }
  for (int t = 0; t < mesh.NumTriangles(); t++)
  {
    const auto &tri = mesh.triangles[t];
    const Eigen::Vector2d p =
        (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    const double ev =
        MinProductEigenvalue(coeffs.EvalA(p.x(), p.y()), mesh.MetricAtBarycenter(t));
    if (ev < rep.min_eigenvalue)
    {
      rep.min_eigenvalue = ev;
      rep.argmin_vertex = -1;
      rep.argmin_triangle = t;
    }
  }
  rep.positive = rep.min_eigenvalue > 0.0;
  return rep;
}

}  // namespace dtn
