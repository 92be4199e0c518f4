// SPDX-License-Identifier: Apache-2.0

#include "dtn/assembly.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dtn
{

namespace
{

struct ElementGeometry
{
  double chart_area;
  Eigen::Matrix<double, 3, 2> grads;  // P1 basis gradients in chart coordinates
  Eigen::Vector2d barycenter;
};

ElementGeometry ElementGeom(const Mesh &mesh, int tri)
{
  const auto &t = mesh.triangles[tri];
  const Eigen::Vector2d &p0 = mesh.vertices[t[0]];
  const Eigen::Vector2d e1 = mesh.vertices[t[1]] - p0;
  const Eigen::Vector2d e2 = mesh.vertices[t[2]] - p0;
  ElementGeometry g;
  g.chart_area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  Eigen::Matrix2d J;
  J.col(0) = e1;
  J.col(1) = e2;
  const Eigen::Matrix2d Jinv = J.inverse();
  g.grads.row(1) = Jinv.row(0);
  g.grads.row(2) = Jinv.row(1);
  g.grads.row(0) = -g.grads.row(1) - g.grads.row(2);
  g.barycenter = p0 + (e1 + e2) / 3.0;
  return g;
}

Eigen::Matrix2d Adjugate(const Eigen::Matrix2d &m)
{
  Eigen::Matrix2d adj;
  adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return adj;
}

}  // namespace

SparseReal Assembly::InteriorOperator() const
{
  return K - K1 - K0;
}

VectorC Assembly::SolveBoundaryMass(const VectorC &r) const
{
  VectorC out(r.size());
  out.real() = mbnd_solver->solve(r.real().eval());
  out.imag() = mbnd_solver->solve(r.imag().eval());
  return out;
}

Assembly Assemble(const Mesh &mesh, const CoefficientSet &coeffs)
{
  const EllipticityReport ell = ComputeEllipticityReport(mesh, coeffs);
  if (!ell.positive)
  {
    throw EllipticityError(
        "assembly requires strict ellipticity; min eigenvalue of a.g^{-1} = " +
        std::to_string(ell.min_eigenvalue) +
        (ell.argmin_vertex >= 0 ? " at vertex " + std::to_string(ell.argmin_vertex)
                                : " at triangle " + std::to_string(ell.argmin_triangle)));
  }

  Assembly asm_;
  asm_.tmetric = BuildTransformedMetric(mesh, coeffs);
  asm_.boundary = ExtractBoundary(mesh);
  const int n = mesh.NumVertices();
  asm_.vertex_to_interior.assign(n, 0);
  for (int v : asm_.boundary.trace_map)
  {
    asm_.vertex_to_interior[v] = -1;
  }
  for (int v = 0; v < n; v++)
  {
    if (asm_.vertex_to_interior[v] == 0)
    {
      asm_.vertex_to_interior[v] = static_cast<int>(asm_.interior_dofs.size());
      asm_.interior_dofs.push_back(v);
    }
  }

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> tk, tk1, tk0, tm;
  tk.reserve(9 * mesh.NumTriangles());
  tm.reserve(9 * mesh.NumTriangles());

  const bool zero_b = coeffs.HasZeroB();
  const bool zero_c = coeffs.HasZeroC();

  for (int ti = 0; ti < mesh.NumTriangles(); ti++)
  {
    const auto &t = mesh.triangles[ti];
    const ElementGeometry geom = ElementGeom(mesh, ti);
    const Eigen::Vector2d q = geom.barycenter;

    const Eigen::Matrix2d g = mesh.MetricAtBarycenter(ti);
    const double det_g = g.determinant();
    const Eigen::Matrix2d g_inv = Adjugate(g) / det_g;
    const Eigen::Matrix2d a = coeffs.EvalA(q.x(), q.y());
    const Eigen::Matrix2d gt_inv = a * g_inv;  // g_tilde^{kl} at the barycenter
    // volume weight from the formed transformed metric; the direct assembly route
    // reaches the same factor as sqrt(det g)/sqrt(det a)
    const Eigen::Matrix2d gt = Adjugate(gt_inv) / gt_inv.determinant();
    const double det_gt = gt.determinant();
    if (!(det_gt > 0.0))
    {
      throw AssemblyError("non-positive transformed metric determinant in triangle " +
                          std::to_string(ti));
    }
    const double weight = std::sqrt(det_gt);
    if (!(weight * geom.chart_area > 1e-14))
    {
      throw AssemblyError("degenerate element " + std::to_string(ti) +
                          " (metric area below 1e-14)");
    }

    const Eigen::Matrix3d Ke =
        geom.chart_area * weight * (geom.grads * gt_inv * geom.grads.transpose());
    for (int i = 0; i < 3; i++)
    {
      for (int j = 0; j < 3; j++)
      {
        tk.emplace_back(t[i], t[j], Ke(i, j));
        tm.emplace_back(t[i], t[j],
                        weight * geom.chart_area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }

    if (!zero_b)
    {
      // <b, grad_g u> = b^T g^{-1} grad u, tested against v with the dvol_gt measure;
      // the test factor integrates to area/3 per corner.
      const Eigen::Vector2d bq = coeffs.EvalB(q.x(), q.y());
      if (bq.squaredNorm() > 0.0)
      {
        const Eigen::Vector3d s = geom.grads * (g_inv * bq);
        for (int i = 0; i < 3; i++)
        {
          for (int j = 0; j < 3; j++)
          {
            tk1.emplace_back(t[i], t[j], weight * geom.chart_area / 3.0 * s(j));
          }
        }
      }
    }
    if (!zero_c)
    {
      const double cq = coeffs.EvalC(q.x(), q.y());
      for (int i = 0; i < 3; i++)
      {
        for (int j = 0; j < 3; j++)
        {
          tk0.emplace_back(t[i], t[j],
                           cq * weight * geom.chart_area / 12.0 * (i == j ? 2.0 : 1.0));
        }
      }
    }
  }

  asm_.K.resize(n, n);
  asm_.K.setFromTriplets(tk.begin(), tk.end());
  asm_.K1.resize(n, n);
  asm_.K1.setFromTriplets(tk1.begin(), tk1.end());
  asm_.K0.resize(n, n);
  asm_.K0.setFromTriplets(tk0.begin(), tk0.end());
  asm_.M_vol.resize(n, n);
  asm_.M_vol.setFromTriplets(tm.begin(), tm.end());

  // Boundary matrices on each loop, arc lengths under the induced g_tilde metric.
  const int nb = asm_.boundary.NumBoundary();
  std::vector<Trip> tmb, tkb;
  for (const auto &loop : asm_.boundary.loops)
  {
    const int L = static_cast<int>(loop.vertices.size());
    for (int k = 0; k < L; k++)
    {
      const int va = loop.vertices[k];
      const int vb = loop.vertices[(k + 1) % L];
      const Eigen::Vector2d dvec = mesh.vertices[vb] - mesh.vertices[va];
      const Eigen::Matrix2d gt =
          0.5 * (asm_.tmetric.g_tilde[va] + asm_.tmetric.g_tilde[vb]);
      const double ell = std::sqrt(dvec.dot(gt * dvec));
      const int ia = asm_.boundary.vertex_to_boundary[va];
      const int ib = asm_.boundary.vertex_to_boundary[vb];
      tmb.emplace_back(ia, ia, ell / 3.0);
      tmb.emplace_back(ib, ib, ell / 3.0);
      tmb.emplace_back(ia, ib, ell / 6.0);
      tmb.emplace_back(ib, ia, ell / 6.0);
      tkb.emplace_back(ia, ia, 1.0 / ell);
      tkb.emplace_back(ib, ib, 1.0 / ell);
      tkb.emplace_back(ia, ib, -1.0 / ell);
      tkb.emplace_back(ib, ia, -1.0 / ell);
    }
  }
  asm_.M_bnd.resize(nb, nb);
  asm_.M_bnd.setFromTriplets(tmb.begin(), tmb.end());
  asm_.K_bnd.resize(nb, nb);
  asm_.K_bnd.setFromTriplets(tkb.begin(), tkb.end());

  asm_.beta_diag.resize(nb);
  asm_.d_diag.resize(nb);
  for (const auto &loop : asm_.boundary.loops)
  {
    for (std::size_t k = 0; k < loop.vertices.size(); k++)
    {
      const int v = loop.vertices[k];
      const int ib = asm_.boundary.vertex_to_boundary[v];
      EvalContext ctx;
      ctx.x = mesh.vertices[v].x();
      ctx.y = mesh.vertices[v].y();
      ctx.theta = std::atan2(ctx.y, ctx.x);
      ctx.s = loop.arc_coord[k];
      asm_.beta_diag[ib] = coeffs.EvalBeta(ctx);
      asm_.d_diag[ib] = coeffs.EvalD(ctx);
    }
  }

  auto solver = std::make_shared<Eigen::SimplicialLDLT<SparseReal>>();
  solver->compute(asm_.M_bnd);
  if (solver->info() != Eigen::Success)
  {
    throw AssemblyError("boundary mass matrix is not positive definite");
  }
  asm_.mbnd_solver = std::move(solver);

  asm_.mesh_hash = MeshHash(mesh);
  asm_.coeff_hash = coeffs.Hash();
  asm_.flat_principal = coeffs.IsFlatPrincipal();
  double tmp = 0.0;
  asm_.constant_beta = coeffs.beta.IsConstant(tmp);
  asm_.constant_d = coeffs.d.IsConstant(tmp);
  return asm_;
}

SparseReal AssembleDivergenceFormDirect(const Mesh &mesh, const CoefficientSet &coeffs)
{
  const int n = mesh.NumVertices();
  std::vector<Eigen::Triplet<double>> tk;
  tk.reserve(9 * mesh.NumTriangles());
  for (int ti = 0; ti < mesh.NumTriangles(); ti++)
  {
    const auto &t = mesh.triangles[ti];
    const ElementGeometry geom = ElementGeom(mesh, ti);
    const Eigen::Vector2d q = geom.barycenter;
    const Eigen::Matrix2d g = mesh.MetricAtBarycenter(ti);
    const Eigen::Matrix2d a = coeffs.EvalA(q.x(), q.y());
    // sqrt|a| div_g ( (1/sqrt|a|) a grad_g u ) tested with dvol_gt: the weak integrand
    // is (grad v)^T a g^{-1} (grad u) sqrt(det g)/sqrt(det a), assembled without ever
    // forming g_tilde.
    const Eigen::Matrix2d g_inv = Adjugate(g) / g.determinant();
    const double weight = std::sqrt(g.determinant()) / std::sqrt(a.determinant());
    const Eigen::Matrix3d Ke =
        geom.chart_area * weight * (geom.grads * (a * g_inv) * geom.grads.transpose());
    for (int i = 0; i < 3; i++)
    {
      for (int j = 0; j < 3; j++)
      {
        tk.emplace_back(t[i], t[j], Ke(i, j));
      }
    }
  }
  SparseReal K(n, n);
  K.setFromTriplets(tk.begin(), tk.end());
  return K;
}

VectorC ConormalMap(const Assembly &assembly, const VectorC &u, const VectorC &rhs)
{
  const int n = assembly.NumTotal();
  const int nb = assembly.NumBoundary();
  if (u.size() != n)
  {
    throw AssemblyError("conormal map: solution vector has wrong dimension");
  }
  if (rhs.size() != 0 && rhs.size() != n)
  {
    throw AssemblyError("conormal map: source vector has wrong dimension");
  }

  VectorC residual = assembly.InteriorOperator().cast<std::complex<double>>() * u;
  if (rhs.size() == n)
  {
    residual -= rhs;
  }
  VectorC r_bnd(nb);
  for (int ib = 0; ib < nb; ib++)
  {
    r_bnd[ib] = -residual[assembly.boundary.trace_map[ib]];
  }
  VectorC t = assembly.SolveBoundaryMass(r_bnd);
  for (int ib = 0; ib < nb; ib++)
  {
    t[ib] = assembly.beta_diag[ib] * t[ib] +
            assembly.d_diag[ib] * u[assembly.boundary.trace_map[ib]];
  }
  return t;
}

double RelativeMatrixDistance(const SparseReal &A, const SparseReal &B)
{
  const SparseReal diff = A - B;
  double dmax = 0.0;
  for (int k = 0; k < diff.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(diff, k); it; ++it)
    {
      dmax = std::max(dmax, std::abs(it.value()));
    }
  }
  double amax = 0.0;
  for (int k = 0; k < A.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(A, k); it; ++it)
    {
      amax = std::max(amax, std::abs(it.value()));
    }
  }
  return amax > 0.0 ? dmax / amax : dmax;
}

}  // namespace dtn
