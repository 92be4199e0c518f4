// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dtn/assembly.hpp"

using namespace dtn;

namespace
{

constexpr double kPi = std::numbers::pi;

// Independent oracle: flat cotangent-weight stiffness matrix.
SparseReal CotanStiffness(const Mesh &m)
{
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto &t : m.triangles)
  {
    for (int k = 0; k < 3; k++)
    {
      const int i = t[(k + 1) % 3], j = t[(k + 2) % 3], o = t[k];
      const Eigen::Vector2d a = m.vertices[i] - m.vertices[o];
      const Eigen::Vector2d b = m.vertices[j] - m.vertices[o];
      const double cross = a.x() * b.y() - a.y() * b.x();
      const double w = 0.5 * a.dot(b) / cross;  // cot(angle at o) / 2
      trips.emplace_back(i, j, -w);
      trips.emplace_back(j, i, -w);
      trips.emplace_back(i, i, w);
      trips.emplace_back(j, j, w);
    }
  }
  SparseReal K(m.NumVertices(), m.NumVertices());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

Eigen::VectorXd BoundaryTheta(const Assembly &a, const Mesh &m)
{
  Eigen::VectorXd th(a.NumBoundary());
  for (int ib = 0; ib < a.NumBoundary(); ib++)
  {
    const auto &p = m.vertices[a.boundary.trace_map[ib]];
    th[ib] = std::atan2(p.y(), p.x());
  }
  return th;
}

}  // namespace

TEST_CASE("flat stiffness equals the cotangent oracle")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 2);
  const Assembly a = Assemble(m, CoefficientSet::LaplaceBeltrami());
  CHECK(RelativeMatrixDistance(a.K, CotanStiffness(m)) <= 1e-13);
}

TEST_CASE("conformal invariance: a = 2 id leaves the flat stiffness unchanged")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 1);
  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.a = {FieldExpr::Constant(2.0), FieldExpr::Constant(0.0), FieldExpr::Constant(0.0),
          FieldExpr::Constant(2.0)};
  const Assembly a1 = Assemble(m, CoefficientSet::LaplaceBeltrami());
  const Assembly a2 = Assemble(m, cs);
  CHECK(RelativeMatrixDistance(a1.K, a2.K) <= 1e-13);
}

TEST_CASE("constant c makes K0 the volume mass matrix")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 1);
  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.c = FieldExpr::Constant(1.0);
  const Assembly a = Assemble(m, cs);
  CHECK(RelativeMatrixDistance(a.K0, a.M_vol) <= 1e-13);
}

TEST_CASE("stiffness structure: symmetric, zero row sums, psd with constant kernel")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Annulus, 1);
  const Assembly a = Assemble(m, CoefficientSet::LaplaceBeltrami());
  CHECK(RelativeMatrixDistance(a.K, SparseReal(a.K.transpose())) <= 1e-13);

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(a.NumTotal());
  const Eigen::VectorXd rowsums = a.K * ones;
  double scale = 0.0;
  for (int k = 0; k < a.K.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(a.K, k); it; ++it)
    {
      scale = std::max(scale, std::abs(it.value()));
    }
  }
  CHECK(rowsums.cwiseAbs().maxCoeff() <= 1e-12 * scale);

  // quadratic form nonnegative on a few deterministic vectors, zero on constants
  Eigen::VectorXd v = Eigen::VectorXd::Zero(a.NumTotal());
  for (int i = 0; i < a.NumTotal(); i++)
  {
    v[i] = std::sin(0.37 * i) + 0.2 * std::cos(1.7 * i);
  }
  CHECK(v.dot(a.K * v) > 0.0);
  CHECK(std::abs(ones.dot(a.K * ones)) <= 1e-12 * scale * a.NumTotal());
}

TEST_CASE("volume and boundary mass are symmetric positive definite")
{
  const Mesh m = BuiltinMesh(BuiltinKind::SphericalCap, 1);
  const Assembly a = Assemble(m, CoefficientSet::LaplaceBeltrami());
  Eigen::SimplicialLLT<SparseReal> llt_vol(a.M_vol);
  CHECK(llt_vol.info() == Eigen::Success);
  Eigen::SimplicialLLT<SparseReal> llt_bnd(a.M_bnd);
  CHECK(llt_bnd.info() == Eigen::Success);
}

TEST_CASE("metric reduction equals direct divergence-form assembly")
{
  // the Lemma-LB cross-check at the matrix level, identical quadrature
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 2);
  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.a = {FieldExpr::Parse("1+0.5*x"), FieldExpr::Constant(0.0), FieldExpr::Constant(0.0),
          FieldExpr::Constant(1.0)};
  const Assembly a = Assemble(m, cs);
  const SparseReal direct = AssembleDivergenceFormDirect(m, cs);
  CHECK(RelativeMatrixDistance(a.K, direct) <= 1e-12);

  // also on the curved cap with commuting (conformal) a
  const Mesh cap = BuiltinMesh(BuiltinKind::SphericalCap, 1);
  CoefficientSet cs2 = CoefficientSet::LaplaceBeltrami();
  cs2.a = {FieldExpr::Parse("1+0.25*(x^2+y^2)"), FieldExpr::Constant(0.0),
           FieldExpr::Constant(0.0), FieldExpr::Parse("1+0.25*(x^2+y^2)")};
  const Assembly a2 = Assemble(cap, cs2);
  CHECK(RelativeMatrixDistance(a2.K, AssembleDivergenceFormDirect(cap, cs2)) <= 1e-12);
}

TEST_CASE("conormal of a constant vanishes; the d term passes through")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 1);
  const Assembly a = Assemble(m, CoefficientSet::LaplaceBeltrami());
  const VectorC ones = VectorC::Constant(a.NumTotal(), 1.0);
  CHECK(ConormalMap(a, ones).cwiseAbs().maxCoeff() <= 1e-12);

  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.d = FieldExpr::Constant(1.0);
  const Assembly ad = Assemble(m, cs);
  const VectorC t = ConormalMap(ad, ones);
  CHECK((t - VectorC::Constant(ad.NumBoundary(), 1.0)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("conormal of the harmonic extension of cos(theta) approximates -cos(theta)")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 2);
  const Assembly a = Assemble(m, CoefficientSet::LaplaceBeltrami());
  // u = x is discrete harmonic and equals the extension of cos(theta)
  VectorC u(a.NumTotal());
  for (int v = 0; v < a.NumTotal(); v++)
  {
    u[v] = m.vertices[v].x();
  }
  const VectorC t = ConormalMap(a, u);
  const Eigen::VectorXd th = BoundaryTheta(a, m);
  double err = 0.0;
  for (int ib = 0; ib < a.NumBoundary(); ib++)
  {
    err = std::max(err, std::abs(t[ib].real() + std::cos(th[ib])));
  }
  const double h = MaxEdgeLength(m);
  CHECK(err <= 2.0 * h);  // sup error O(h); measured closer to O(h^2) on this mesh
}

TEST_CASE("discrete Green identity holds to roundoff")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Annulus, 1);
  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.c = FieldExpr::Parse("0.5*x");
  cs.b = {FieldExpr::Constant(0.2), FieldExpr::Constant(0.0)};
  const Assembly a = Assemble(m, cs);
  const SparseReal a_op = a.InteriorOperator();

  VectorC u(a.NumTotal());
  for (int v = 0; v < a.NumTotal(); v++)
  {
    u[v] = std::sin(0.13 * v);
  }
  // the defining equation of the flux: M_bnd t0 = -(A_op u)|boundary where
  // t0 = (conormal - d.u)/beta; verify the residual of that linear relation
  const VectorC t = ConormalMap(a, u);
  VectorC t0(a.NumBoundary());
  for (int ib = 0; ib < a.NumBoundary(); ib++)
  {
    t0[ib] = (t[ib] - a.d_diag[ib] * u[a.boundary.trace_map[ib]]) / a.beta_diag[ib];
  }
  const VectorC lhs = a.M_bnd.cast<std::complex<double>>() * t0;
  const VectorC res = a_op.cast<std::complex<double>>() * u;
  double worst = 0.0, scale = 0.0;
  for (int ib = 0; ib < a.NumBoundary(); ib++)
  {
    worst = std::max(worst, std::abs(lhs[ib] + res[a.boundary.trace_map[ib]]));
    scale = std::max(scale, std::abs(lhs[ib]));
  }
  CHECK(worst <= 1e-12 * std::max(1.0, scale));
}

TEST_CASE("first-order rows vanish outside the support of b")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 2);
  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.b = {FieldExpr::Constant(1.0), FieldExpr::Constant(0.0)};
  cs.b_support_inner = 0.3;
  cs.b_support_outer = 0.5;
  const Assembly a = Assemble(m, cs);
  for (int k = 0; k < a.K1.outerSize(); k++)
  {
    for (SparseReal::InnerIterator it(a.K1, k); it; ++it)
    {
      if (it.value() != 0.0)
      {
        // every contributing element has its barycenter inside the outer radius,
        // so both endpoints of any nonzero entry sit within one edge length of it
        const double r = m.vertices[it.row()].norm();
        CHECK(r <= 0.5 + 2.0 * MaxEdgeLength(m));
      }
    }
  }
}

TEST_CASE("ellipticity failure propagates into assembly")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 0);
  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.a = {FieldExpr::Constant(1.0), FieldExpr::Constant(0.0), FieldExpr::Constant(0.0),
          FieldExpr::Constant(-1.0)};
  CHECK_THROWS_AS(Assemble(m, cs), EllipticityError);
}

TEST_CASE("degenerate element is reported")
{
  Mesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.5, 1e-15}, {0.5, -1.0}};
  m.triangles = {{0, 1, 2}, {0, 3, 1}};
  m.metric.assign(4, Eigen::Matrix2d::Identity());
  CHECK_THROWS_WITH_AS(Assemble(m, CoefficientSet::LaplaceBeltrami()),
                       doctest::Contains("degenerate"), AssemblyError);
}

TEST_CASE("boundary stiffness annihilates constants per loop")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Annulus, 1);
  const Assembly a = Assemble(m, CoefficientSet::LaplaceBeltrami());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(a.NumBoundary());
  CHECK((a.K_bnd * ones).cwiseAbs().maxCoeff() <= 1e-12);
  // total boundary mass = total boundary length
  double len = 0.0;
  for (const auto &loop : a.boundary.loops)
  {
    len += loop.total_length;
  }
  CHECK(ones.dot(a.M_bnd * ones) == doctest::Approx(len).epsilon(1e-12));
}
