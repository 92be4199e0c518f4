// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "dtn/metric_transform.hpp"

using namespace dtn;

namespace
{

CoefficientSet WithA(double a11, double a12, double a21, double a22)
{
  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.a = {FieldExpr::Constant(a11), FieldExpr::Constant(a12), FieldExpr::Constant(a21),
          FieldExpr::Constant(a22)};
  return cs;
}

}  // namespace

TEST_CASE("identity coefficients give back the metric exactly")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 0);
  const TransformedMetric tm = BuildTransformedMetric(m, CoefficientSet::LaplaceBeltrami());
  for (int v = 0; v < m.NumVertices(); v++)
  {
    CHECK(tm.g_tilde[v] == Eigen::Matrix2d::Identity());  // bitwise for identity g
  }
  CHECK(tm.DeterminantIdentityResidual() <= 1e-12);
}

TEST_CASE("a = id returns g_tilde = g on a curved metric")
{
  const Mesh m = BuiltinMesh(BuiltinKind::SphericalCap, 1);
  const TransformedMetric tm = BuildTransformedMetric(m, CoefficientSet::LaplaceBeltrami());
  for (int v = 0; v < m.NumVertices(); v++)
  {
    CHECK((tm.g_tilde[v] - m.metric[v]).cwiseAbs().maxCoeff() <=
          1e-15 * (1.0 + m.metric[v].cwiseAbs().maxCoeff()));
  }
  CHECK(tm.DeterminantIdentityResidual() <= 1e-12);
}

TEST_CASE("scaling case: a = 2 id halves g_tilde and the determinants balance")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 0);
  const TransformedMetric tm = BuildTransformedMetric(m, WithA(2, 0, 0, 2));
  CHECK((tm.g_tilde[0] - 0.5 * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(tm.det_a[0] == doctest::Approx(4.0));
  CHECK(tm.det_g_tilde[0] == doctest::Approx(0.25));
  CHECK(tm.DeterminantIdentityResidual() <= 1e-12);
}

TEST_CASE("hand-inverted 2x2 case")
{
  // a = [[2,1],[1,2]] on flat g: g_tilde = a^{-1} = (1/3)[[2,-1],[-1,2]]
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 0);
  const TransformedMetric tm = BuildTransformedMetric(m, WithA(2, 1, 1, 2));
  Eigen::Matrix2d expect;
  expect << 2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0;
  CHECK((tm.g_tilde[0] - expect).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(tm.det_a[0] == doctest::Approx(3.0));
  CHECK(tm.det_g_tilde[0] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ellipticity report: identity, diagonal, and coupled cases")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 0);
  CHECK(ComputeEllipticityReport(m, CoefficientSet::LaplaceBeltrami()).min_eigenvalue ==
        doctest::Approx(1.0));
  CHECK(ComputeEllipticityReport(m, WithA(1, 0, 0, 1e-3)).min_eigenvalue ==
        doctest::Approx(1e-3));
  // eigenvalues of [[2,1],[1,2]] are {1,3}
  CHECK(ComputeEllipticityReport(m, WithA(2, 1, 1, 2)).min_eigenvalue ==
        doctest::Approx(1.0));
}

TEST_CASE("a negative report is a value, an indefinite build is an error")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 0);
  const CoefficientSet bad = WithA(1, 0, 0, -1);
  const EllipticityReport rep = ComputeEllipticityReport(m, bad);
  CHECK(rep.min_eigenvalue == doctest::Approx(-1.0));
  CHECK_FALSE(rep.positive);
  CHECK_THROWS_AS(BuildTransformedMetric(m, bad), EllipticityError);
}

TEST_CASE("asymmetric a is rejected with the vertex named")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 0);
  CHECK_THROWS_WITH_AS(BuildTransformedMetric(m, WithA(1, 0.25, -0.25, 1)),
                       doctest::Contains("not symmetric"), EllipticityError);
}

TEST_CASE("non-commuting a on a curved chart is reported as not g-self-adjoint")
{
  Mesh m = BuiltinMesh(BuiltinKind::Disk, 0);
  // impose an anisotropic metric so a.g^{-1} loses symmetry for coupled a
  for (auto &g : m.metric)
  {
    g << 2.0, 0.3, 0.3, 1.0;
  }
  CHECK_THROWS_WITH_AS(BuildTransformedMetric(m, WithA(1, 0.5, 0.5, 2)),
                       doctest::Contains("self-adjoint"), EllipticityError);
}

TEST_CASE("variable spd a keeps the determinant identity to 1e-12")
{
  const Mesh m = BuiltinMesh(BuiltinKind::Disk, 2);
  CoefficientSet cs = CoefficientSet::LaplaceBeltrami();
  cs.a = {FieldExpr::Parse("1+0.5*x"), FieldExpr::Constant(0.0), FieldExpr::Constant(0.0),
          FieldExpr::Constant(1.0)};
  const TransformedMetric tm = BuildTransformedMetric(m, cs);
  CHECK(tm.DeterminantIdentityResidual() <= 1e-12);
  const EllipticityReport rep = ComputeEllipticityReport(m, cs);
  CHECK(rep.positive);
  CHECK(rep.min_eigenvalue == doctest::Approx(0.5).epsilon(1e-6));  // at x = -1
}
