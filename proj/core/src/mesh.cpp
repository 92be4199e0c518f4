// SPDX-License-Identifier: Apache-2.0

#include "dtn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "dtn/hash.hpp"

namespace dtn
{

namespace
{

constexpr double kPi = std::numbers::pi;

std::string Fmt17(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Undirected edge key.
std::pair<int, int> EdgeKey(int a, int b)
{
  return {std::min(a, b), std::max(a, b)};
}

}  // namespace

Eigen::Matrix2d Mesh::MetricAtBarycenter(int tri) const
{
  const auto &t = triangles[tri];
  return (metric[t[0]] + metric[t[1]] + metric[t[2]]) / 3.0;
}

double Mesh::ChartArea(int tri) const
{
  const auto &t = triangles[tri];
  const Eigen::Vector2d e1 = vertices[t[1]] - vertices[t[0]];
  const Eigen::Vector2d e2 = vertices[t[2]] - vertices[t[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double Mesh::MetricEdgeLength(int v0, int v1) const
{
  const Eigen::Vector2d d = vertices[v1] - vertices[v0];
  const Eigen::Matrix2d g = 0.5 * (metric[v0] + metric[v1]);
  return std::sqrt(d.dot(g * d));
}

void Mesh::Validate() const
{
  const int nv = NumVertices();
  if (metric.size() != vertices.size())
  {
    throw MeshError("mesh: metric count does not match vertex count");
  }
  for (int v = 0; v < nv; v++)
  {
    const Eigen::Matrix2d &g = metric[v];
    if (std::abs(g(0, 1) - g(1, 0)) > 1e-14 * (1.0 + g.cwiseAbs().maxCoeff()))
    {
      throw MeshError("mesh: metric tensor not symmetric at vertex " + std::to_string(v));
    }
    if (!(g.trace() > 0.0 && g.determinant() > 0.0))
    {
      throw MeshError("mesh: metric tensor not positive definite at vertex " +
                      std::to_string(v));
    }
  }
  for (int ti = 0; ti < NumTriangles(); ti++)
  {
    const auto &t = triangles[ti];
    for (int k = 0; k < 3; k++)
    {
      if (t[k] < 0 || t[k] >= nv)
      {
        throw MeshError("mesh: vertex index out of range in triangle " + std::to_string(ti));
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
    {
      throw MeshError("mesh: degenerate triangle " + std::to_string(ti) +
                      " (repeated vertex index)");
    }
    if (!(ChartArea(ti) > 0.0))
    {
      throw MeshError("mesh: inverted or zero-area triangle " + std::to_string(ti));
    }
  }

  // Edge manifoldness: every edge in at most 2 triangles.
  std::map<std::pair<int, int>, int> edge_count;
  for (int ti = 0; ti < NumTriangles(); ti++)
  {
    const auto &t = triangles[ti];
    for (int k = 0; k < 3; k++)
    {
      const auto key = EdgeKey(t[k], t[(k + 1) % 3]);
      if (++edge_count[key] > 2)
      {
        throw MeshError("mesh: non-manifold edge (" + std::to_string(key.first) + "," +
                        std::to_string(key.second) + ") shared by more than 2 triangles");
      }
    }
  }

  // Connectivity of the triangle adjacency graph (via shared vertices is sufficient
  // for a manifold triangulation and cheaper to track).
  if (NumTriangles() > 0)
  {
    std::vector<int> comp(nv, -1);
    std::vector<int> stack;
    stack.push_back(triangles[0][0]);
    comp[triangles[0][0]] = 0;
    std::multimap<int, int> v2t;
    for (int ti = 0; ti < NumTriangles(); ti++)
    {
      for (int k = 0; k < 3; k++)
      {
        v2t.insert({triangles[ti][k], ti});
      }
    }
    while (!stack.empty())
    {
      const int v = stack.back();
      stack.pop_back();
      auto [lo, hi] = v2t.equal_range(v);
      for (auto it = lo; it != hi; ++it)
      {
        for (int k = 0; k < 3; k++)
        {
          const int w = triangles[it->second][k];
          if (comp[w] < 0)
          {
            comp[w] = 0;
            stack.push_back(w);
          }
        }
      }
    }
    for (int ti = 0; ti < NumTriangles(); ti++)
    {
      if (comp[triangles[ti][0]] < 0)
      {
        throw MeshError("mesh: triangulation is disconnected (triangle " +
                        std::to_string(ti) + " unreachable)");
      }
    }
  }
}

Mesh LoadMesh(std::istream &in)
{
  std::string header;
  if (!std::getline(in, header))
  {
    throw MeshError("mesh file: empty document");
  }
  std::istringstream hs(header);
  std::string magic;
  long nv = 0, nt = 0;
  std::string metric_tag;
  hs >> magic >> nv >> nt;
  if (magic != "MESH2" || hs.fail() || nv < 0 || nt < 0)
  {
    throw MeshError("mesh file: malformed header line");
  }
  bool has_metric = false;
  if (hs >> metric_tag)
  {
    if (metric_tag != "METRIC")
    {
      throw MeshError("mesh file: unknown header tag '" + metric_tag + "'");
    }
    has_metric = true;
  }

  Mesh mesh;
  mesh.vertices.reserve(nv);
  mesh.metric.reserve(nv);
  for (long i = 0; i < nv; i++)
  {
    std::string line;
    if (!std::getline(in, line))
    {
      throw MeshError("mesh file: missing vertex line " + std::to_string(i));
    }
    std::istringstream ls(line);
    double x, y;
    ls >> x >> y;
    if (ls.fail())
    {
      throw MeshError("mesh file: malformed vertex line " + std::to_string(i));
    }
    Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
    if (has_metric)
    {
      double g11, g12, g22;
      ls >> g11 >> g12 >> g22;
      if (ls.fail())
      {
        throw MeshError("mesh file: malformed metric entries at vertex " + std::to_string(i));
      }
      g << g11, g12, g12, g22;
    }
    mesh.vertices.emplace_back(x, y);
    mesh.metric.push_back(g);
  }
  for (long i = 0; i < nt; i++)
  {
    std::string line;
    if (!std::getline(in, line))
    {
      throw MeshError("mesh file: missing triangle line " + std::to_string(i));
    }
    std::istringstream ls(line);
    int a, b, c;
    ls >> a >> b >> c;
    if (ls.fail())
    {
      throw MeshError("mesh file: malformed triangle line " + std::to_string(i));
    }
    mesh.triangles.push_back({a, b, c});
  }
  mesh.chart_tag = has_metric ? ChartTag::Custom : ChartTag::Flat;
  mesh.Validate();
  return mesh;
}

Mesh LoadMeshFile(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw MeshError("mesh file: cannot open '" + path + "'");
  }
  return LoadMesh(in);
}

void SaveMesh(const Mesh &mesh, std::ostream &out)
{
  bool has_metric = false;
  for (const auto &g : mesh.metric)
  {
    if (g != Eigen::Matrix2d::Identity())
    {
      has_metric = true;
      break;
    }
  }
  out << "MESH2 " << mesh.NumVertices() << ' ' << mesh.NumTriangles()
      << (has_metric ? " METRIC" : "") << '\n';
  for (int v = 0; v < mesh.NumVertices(); v++)
  {
    out << Fmt17(mesh.vertices[v].x()) << ' ' << Fmt17(mesh.vertices[v].y());
    if (has_metric)
    {
      const Eigen::Matrix2d &g = mesh.metric[v];
      out << ' ' << Fmt17(g(0, 0)) << ' ' << Fmt17(g(0, 1)) << ' ' << Fmt17(g(1, 1));
    }
    out << '\n';
  }
  for (const auto &t : mesh.triangles)
  {
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
}

void SaveMeshFile(const Mesh &mesh, const std::string &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw MeshError("mesh file: cannot write '" + path + "'");
  }
  SaveMesh(mesh, out);
}

namespace
{

// Hexagonal ring triangulation of a chart disk of the given radius: ring i of n has
// 6i vertices, zipped sector by sector. All angles stay below 90 degrees, so the flat
// P1 stiffness matrix is an M-matrix (the discrete maximum principle is exact).
Mesh HexDisk(int rings, double radius)
{
  Mesh m;
  m.vertices.emplace_back(0.0, 0.0);
  std::vector<int> ring_start(rings + 1, 0);
  for (int i = 1; i <= rings; i++)
  {
    ring_start[i] = m.NumVertices();
    const double r = radius * i / rings;
    const int cnt = 6 * i;
    for (int j = 0; j < cnt; j++)
    {
      const double th = 2.0 * kPi * j / cnt;
      m.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }
  const int s1 = ring_start[1];
  for (int j = 0; j < 6; j++)
  {
    m.triangles.push_back({0, s1 + j, s1 + (j + 1) % 6});
  }
  for (int i = 1; i < rings; i++)
  {
    const int si = ring_start[i], so = ring_start[i + 1];
    const int ci = 6 * i, co = 6 * (i + 1);
    for (int s = 0; s < 6; s++)
    {
      const auto inner = [&](int k) { return si + (s * i + k) % ci; };
      const auto outer = [&](int q) { return so + (s * (i + 1) + q) % co; };
      for (int k = 0; k <= i; k++)
      {
        m.triangles.push_back({inner(std::min(k, i)), outer(k), outer(k + 1)});
      }
      for (int k = 0; k < i; k++)
      {
        m.triangles.push_back({inner(k), outer(k + 1), inner(k + 1)});
      }
    }
  }
  m.metric.assign(m.vertices.size(), Eigen::Matrix2d::Identity());
  return m;
}

// Round-sphere metric of the polar chart (x,y) -> (phi = |x|, theta): radial
// direction has unit length, tangential carries sin(phi)/phi. Extends analytically
// to the identity at the pole.
Eigen::Matrix2d CapMetric(const Eigen::Vector2d &p)
{
  const double r = p.norm();
  if (r < 1e-14)
  {
    return Eigen::Matrix2d::Identity();
  }
  const double sr = std::sin(r) / r;
  const Eigen::Vector2d er = p / r;
  const Eigen::Matrix2d P = er * er.transpose();
  return P + sr * sr * (Eigen::Matrix2d::Identity() - P);
}

}  // namespace

Mesh BuiltinMesh(BuiltinKind kind, int refinement, const ShapeParams &params)
{
  if (refinement < 0)
  {
    throw MeshError("builtin mesh: refinement must be >= 0");
  }
  const int base = 5;
  const int n = base * (1 << refinement);

  Mesh m;
  switch (kind)
  {
    case BuiltinKind::Disk:
      m = HexDisk(n, 1.0);
      m.chart_tag = ChartTag::Flat;
      break;
    case BuiltinKind::Annulus:
      {
        const double rho = params.inner_radius;
        if (!(rho > 0.0 && rho < 1.0))
        {
          throw MeshError("builtin mesh: annulus inner radius must lie in (0,1)");
        }
        const int mang = 6 * n;
        const int nr = std::max(1, (int)std::lround(6.0 * n * (1.0 - rho) / (2.0 * kPi)));
        for (int i = 0; i <= nr; i++)
        {
          const double r = rho + (1.0 - rho) * i / nr;
          for (int j = 0; j < mang; j++)
          {
            const double th = 2.0 * kPi * j / mang;
            m.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
          }
        }
        for (int i = 0; i < nr; i++)
        {
          for (int j = 0; j < mang; j++)
          {
            const int a = i * mang + j;
            const int b = i * mang + (j + 1) % mang;
            const int c = (i + 1) * mang + j;
            const int d = (i + 1) * mang + (j + 1) % mang;
            m.triangles.push_back({a, c, d});
            m.triangles.push_back({a, d, b});
          }
        }
        m.metric.assign(m.vertices.size(), Eigen::Matrix2d::Identity());
        m.chart_tag = ChartTag::Flat;
      }
      break;
    case BuiltinKind::SphericalCap:
      {
        const double alpha = params.cap_angle;
        if (!(alpha > 0.0 && alpha < kPi))
        {
          throw MeshError("builtin mesh: cap opening angle must lie in (0,pi)");
        }
        m = HexDisk(n, alpha);
        for (int v = 0; v < m.NumVertices(); v++)
        {
          m.metric[v] = CapMetric(m.vertices[v]);
        }
        m.chart_tag = ChartTag::PolarCap;
      }
      break;
  }
  m.Validate();
  return m;
}

BoundaryMesh ExtractBoundary(const Mesh &mesh)
{
  // A boundary edge appears in exactly one triangle; keep it directed as the triangle
  // traverses it (counterclockwise triangles put the domain on the left).
  std::map<std::pair<int, int>, int> count;
  for (const auto &t : mesh.triangles)
  {
    for (int k = 0; k < 3; k++)
    {
      count[EdgeKey(t[k], t[(k + 1) % 3])]++;
    }
  }
  std::map<int, int> next;
  for (const auto &t : mesh.triangles)
  {
    for (int k = 0; k < 3; k++)
    {
      const int a = t[k], b = t[(k + 1) % 3];
      if (count[EdgeKey(a, b)] == 1)
      {
        next[a] = b;
      }
    }
  }
  if (next.empty())
  {
    throw MeshError("mesh has empty boundary");
  }

  BoundaryMesh bm;
  bm.vertex_to_boundary.assign(mesh.NumVertices(), -1);
  std::vector<bool> seen(mesh.NumVertices(), false);
  for (const auto &[start, first] : next)
  {
    if (seen[start])
    {
      continue;
    }
    BoundaryMesh::Loop loop;
    int cur = start;
    do
    {
      loop.vertices.push_back(cur);
      seen[cur] = true;
      auto it = next.find(cur);
      if (it == next.end())
      {
        throw MeshError("mesh boundary is not a closed loop at vertex " + std::to_string(cur));
      }
      cur = it->second;
    } while (cur != start);

    loop.arc_coord.resize(loop.vertices.size());
    double s = 0.0;
    for (std::size_t k = 0; k < loop.vertices.size(); k++)
    {
      loop.arc_coord[k] = s;
      const int a = loop.vertices[k];
      const int b = loop.vertices[(k + 1) % loop.vertices.size()];
      s += mesh.MetricEdgeLength(a, b);
    }
    loop.total_length = s;
    bm.loops.push_back(std::move(loop));
  }

  for (const auto &loop : bm.loops)
  {
    for (int v : loop.vertices)
    {
      bm.vertex_to_boundary[v] = static_cast<int>(bm.trace_map.size());
      bm.trace_map.push_back(v);
    }
  }
  return bm;
}

int EulerCharacteristic(const Mesh &mesh)
{
  std::map<std::pair<int, int>, int> edges;
  for (const auto &t : mesh.triangles)
  {
    for (int k = 0; k < 3; k++)
    {
      edges[EdgeKey(t[k], t[(k + 1) % 3])] = 1;
    }
  }
  return mesh.NumVertices() - static_cast<int>(edges.size()) + mesh.NumTriangles();
}

double MaxEdgeLength(const Mesh &mesh)
{
  double h = 0.0;
  for (const auto &t : mesh.triangles)
  {
    for (int k = 0; k < 3; k++)
    {
      h = std::max(h, mesh.MetricEdgeLength(t[k], t[(k + 1) % 3]));
    }
  }
  return h;
}

std::uint64_t MeshHash(const Mesh &mesh)
{
  std::ostringstream os;
  SaveMesh(mesh, os);
  return Fnv1a64(os.str());
}

}  // namespace dtn
