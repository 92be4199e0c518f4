// SPDX-License-Identifier: Apache-2.0

#ifndef DTN_MESH_HPP
#define DTN_MESH_HPP

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dtn
{

// Thrown by mesh loading/validation with the offending simplex named in the message.
class MeshError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class ChartTag
{
  Flat,
  PolarCap,
  Custom
};

//
// Triangulated compact orientable 2-manifold with boundary, described in a single
// coordinate chart. The Riemannian metric is stored per vertex as a symmetric positive
// definite 2x2 tensor in chart coordinates and interpolated linearly elsewhere.
//
// Invariants (enforced by Validate, which loaders and builders always run):
//   - every triangle is positively oriented in chart coordinates;
//   - the per-vertex metric is symmetric with both eigenvalues > 0;
//   - every edge is shared by at most two triangles, and the edges shared by exactly
//     one form closed loops (the boundary);
//   - the triangle adjacency graph is connected.
//
struct Mesh
{
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Eigen::Matrix2d> metric;  // one tensor per vertex
  ChartTag chart_tag = ChartTag::Flat;

  int NumVertices() const { return static_cast<int>(vertices.size()); }
  int NumTriangles() const { return static_cast<int>(triangles.size()); }

  // Metric at a triangle barycenter (linear interpolation = average of the corners).
  Eigen::Matrix2d MetricAtBarycenter(int tri) const;

  // Chart area of a triangle (positive for valid meshes).
  double ChartArea(int tri) const;

  // Edge length measured in the average of the endpoint metric tensors.
  double MetricEdgeLength(int v0, int v1) const;

  // Throws MeshError naming the offending vertex/triangle/edge on violation.
  void Validate() const;
};

//
// Ordered boundary structure of a mesh: one cyclic loop per boundary component,
// each oriented so the domain lies to the left, starting at its lowest vertex index.
// Boundary degrees of freedom are numbered loop by loop in that order; trace_map
// takes a boundary dof to its mesh vertex.
//
struct BoundaryMesh
{
  struct Loop
  {
    std::vector<int> vertices;    // mesh vertex indices, cyclic order
    std::vector<double> arc_coord;  // cumulative arc length from the loop start
    double total_length = 0.0;
  };

  std::vector<Loop> loops;
  std::vector<int> trace_map;           // boundary dof -> mesh vertex
  std::vector<int> vertex_to_boundary;  // mesh vertex -> boundary dof, -1 if interior

  int NumBoundary() const { return static_cast<int>(trace_map.size()); }
};

enum class BuiltinKind
{
  Disk,
  Annulus,
  SphericalCap
};

struct ShapeParams
{
  double inner_radius = 0.5;                 // annulus: in (0,1)
  double cap_angle = 1.5707963267948966;     // spherical cap opening angle, in (0,pi)
};

// Mesh file I/O. Format (text, line oriented):
//   MESH2 <nv> <nt> [METRIC]
//   nv lines: x y [g11 g12 g22]
//   nt lines: i j k        (0-based, positively oriented)
// The writer emits 17 significant digits so coordinates round-trip exactly.
Mesh LoadMesh(std::istream &in);
Mesh LoadMeshFile(const std::string &path);
void SaveMesh(const Mesh &mesh, std::ostream &out);
void SaveMeshFile(const Mesh &mesh, const std::string &path);

// Built-in geometries. Refinement halves the mesh size per level; the disk and
// annulus carry the identity (flat) metric, the spherical cap the round-sphere
// metric in a polar chart of radius cap_angle.
Mesh BuiltinMesh(BuiltinKind kind, int refinement, const ShapeParams &params = {});

// Boundary extraction with arc lengths under the induced (mesh) metric.
// Throws MeshError if the mesh has empty boundary.
BoundaryMesh ExtractBoundary(const Mesh &mesh);

// V - E + F.
int EulerCharacteristic(const Mesh &mesh);

// Longest edge measured in the mesh metric.
double MaxEdgeLength(const Mesh &mesh);

// Serialize the mesh in file format and hash the bytes (FNV-1a); used for provenance.
std::uint64_t MeshHash(const Mesh &mesh);

}  // namespace dtn

#endif  // DTN_MESH_HPP
