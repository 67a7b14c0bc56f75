#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stfem {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PerturbationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Serialized as integers in the mesh text format; keep the numbering stable.
enum class BoundaryTag : int { Interior = 0, Dirichlet = 1, Sigma0 = 2, SigmaT = 3 };

// Conforming triangulation of the space-time cylinder (0,1) x (0,T).
// Vertices carry (x, t) coordinates; elements are positively oriented.
// Immutable by convention once built; safe for concurrent reads.
struct SpaceTimeMesh {
  std::vector<std::array<double, 2>> vertices;  // (x, t)
  std::vector<std::array<int, 3>> elements;
  std::vector<BoundaryTag> tags;
  double horizon = 1.0;  // final time T

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
};

struct ElementGeometry {
  double area = 0.0;
  std::array<std::array<double, 2>, 3> gradients;  // (d/dx, d/dt) of the P1 basis
};

// Coordinate tolerance for boundary classification; grid coordinates are
// constructed as i/N so an absolute tolerance is adequate.
inline constexpr double kCoordTol = 1e-12;

BoundaryTag classify_vertex(double x, double t, double horizon);

// Tensor grid of (N+1)^2 vertices, each cell split along the lower-left to
// upper-right diagonal. Requires N >= 2.
SpaceTimeMesh generate_structured(int n, double horizon);

// Displaces interior vertices by a deterministic pseudo-random offset bounded
// by amplitude times the local minimum edge length. Boundary vertices are
// fixed. Fails with PerturbationFailure if an element cannot be kept
// positively oriented within 10 halvings of the amplitude.
SpaceTimeMesh perturb_interior(const SpaceTimeMesh& mesh, double amplitude,
                               std::uint64_t seed);

double signed_area(const SpaceTimeMesh& mesh, int element);
ElementGeometry element_geometry(const SpaceTimeMesh& mesh, int element);

// Throws MeshError if orientation, conformity, or tag classification is broken.
void validate_mesh(const SpaceTimeMesh& mesh);

struct MeshLoad {
  SpaceTimeMesh mesh;
  int reoriented = 0;  // elements flipped to positive orientation on load
};

// Text format: "stmesh 1 <nv> <ne> <T>", nv lines "x t tag", ne lines "i j k".
void write_mesh(const SpaceTimeMesh& mesh, const std::string& path);
MeshLoad read_mesh(const std::string& path);

}  // namespace stfem
