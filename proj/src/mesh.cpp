#include "stfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace stfem {

namespace {

double tri_area2(const std::array<double, 2>& a, const std::array<double, 2>& b,
                 const std::array<double, 2>& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// uniform double in [0,1) from the top 53 bits; identical on every platform
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

BoundaryTag classify_vertex(double x, double t, double horizon) {
  // lateral boundary wins at the corners: the control space vanishes there
  if (std::abs(x) <= kCoordTol || std::abs(x - 1.0) <= kCoordTol) return BoundaryTag::Dirichlet;
  if (std::abs(t) <= kCoordTol) return BoundaryTag::Sigma0;
  if (std::abs(t - horizon) <= kCoordTol) return BoundaryTag::SigmaT;
  return BoundaryTag::Interior;
}

SpaceTimeMesh generate_structured(int n, double horizon) {
  if (n < 2) throw std::invalid_argument("generate_structured: N must be >= 2");
  if (!(horizon > 0.0)) throw std::invalid_argument("generate_structured: T must be positive");

  SpaceTimeMesh mesh;
  mesh.horizon = horizon;
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    const double t = horizon * (static_cast<double>(j) / n);
    for (int i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) / n;
      mesh.vertices.push_back({x, t});
    }
  }

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.elements.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.elements.push_back({a, b, c});
      mesh.elements.push_back({a, c, d});
    }
  }

  mesh.tags.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) mesh.tags.push_back(classify_vertex(v[0], v[1], horizon));
  return mesh;
}

double signed_area(const SpaceTimeMesh& mesh, int element) {
  if (element < 0 || element >= mesh.num_elements())
    throw std::invalid_argument("signed_area: element index out of range");
  const auto& e = mesh.elements[element];
  return 0.5 * tri_area2(mesh.vertices[e[0]], mesh.vertices[e[1]], mesh.vertices[e[2]]);
}

ElementGeometry element_geometry(const SpaceTimeMesh& mesh, int element) {
  if (element < 0 || element >= mesh.num_elements())
    throw std::invalid_argument("element_geometry: element index out of range");
  const auto& e = mesh.elements[element];
  const auto& a = mesh.vertices[e[0]];
  const auto& b = mesh.vertices[e[1]];
  const auto& c = mesh.vertices[e[2]];

  const double det = tri_area2(a, b, c);
  ElementGeometry g;
  g.area = 0.5 * det;
  g.gradients[0] = {(b[1] - c[1]) / det, (c[0] - b[0]) / det};
  g.gradients[1] = {(c[1] - a[1]) / det, (a[0] - c[0]) / det};
  g.gradients[2] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
  return g;
}

SpaceTimeMesh perturb_interior(const SpaceTimeMesh& mesh, double amplitude, std::uint64_t seed) {
  if (amplitude < 0.0 || amplitude > 0.49)
    throw std::invalid_argument("perturb_interior: amplitude must be in [0, 0.49]");
  validate_mesh(mesh);

  const int nv = mesh.num_vertices();
  std::vector<double> min_edge(nv, std::numeric_limits<double>::max());
  std::vector<std::vector<int>> star(nv);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      const int u = el[k], w = el[(k + 1) % 3];
      const double dx = mesh.vertices[u][0] - mesh.vertices[w][0];
      const double dt = mesh.vertices[u][1] - mesh.vertices[w][1];
      const double len = std::sqrt(dx * dx + dt * dt);
      min_edge[u] = std::min(min_edge[u], len);
      min_edge[w] = std::min(min_edge[w], len);
      star[el[k]].push_back(e);
    }
  }

  SpaceTimeMesh out = mesh;
  std::mt19937_64 rng(seed);

  for (int v = 0; v < nv; ++v) {
    if (mesh.tags[v] != BoundaryTag::Interior) continue;

    double area_floor = std::numeric_limits<double>::max();
    for (int e : star[v]) area_floor = std::min(area_floor, signed_area(mesh, e));
    area_floor *= 1e-6;

    const std::array<double, 2> original = out.vertices[v];
    double scale = amplitude * min_edge[v];
    bool placed = false;
    for (int attempt = 0; attempt <= 10 && !placed; ++attempt) {
      const double angle = 2.0 * M_PI * uniform01(rng);
      const double radius = scale * uniform01(rng);
      out.vertices[v] = {original[0] + radius * std::cos(angle),
                         original[1] + radius * std::sin(angle)};
      placed = true;
      for (int e : star[v]) {
        if (signed_area(out, e) <= area_floor) {
          placed = false;
          break;
        }
      }
      if (!placed) {
        out.vertices[v] = original;
        scale *= 0.5;
      }
    }
    if (!placed)
      throw PerturbationFailure("perturb_interior: vertex " + std::to_string(v) +
                                " could not be displaced without inverting an element");
  }

  validate_mesh(out);
  return out;
}

void validate_mesh(const SpaceTimeMesh& mesh) {
  const int nv = mesh.num_vertices();
  if (static_cast<int>(mesh.tags.size()) != nv)
    throw MeshError("validate_mesh: tag array size mismatch");
  if (!(mesh.horizon > 0.0)) throw MeshError("validate_mesh: nonpositive final time");

  for (int v = 0; v < nv; ++v) {
    if (mesh.tags[v] != classify_vertex(mesh.vertices[v][0], mesh.vertices[v][1], mesh.horizon))
      throw MeshError("validate_mesh: tag of vertex " + std::to_string(v) +
                      " does not match its coordinates");
  }

  std::map<std::pair<int, int>, int> edge_count;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      if (el[k] < 0 || el[k] >= nv)
        throw MeshError("validate_mesh: element " + std::to_string(e) +
                        " references vertex " + std::to_string(el[k]));
    }
    if (el[0] == el[1] || el[1] == el[2] || el[0] == el[2])
      throw MeshError("validate_mesh: element " + std::to_string(e) + " has repeated vertices");
    if (!(signed_area(mesh, e) > 0.0))
      throw MeshError("validate_mesh: element " + std::to_string(e) +
                      " is not positively oriented");
    for (int k = 0; k < 3; ++k) {
      const int u = std::min(el[k], el[(k + 1) % 3]);
      const int w = std::max(el[k], el[(k + 1) % 3]);
      ++edge_count[{u, w}];
    }
  }

  auto on_same_side = [&](int u, int w) {
    const auto& a = mesh.vertices[u];
    const auto& b = mesh.vertices[w];
    const double T = mesh.horizon;
    return (std::abs(a[0]) <= kCoordTol && std::abs(b[0]) <= kCoordTol) ||
           (std::abs(a[0] - 1.0) <= kCoordTol && std::abs(b[0] - 1.0) <= kCoordTol) ||
           (std::abs(a[1]) <= kCoordTol && std::abs(b[1]) <= kCoordTol) ||
           (std::abs(a[1] - T) <= kCoordTol && std::abs(b[1] - T) <= kCoordTol);
  };

  for (const auto& [edge, count] : edge_count) {
    if (count > 2)
      throw MeshError("validate_mesh: edge (" + std::to_string(edge.first) + "," +
                      std::to_string(edge.second) + ") shared by " + std::to_string(count) +
                      " elements");
    const bool boundary = on_same_side(edge.first, edge.second);
    if (count == 1 && !boundary)
      throw MeshError("validate_mesh: interior edge (" + std::to_string(edge.first) + "," +
                      std::to_string(edge.second) + ") has only one element");
    if (count == 2 && boundary)
      throw MeshError("validate_mesh: boundary edge (" + std::to_string(edge.first) + "," +
                      std::to_string(edge.second) + ") shared by two elements");
  }
}

void write_mesh(const SpaceTimeMesh& mesh, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw MeshError("write_mesh: cannot open " + path);
  std::fprintf(f, "stmesh 1 %d %d %.17g\n", mesh.num_vertices(), mesh.num_elements(),
               mesh.horizon);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    std::fprintf(f, "%.17g %.17g %d\n", mesh.vertices[v][0], mesh.vertices[v][1],
                 static_cast<int>(mesh.tags[v]));
  for (const auto& e : mesh.elements) std::fprintf(f, "%d %d %d\n", e[0], e[1], e[2]);
  std::fclose(f);
}

MeshLoad read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("read_mesh: cannot open " + path);

  int line_no = 0;
  auto next_line = [&](std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  };
  auto fail = [&](const std::string& what) -> MeshError {
    return MeshError("read_mesh: " + path + ": line " + std::to_string(line_no) + ": " + what);
  };

  std::string line;
  if (!next_line(line)) throw fail("missing header");
  std::istringstream header(line);
  std::string magic;
  int version = 0, nv = 0, ne = 0;
  double horizon = 0.0;
  if (!(header >> magic >> version >> nv >> ne >> horizon) || magic != "stmesh")
    throw fail("expected header 'stmesh 1 <nv> <ne> <T>'");
  if (version != 1) throw fail("unsupported version " + std::to_string(version));
  if (nv <= 0 || ne <= 0 || !(horizon > 0.0)) throw fail("invalid header counts");

  MeshLoad load;
  load.mesh.horizon = horizon;
  load.mesh.vertices.reserve(nv);
  load.mesh.tags.reserve(nv);
  for (int v = 0; v < nv; ++v) {
    if (!next_line(line)) throw fail("unexpected end of file in vertex list");
    std::istringstream ss(line);
    double x = 0.0, t = 0.0;
    int tag = -1;
    if (!(ss >> x >> t >> tag)) throw fail("malformed vertex line");
    if (tag < 0 || tag > 3) throw fail("tag " + std::to_string(tag) + " out of range");
    load.mesh.vertices.push_back({x, t});
    load.mesh.tags.push_back(static_cast<BoundaryTag>(tag));
  }

  load.mesh.elements.reserve(ne);
  for (int e = 0; e < ne; ++e) {
    if (!next_line(line)) throw fail("unexpected end of file in element list");
    std::istringstream ss(line);
    int i = -1, j = -1, k = -1;
    if (!(ss >> i >> j >> k)) throw fail("malformed element line");
    for (int idx : {i, j, k})
      if (idx < 0 || idx >= nv)
        throw fail("vertex index " + std::to_string(idx) + " out of range [0," +
                   std::to_string(nv) + ")");
    load.mesh.elements.push_back({i, j, k});
    const double area = signed_area(load.mesh, e);
    if (area == 0.0) throw fail("degenerate element");
    if (area < 0.0) {
      std::swap(load.mesh.elements[e][1], load.mesh.elements[e][2]);
      ++load.reoriented;
    }
  }

  validate_mesh(load.mesh);
  return load;
}

}  // namespace stfem
