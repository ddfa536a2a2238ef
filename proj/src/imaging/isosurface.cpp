#include "camikit/imaging/imaging.hpp"

#include "mc_tables.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace camikit::imaging {

namespace {

using detail::kCorner;
using detail::kEdgeCorners;
using detail::kEdgeTable;
using detail::kTriTable;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Shared by the lattice and the single-cell variant. `edge_vertex(e)` returns
// the mesh index of the vertex on cube edge e, creating it on first use.
template <typename EdgeVertex>
void polygonise(const double (&f)[8], double iso, std::vector<Triangle>& out,
                EdgeVertex&& edge_vertex) {
  int cube = 0;
  for (int c = 0; c < 8; ++c)
    if (f[c] < iso)
      cube |= 1 << c;
  if (kEdgeTable[cube] == 0)
    return;
  std::uint32_t idx[12];
  for (int e = 0; e < 12; ++e)
    if (kEdgeTable[cube] & (1 << e))
      idx[e] = edge_vertex(e);
  for (int t = 0; kTriTable[cube][t] != -1; t += 3)
    out.push_back({idx[kTriTable[cube][t]], idx[kTriTable[cube][t + 1]],
                   idx[kTriTable[cube][t + 2]]});
}

// Vertex on the segment pa-pb where the field crosses iso. A -inf endpoint
// pulls the vertex onto the finite one.
Vec3 crossing(const Vec3& pa, double fa, const Vec3& pb, double fb, double iso) {
  if (std::isinf(fa))
    return pb;
  if (std::isinf(fb))
    return pa;
  const double t = (iso - fa) / (fb - fa);
  return pa + t * (pb - pa);
}

} // namespace

SurfaceMesh isosurface(const ImageVolume& v, double isovalue) {
  const Dims d = v.dims();
  SurfaceMesh mesh;
  // padded lattice runs -1..n per axis; shift by one to index it
  const std::uint64_t px = d.nx + 2, py = d.ny + 2;
  auto field = [&](long i, long j, long k) {
    if (i < 0 || j < 0 || k < 0 || i >= static_cast<long>(d.nx) ||
        j >= static_cast<long>(d.ny) || k >= static_cast<long>(d.nz))
      return kNegInf;
    const double x = v.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                          static_cast<std::size_t>(k));
    return std::isnan(x) ? kNegInf : x;
  };
  auto position = [&](long i, long j, long k) {
    return v.position(static_cast<double>(i), static_cast<double>(j), static_cast<double>(k));
  };

  std::unordered_map<std::uint64_t, std::uint32_t> edge_ids;
  for (long k = -1; k < static_cast<long>(d.nz); ++k)
    for (long j = -1; j < static_cast<long>(d.ny); ++j)
      for (long i = -1; i < static_cast<long>(d.nx); ++i) {
        double f[8];
        long ci[8][3];
        for (int c = 0; c < 8; ++c) {
          ci[c][0] = i + kCorner[c][0];
          ci[c][1] = j + kCorner[c][1];
          ci[c][2] = k + kCorner[c][2];
          f[c] = field(ci[c][0], ci[c][1], ci[c][2]);
        }
        polygonise(f, isovalue, mesh.triangles, [&](int e) {
          int a = kEdgeCorners[e][0], b = kEdgeCorners[e][1];
          // key on the lower lattice corner and the edge axis
          long lo[3];
          int axis = 0;
          for (int t = 0; t < 3; ++t) {
            lo[t] = std::min(ci[a][t], ci[b][t]);
            if (ci[a][t] != ci[b][t])
              axis = t;
          }
          const std::uint64_t key =
            ((static_cast<std::uint64_t>(lo[0] + 1) +
              px * (static_cast<std::uint64_t>(lo[1] + 1) +
                    py * static_cast<std::uint64_t>(lo[2] + 1))) *
             3) +
            static_cast<std::uint64_t>(axis);
          auto [it, inserted] =
            edge_ids.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
          if (inserted)
            mesh.vertices.push_back(crossing(position(ci[a][0], ci[a][1], ci[a][2]), f[a],
                                             position(ci[b][0], ci[b][1], ci[b][2]), f[b],
                                             isovalue));
          return it->second;
        });
      }
  return mesh;
}

SurfaceMesh polygonise_cell(const std::array<double, 8>& values, double isovalue) {
  SurfaceMesh mesh;
  double f[8];
  for (int c = 0; c < 8; ++c)
    f[c] = values[c];
  int ids[12];
  std::fill(std::begin(ids), std::end(ids), -1);
  polygonise(f, isovalue, mesh.triangles, [&](int e) {
    if (ids[e] < 0) {
      const int a = kEdgeCorners[e][0], b = kEdgeCorners[e][1];
      auto corner = [](int c) {
        return Vec3{double(kCorner[c][0]), double(kCorner[c][1]), double(kCorner[c][2])};
      };
      ids[e] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(crossing(corner(a), f[a], corner(b), f[b], isovalue));
    }
    return static_cast<std::uint32_t>(ids[e]);
  });
  return mesh;
}

} // namespace camikit::imaging
