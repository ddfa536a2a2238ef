#include "doctest.h"

#include "fixtures.hpp"
#include "oracles.hpp"

#include "camikit/error.hpp"
#include "camikit/imaging/imaging.hpp"
#include "camikit/mesh/mesh_ops.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>

using namespace camikit;
using namespace camikit::imaging;

namespace {

ImageVolume line_u8(std::vector<double> xs) {
  return fixtures::volume_from(Dims{xs.size(), 1, 1}, VoxelType::u8,
                               [&](std::size_t i, std::size_t, std::size_t) { return xs[i]; });
}

std::vector<double> values(const ImageVolume& v) {
  std::vector<double> out;
  for (std::size_t n = 0; n < v.size(); ++n)
    out.push_back(v.value(n));
  return out;
}

// Recover cube-edge ids of each triangle from midpoint positions.
std::vector<std::array<int, 3>> case_triangles(int mask) {
  static constexpr int pos[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  static constexpr int edge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                      {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  std::array<double, 8> f{};
  for (int c = 0; c < 8; ++c)
    f[c] = (mask >> c) & 1 ? -1.0 : 1.0;
  const auto m = polygonise_cell(f, 0.0);
  auto edge_of = [&](const Vec3& p) {
    for (int e = 0; e < 12; ++e) {
      const auto* a = pos[edge[e][0]];
      const auto* b = pos[edge[e][1]];
      if (p == Vec3{(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0})
        return e;
    }
    return -1;
  };
  std::vector<std::array<int, 3>> out;
  for (const auto& t : m.triangles)
    out.push_back({edge_of(m.vertices[t[0]]), edge_of(m.vertices[t[1]]),
                   edge_of(m.vertices[t[2]])});
  return out;
}

} // namespace

TEST_CASE("threshold maps into inside and outside") {
  auto v = line_u8({0, 5, 10, 255});
  CHECK(values(threshold(v, 5, 255, 1, 0)) == std::vector<double>{0, 1, 1, 1});
  auto once = threshold(v, 5, 255, 200, 0);
  CHECK(threshold(once, 5, 255, 200, 0) == once);
  CHECK_THROWS_AS(threshold(v, 10, 5, 1, 0), Error);
  try {
    threshold(v, 10, 5, 1, 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadRange);
  }
  // values are clamped to the voxel type
  CHECK(values(threshold(v, 0, 4, 300, -5)) == std::vector<double>{255, 0, 0, 0});
}

TEST_CASE("box_smooth matches the brute-force neighbourhood mean") {
  CHECK(values(box_smooth(line_u8({0, 3, 6}), 1)) == std::vector<double>{1, 3, 5});
  auto c = fixtures::volume_from(Dims{4, 3, 2}, VoxelType::i16,
                                 [](auto, auto, auto) { return 7.0; });
  CHECK(box_smooth(c, 3) == c);
  auto one = line_u8({42});
  CHECK(box_smooth(one, 1) == one);

  fixtures::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto type = std::array{VoxelType::u8, VoxelType::i16, VoxelType::f32}[trial % 3];
    auto v = fixtures::random_volume(rng, type, 7);
    const int r = 1 + trial % 3;
    const auto expected = oracle::box_mean(v, r);
    const auto got = box_smooth(v, r);
    for (std::size_t n = 0; n < v.size(); ++n) {
      if (type == VoxelType::f32)
        CHECK(got.value(n) == doctest::Approx(clamp_to_type(type, expected[n])).epsilon(1e-6));
      else
        CHECK(got.value(n) == clamp_to_type(type, expected[n]));
    }
    auto in = values(v), out = values(got);
    CHECK(*std::min_element(out.begin(), out.end()) >= *std::min_element(in.begin(), in.end()));
    CHECK(*std::max_element(out.begin(), out.end()) <= *std::max_element(in.begin(), in.end()));
  }
}

TEST_CASE("crop copies the box and shifts the origin") {
  ImageVolume v(Dims{2, 2, 1}, {0.5, 2, 3}, {10, 20, 30}, VoxelType::u8);
  for (std::size_t n = 0; n < 4; ++n)
    v.set(n, double(n));
  CHECK(crop(v, {0, 0, 0}, {1, 1, 0}) == v);
  auto c = crop(v, {1, 0, 0}, {1, 1, 0});
  CHECK(c.dims() == Dims{1, 2, 1});
  CHECK(c.origin() == Vec3{10.5, 20, 30});
  CHECK(values(c) == std::vector<double>{1, 3});
  try {
    crop(v, {1, 0, 0}, {0, 1, 0});
    FAIL("expected EmptyBox");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyBox);
  }
  try {
    crop(v, {0, 0, 0}, {2, 1, 0});
    FAIL("expected OutOfBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfBounds);
  }
}

TEST_CASE("voxel_stats agrees with a two-pass oracle") {
  auto c = fixtures::volume_from(Dims{3, 3, 3}, VoxelType::u8, [](auto, auto, auto) { return 9.0; });
  auto s = voxel_stats(c);
  CHECK(s.std == 0);
  CHECK(s.histogram[0] == 27);

  auto two = line_u8({0, 10, 0, 10});
  s = voxel_stats(two);
  CHECK(s.mean == 5);
  CHECK(s.std == 5);

  fixtures::Rng rng(11);
  std::uniform_int_distribution<int> u8(0, 255);
  auto v = fixtures::volume_from(Dims{10, 10, 10}, VoxelType::u8,
                                 [&](auto, auto, auto) { return double(u8(rng)); });
  s = voxel_stats(v);
  const auto o = oracle::two_pass_stats(values(v));
  CHECK(s.min == o.min);
  CHECK(s.max == o.max);
  CHECK(s.mean == o.mean);
  CHECK(s.std == o.std);
  CHECK(s.histogram == o.hist);
  std::uint64_t total = 0;
  for (auto h : s.histogram)
    total += h;
  CHECK(total == 1000);
  CHECK(s.min <= s.mean);
  CHECK(s.mean <= s.max);
}

TEST_CASE("extract_slice follows the axis conventions") {
  fixtures::Rng rng(3);
  auto v = fixtures::random_volume(rng, VoxelType::i16, 6);
  const auto d = v.dims();
  for (std::size_t k = 0; k < d.nz; ++k) {
    auto s = extract_slice(v, SliceAxis::axial, k);
    REQUIRE(s.width == d.nx);
    REQUIRE(s.height == d.ny);
    for (std::size_t j = 0; j < d.ny; ++j)
      for (std::size_t i = 0; i < d.nx; ++i)
        CHECK(s.pixel(i, j) == v.at(i, j, k));
  }

  auto cube = fixtures::volume_from(Dims{2, 2, 2}, VoxelType::u8,
                                    [](auto i, auto j, auto k) { return double(i + 2 * j + 4 * k); });
  auto sag = extract_slice(cube, SliceAxis::sagittal, 1);
  std::vector<double> px;
  for (std::size_t n = 0; n < 4; ++n)
    px.push_back(buffer_value(sag.pixels, n));
  CHECK(px == std::vector<double>{cube.at(1, 0, 0), cube.at(1, 1, 0), cube.at(1, 0, 1),
                                  cube.at(1, 1, 1)});

  try {
    extract_slice(v, SliceAxis::axial, d.nz);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }

  // re-stacking every coronal slice rebuilds the volume
  ImageVolume rebuilt(d, v.spacing(), v.origin(), v.voxel_type());
  for (std::size_t j = 0; j < d.ny; ++j) {
    auto s = extract_slice(v, SliceAxis::coronal, j);
    for (std::size_t k = 0; k < d.nz; ++k)
      for (std::size_t i = 0; i < d.nx; ++i)
        rebuilt.set(rebuilt.index(i, j, k), s.pixel(i, k));
  }
  CHECK(rebuilt == v);
}

TEST_CASE("oblique_slice samples trilinearly") {
  auto v = fixtures::volume_from(Dims{4, 3, 3}, VoxelType::u8,
                                 [](auto i, auto j, auto k) { return double(3 * i + 7 * j + 11 * k); },
                                 {1, 1, 1}, {0, 0, 0});
  auto ax = extract_slice(v, SliceAxis::axial, 2);
  auto ob = oblique_slice(v, v.position(0, 0, 2), {1, 0, 0}, {0, 1, 0}, 4, 3);
  CHECK(buffer_type(ob.pixels) == VoxelType::f32);
  for (std::size_t n = 0; n < 12; ++n)
    CHECK(buffer_value(ob.pixels, n) == float(buffer_value(ax.pixels, n)));

  auto centre = oblique_slice(v, {0.5, 0.5, 0.5}, {1, 0, 0}, {0, 1, 0}, 1, 1);
  double mean = 0;
  for (int c = 0; c < 8; ++c)
    mean += v.at(c & 1, (c >> 1) & 1, (c >> 2) & 1) / 8.0;
  CHECK(centre.pixel(0, 0) == doctest::Approx(mean));

  auto outside = oblique_slice(v, {100, 100, 100}, {1, 0, 0}, {0, 0, 1}, 5, 5);
  for (std::size_t n = 0; n < 25; ++n)
    CHECK(buffer_value(outside.pixels, n) == 0);

  try {
    oblique_slice(v, {0, 0, 0}, {1, 0, 0}, {2, 0, 0}, 2, 2);
    FAIL("expected DegeneratePlane");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegeneratePlane);
  }
}

TEST_CASE("isosurface of an all-below field is empty") {
  auto v = fixtures::volume_from(Dims{3, 3, 3}, VoxelType::f32, [](auto, auto, auto) { return -1.0; });
  auto m = isosurface(v, 0);
  CHECK(m.vertices.empty());
  CHECK(m.triangles.empty());
}

TEST_CASE("single cell with one corner above gives one triangle") {
  for (int corner = 0; corner < 8; ++corner) {
    std::array<double, 8> f{};
    f.fill(-1);
    f[corner] = 1;
    CHECK(polygonise_cell(f, 0).triangles.size() == 1);
  }
}

TEST_CASE("all 256 cell cases are edge-consistent") {
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> seen;
  for (int mask = 0; mask < 256; ++mask) {
    const auto tris = case_triangles(mask);
    for (const auto& t : tris)
      for (int e : t)
        REQUIRE(e >= 0);
    const auto r = oracle::check_cell_case(mask, tris);
    INFO("mask " << mask << ": " << r.problem);
    CHECK(r.uses_only_crossing_edges);
    CHECK(r.uses_every_crossing_edge);
    CHECK(r.interior_edges_paired);
  }
}

TEST_CASE("cell cases agree on every shared face") {
  static constexpr int pos[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  static constexpr int edge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                      {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  auto corner_at = [](int x, int y, int z) {
    for (int c = 0; c < 8; ++c)
      if (pos[c][0] == x && pos[c][1] == y && pos[c][2] == z)
        return c;
    return -1;
  };
  // translate a corner on the high face of `axis` onto the low face
  auto drop = [&](int c, int axis) {
    int p[3] = {pos[c][0], pos[c][1], pos[c][2]};
    p[axis] = 0;
    return corner_at(p[0], p[1], p[2]);
  };
  auto edge_between = [](int a, int b) {
    for (int e = 0; e < 12; ++e)
      if ((edge[e][0] == a && edge[e][1] == b) || (edge[e][0] == b && edge[e][1] == a))
        return e;
    return -1;
  };
  // (axis, low-face corner configuration) -> segments in low-face edge ids
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> seen;
  int compared = 0;
  for (int mask = 0; mask < 256; ++mask) {
    const auto faces = oracle::face_segments(case_triangles(mask));
    for (int axis = 0; axis < 3; ++axis)
      for (int side = 0; side < 2; ++side) {
        int config = 0;
        for (int c = 0; c < 8; ++c)
          if (pos[c][axis] == side && ((mask >> c) & 1))
            config |= 1 << (side ? drop(c, axis) : c);
        std::vector<std::pair<int, int>> segs;
        for (auto [e1, e2] : faces[axis * 2 + side]) {
          auto map_edge = [&](int e) {
            return side ? edge_between(drop(edge[e][0], axis), drop(edge[e][1], axis)) : e;
          };
          segs.push_back(std::minmax(map_edge(e1), map_edge(e2)));
        }
        std::sort(segs.begin(), segs.end());
        auto [it, inserted] = seen.try_emplace({axis, config}, segs);
        if (!inserted) {
          INFO("mask " << mask << " axis " << axis << " side " << side);
          CHECK(it->second == segs);
          ++compared;
        }
      }
  }
  CHECK(compared > 1000);
}

TEST_CASE("sphere isosurface is closed and close to analytic") {
  const double r0 = 10;
  auto v = fixtures::sphere_field(25, r0);
  auto m = isosurface(v, 0);
  CHECK(mesh::boundary_edges(m).empty());
  CHECK(mesh::euler_characteristic(m) == 2);
  const double area = 4 * std::numbers::pi * r0 * r0;
  const double vol = 4 * std::numbers::pi * r0 * r0 * r0 / 3;
  CHECK(std::abs(mesh::surface_area(m) - area) / area < 0.03);
  CHECK(std::abs(mesh::enclosed_volume(m) - vol) / vol < 0.03);
  // normals point down the gradient, i.e. outward
  CHECK(mesh::signed_volume(m) > 0);

  // vertices lie on the isosurface of the trilinear field
  double lo = 1e300, hi = -1e300;
  for (std::size_t n = 0; n < v.size(); ++n) {
    lo = std::min(lo, v.value(n));
    hi = std::max(hi, v.value(n));
  }
  for (const auto& p : m.vertices)
    CHECK(std::abs(sample_trilinear(v, p)) <= 1e-4 * (hi - lo));
}

TEST_CASE("isosurfaces of random fields are watertight") {
  fixtures::Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    auto v = fixtures::random_volume(rng, VoxelType::u8, 6);
    auto m = isosurface(v, 127.5);
    INFO("trial " << trial);
    CHECK(mesh::boundary_edges(m).empty());
    validate_mesh(m);
  }
}

TEST_CASE("field wholly above the isovalue yields a closed box") {
  auto v = fixtures::volume_from(Dims{2, 2, 2}, VoxelType::u8, [](auto, auto, auto) { return 5.0; });
  auto m = isosurface(v, 1);
  CHECK(mesh::boundary_edges(m).empty());
  CHECK(mesh::euler_characteristic(m) == 2);
  CHECK(mesh::signed_volume(m) == doctest::Approx(1.0));
}
