#include "doctest.h"

#include "fixtures.hpp"

#include "camikit/error.hpp"
#include "camikit/mesh/mesh_ops.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace camikit;
using namespace camikit::mesh;

namespace {

SurfaceMesh merge(SurfaceMesh a, const SurfaceMesh& b) {
  const auto off = static_cast<std::uint32_t>(a.vertices.size());
  a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (auto t : b.triangles)
    a.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});
  return a;
}

Affine4 random_affine(fixtures::Rng& rng) {
  std::uniform_real_distribution<double> u(-2, 2);
  Mat3 l{};
  for (auto& row : l)
    for (auto& x : row)
      x = u(rng);
  return Affine4::from_linear(l, {u(rng), u(rng), u(rng)});
}

} // namespace

TEST_CASE("transform_mesh maps vertices and keeps triangles") {
  const auto cube = fixtures::unit_cube();
  CHECK(transform_mesh(cube, Affine4::identity()) == cube);

  const auto moved = transform_mesh(cube, Affine4::translate({1, 2, 3}));
  CHECK(moved.triangles == cube.triangles);
  for (std::size_t i = 0; i < cube.vertices.size(); ++i)
    CHECK(moved.vertices[i] == cube.vertices[i] + Vec3{1, 2, 3});

  CHECK(enclosed_volume(transform_mesh(cube, Affine4::scale({2, 2, 2}))) == doctest::Approx(8.0));

  auto with_normals = compute_normals(cube).mesh;
  try {
    transform_mesh(with_normals, Affine4::scale({1, 0, 1}));
    FAIL("expected SingularTransform");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularTransform);
  }
  // without normals a flattening map is fine
  CHECK_NOTHROW(transform_mesh(cube, Affine4::scale({1, 0, 1})));

  Affine4 bad;
  bad.m[3][0] = 1;
  CHECK_THROWS_AS(transform_mesh(cube, bad), Error);
}

TEST_CASE("transformed normals stay unit and follow the surface") {
  fixtures::Rng rng(9);
  const auto sphere = compute_normals(fixtures::icosphere(2)).mesh;
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_affine(rng);
    const auto out = transform_mesh(sphere, t);
    const auto recomputed = compute_normals(out).mesh;
    double det = determinant(t.linear());
    for (std::size_t i = 0; i < out.normals.size(); ++i) {
      CHECK(norm(out.normals[i]) == doctest::Approx(1.0).epsilon(1e-12));
      // area-weighted normals of a mapped surface are not exactly the mapped
      // normals, but they agree in direction up to the mapping's handedness
      CHECK(dot(out.normals[i], recomputed.normals[i]) * (det > 0 ? 1 : -1) > 0.5);
    }
  }
}

TEST_CASE("surface_area") {
  CHECK(surface_area(fixtures::unit_cube()) == doctest::Approx(6.0));
  SurfaceMesh flat;
  flat.vertices = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
  flat.triangles = {{0, 1, 2}};
  CHECK(surface_area(flat) == 0.0);
  const double a = surface_area(fixtures::icosphere(3));
  CHECK(std::abs(a - 4 * std::numbers::pi) / (4 * std::numbers::pi) < 0.01);
}

TEST_CASE("enclosed_volume") {
  CHECK(enclosed_volume(fixtures::unit_cube()) == doctest::Approx(1.0));
  CHECK(enclosed_volume(fixtures::unit_cube({5, -7, 11})) == doctest::Approx(1.0));
  auto open = fixtures::unit_cube();
  open.triangles.pop_back();
  try {
    enclosed_volume(open);
    FAIL("expected NotClosed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotClosed);
  }
  CHECK(boundary_edges(open).size() == 3);

  // reversed winding still gives a positive volume
  auto flipped = fixtures::unit_cube();
  for (auto& t : flipped.triangles)
    std::swap(t[1], t[2]);
  CHECK(enclosed_volume(flipped) == doctest::Approx(1.0));
}

TEST_CASE("euler_characteristic") {
  const auto cube = fixtures::unit_cube();
  CHECK(euler_characteristic(cube) == 2);
  CHECK(euler_characteristic(merge(cube, fixtures::unit_cube({3, 0, 0}))) == 4);

  // brute-force count on the torus grid
  const auto torus = fixtures::torus_grid(3);
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (auto t : torus.triangles)
    for (int e = 0; e < 3; ++e)
      edges.insert(std::minmax(t[e], t[(e + 1) % 3]));
  const auto expected = std::int64_t(torus.vertices.size()) - std::int64_t(edges.size()) +
                        std::int64_t(torus.triangles.size());
  CHECK(expected == 0);
  CHECK(euler_characteristic(torus) == expected);
}

TEST_CASE("compute_normals") {
  const auto grid = compute_normals(fixtures::flat_grid(4));
  CHECK(grid.fallback_vertices.empty());
  for (const auto& n : grid.mesh.normals)
    CHECK(n == Vec3{0, 0, 1});

  auto lonely = fixtures::flat_grid(1);
  lonely.vertices.push_back({9, 9, 9});
  const auto r = compute_normals(lonely);
  CHECK(r.fallback_vertices == std::vector<std::uint32_t>{4});
  CHECK(r.mesh.normals[4] == Vec3{0, 0, 1});

  const auto sphere = compute_normals(fixtures::icosphere(3)).mesh;
  const double limit = std::cos(2.0 * std::numbers::pi / 180.0);
  for (std::size_t i = 0; i < sphere.vertices.size(); ++i)
    CHECK(dot(sphere.normals[i], sphere.vertices[i] / norm(sphere.vertices[i])) >= limit);

  CHECK(compute_normals(sphere).mesh == sphere);
}

TEST_CASE("laplacian_smooth") {
  const auto sphere = fixtures::icosphere(2);
  CHECK(laplacian_smooth(sphere, 0, 0.5) == sphere);
  CHECK(laplacian_smooth(sphere, 5, 0.0) == sphere);

  auto lonely = sphere;
  lonely.vertices.push_back({7, 7, 7});
  const auto smoothed = laplacian_smooth(lonely, 3, 0.5);
  CHECK(smoothed.vertices.back() == Vec3{7, 7, 7});
  CHECK(smoothed.triangles == lonely.triangles);

  auto current = sphere;
  double volume = enclosed_volume(current);
  for (int it = 0; it < 10; ++it) {
    current = laplacian_smooth(current, 1, 0.6);
    const double next = enclosed_volume(current);
    CHECK(next <= volume);
    volume = next;
  }
  CHECK(euler_characteristic(current) == euler_characteristic(sphere));
  CHECK_THROWS_AS(laplacian_smooth(sphere, -1, 0.5), Error);
  CHECK_THROWS_AS(laplacian_smooth(sphere, 1, 1.5), Error);
}

TEST_CASE("metrics under rigid and affine maps") {
  fixtures::Rng rng(21);
  std::uniform_real_distribution<double> ang(-180, 180), off(-50, 50);
  const auto sphere = fixtures::icosphere(2, 3.0);
  const double area = surface_area(sphere), volume = enclosed_volume(sphere);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rigid = Affine4::translate({off(rng), off(rng), off(rng)}) *
                       Affine4::rotate_xyz_deg({ang(rng), ang(rng), ang(rng)});
    const auto moved = transform_mesh(sphere, rigid);
    CHECK(surface_area(moved) == doctest::Approx(area).epsilon(1e-9));
    CHECK(enclosed_volume(moved) == doctest::Approx(volume).epsilon(1e-9));

    const auto t = random_affine(rng);
    const double det = std::abs(determinant(t.linear()));
    if (det < 1e-3)
      continue;
    CHECK(enclosed_volume(transform_mesh(sphere, t)) == doctest::Approx(volume * det).epsilon(1e-9));
    CHECK(euler_characteristic(transform_mesh(sphere, t)) == 2);
  }
}
