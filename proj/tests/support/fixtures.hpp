#pragma once

#include "camikit/formats/documents.hpp"
#include "camikit/formats/image_volume.hpp"
#include "camikit/formats/surface_mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

namespace fixtures {

using camikit::ImageVolume;
using camikit::SurfaceMesh;
using camikit::Vec3;

using Rng = std::mt19937_64;

ImageVolume random_volume(Rng& rng, camikit::VoxelType type, std::size_t max_dim);
ImageVolume volume_from(camikit::Dims dims, camikit::VoxelType type,
                        const std::function<double(std::size_t, std::size_t, std::size_t)>& f,
                        Vec3 spacing = {1, 1, 1}, Vec3 origin = {0, 0, 0});

/// f = r0 - |p - c| sampled on an n^3 unit grid centred in the volume.
ImageVolume sphere_field(std::size_t n, double r0);

SurfaceMesh random_mesh(Rng& rng, std::size_t max_vertices, std::size_t max_triangles);

/// Unit cube [0,1]^3, 12 outward-wound triangles.
SurfaceMesh unit_cube(Vec3 offset = {0, 0, 0});
SurfaceMesh icosphere(int subdivisions, double radius = 1.0);
/// n x n quad grid on a torus, each quad split into two triangles.
SurfaceMesh torus_grid(std::size_t n, double major = 3.0, double minor = 1.0);
/// Flat z=0 grid with triangles counter-clockwise seen from +z.
SurfaceMesh flat_grid(std::size_t n);

/// Structured bar of nx x ny x nz hexahedral cells, 6 tetrahedra per cell,
/// nodes at x = 0 fixed.
camikit::PhysicalModel tet_bar(std::size_t nx, std::size_t ny, std::size_t nz, double length,
                               double width, double height);

/// 2 x 2 x n lattice of nodes joined by springs along lattice edges and face
/// diagonals.
camikit::PhysicalModel spring_lattice(std::size_t n, double spacing);

enum class FuzzFormat { mha, off, obj, xml };

/// A valid document of the format, then 1..8 random mutations: byte flips,
/// truncation, splices of grammar tokens, duplicated or deleted spans.
std::string fuzz_input(Rng& rng, FuzzFormat format);

std::filesystem::path temp_dir(const std::string& tag);
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& bytes);

} // namespace fixtures
