#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace fixtures {

using namespace camikit;

ImageVolume random_volume(Rng& rng, VoxelType type, std::size_t max_dim) {
  std::uniform_int_distribution<std::size_t> dim(1, max_dim);
  std::uniform_real_distribution<double> sp(0.1, 3.0), org(-100.0, 100.0);
  const Dims d{dim(rng), dim(rng), dim(rng)};
  ImageVolume v(d, {sp(rng), sp(rng), sp(rng)}, {org(rng), org(rng), org(rng)}, type);
  std::uniform_int_distribution<int> u8(0, 255), i16(-32768, 32767);
  std::uniform_real_distribution<float> f32(-1e6f, 1e6f);
  for (std::size_t n = 0; n < v.size(); ++n) {
    switch (type) {
    case VoxelType::u8:
      v.set(n, u8(rng));
      break;
    case VoxelType::i16:
      v.set(n, i16(rng));
      break;
    case VoxelType::f32:
      v.set(n, f32(rng));
      break;
    }
  }
  return v;
}

ImageVolume volume_from(Dims dims, VoxelType type,
                        const std::function<double(std::size_t, std::size_t, std::size_t)>& f,
                        Vec3 spacing, Vec3 origin) {
  ImageVolume v(dims, spacing, origin, type);
  for (std::size_t k = 0; k < dims.nz; ++k)
    for (std::size_t j = 0; j < dims.ny; ++j)
      for (std::size_t i = 0; i < dims.nx; ++i)
        v.set(v.index(i, j, k), f(i, j, k));
  return v;
}

ImageVolume sphere_field(std::size_t n, double r0) {
  const double c = (static_cast<double>(n) - 1.0) / 2.0;
  return volume_from(Dims{n, n, n}, VoxelType::f32, [&](std::size_t i, std::size_t j, std::size_t k) {
    const double x = double(i) - c, y = double(j) - c, z = double(k) - c;
    return r0 - std::sqrt(x * x + y * y + z * z);
  });
}

SurfaceMesh random_mesh(Rng& rng, std::size_t max_vertices, std::size_t max_triangles) {
  std::uniform_int_distribution<std::size_t> nv(3, max_vertices), nt(0, max_triangles);
  std::uniform_real_distribution<double> coord(-1000.0, 1000.0);
  SurfaceMesh m;
  m.vertices.resize(nv(rng));
  for (auto& p : m.vertices)
    p = {coord(rng), coord(rng), coord(rng)};
  std::uniform_int_distribution<std::uint32_t> idx(0, static_cast<std::uint32_t>(m.vertices.size() - 1));
  const std::size_t count = nt(rng);
  while (m.triangles.size() < count) {
    Triangle t{idx(rng), idx(rng), idx(rng)};
    if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
      m.triangles.push_back(t);
  }
  return m;
}

SurfaceMesh unit_cube(Vec3 o) {
  SurfaceMesh m;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        m.vertices.push_back(Vec3{double(i), double(j), double(k)} + o);
  // vertex index = i + 2j + 4k
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

SurfaceMesh icosphere(int subdivisions, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                         {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                         {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& p : v)
    p = p / norm(p);
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end())
        return it->second;
      Vec3 p = (v[a] + v[b]) / 2.0;
      v.push_back(p / norm(p));
      const auto id = static_cast<std::uint32_t>(v.size() - 1);
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    for (const auto& tri : f) {
      const auto a = midpoint(tri[0], tri[1]), b = midpoint(tri[1], tri[2]),
                 c = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  SurfaceMesh m;
  for (auto& p : v)
    m.vertices.push_back(p * radius);
  m.triangles = std::move(f);
  return m;
}

SurfaceMesh torus_grid(std::size_t n, double major, double minor) {
  SurfaceMesh m;
  const double step = 2.0 * std::numbers::pi / double(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double u = step * double(i), w = step * double(j);
      m.vertices.push_back({(major + minor * std::cos(w)) * std::cos(u),
                            (major + minor * std::cos(w)) * std::sin(u), minor * std::sin(w)});
    }
  auto id = [n](std::size_t i, std::size_t j) {
    return static_cast<std::uint32_t>((i % n) * n + (j % n));
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

SurfaceMesh flat_grid(std::size_t n) {
  SurfaceMesh m;
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i <= n; ++i)
      m.vertices.push_back({double(i), double(j), 0.0});
  auto id = [n](std::size_t i, std::size_t j) { return static_cast<std::uint32_t>(i + (n + 1) * j); };
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

PhysicalModel tet_bar(std::size_t nx, std::size_t ny, std::size_t nz, double length,
                      double width, double height) {
  PhysicalModel pm;
  pm.material.ref = "bar";
  auto id = [&](std::size_t i, std::size_t j, std::size_t k) {
    return i + (nx + 1) * (j + (ny + 1) * k);
  };
  for (std::size_t k = 0; k <= nz; ++k)
    for (std::size_t j = 0; j <= ny; ++j)
      for (std::size_t i = 0; i <= nx; ++i)
        pm.nodes.push_back({length * double(i) / double(nx), width * double(j) / double(ny),
                            height * double(k) / double(nz)});
  static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i)
        for (const auto& perm : kPerm) {
          std::size_t c[3] = {i, j, k};
          std::array<std::size_t, 4> tet{};
          tet[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[perm[s]];
            tet[s + 1] = id(c[0], c[1], c[2]);
          }
          if (tetra_signed_volume6(pm.nodes[tet[0]], pm.nodes[tet[1]], pm.nodes[tet[2]],
                                   pm.nodes[tet[3]]) < 0)
            std::swap(tet[2], tet[3]);
          pm.tetrahedra.push_back(tet);
        }
  for (std::size_t k = 0; k <= nz; ++k)
    for (std::size_t j = 0; j <= ny; ++j)
      pm.fixed_nodes.push_back(id(0, j, k));
  std::sort(pm.fixed_nodes.begin(), pm.fixed_nodes.end());
  return pm;
}

PhysicalModel spring_lattice(std::size_t n, double spacing) {
  PhysicalModel pm;
  pm.material.ref = "lattice";
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 2; ++i)
        pm.nodes.push_back({spacing * double(i), spacing * double(j), spacing * double(k)});
  const double reach = spacing * std::sqrt(2.0) * (1 + 1e-9);
  for (std::size_t a = 0; a < pm.nodes.size(); ++a)
    for (std::size_t b = a + 1; b < pm.nodes.size(); ++b)
      if (norm(pm.nodes[a] - pm.nodes[b]) <= reach)
        pm.springs.push_back({a, b});
  return pm;
}

namespace {

std::string seed_document(Rng& rng, FuzzFormat format) {
  std::uniform_int_distribution<int> small(1, 4), byte(0, 255);
  switch (format) {
  case FuzzFormat::mha: {
    const int nx = small(rng), ny = small(rng), nz = small(rng);
    const char* types[] = {"MET_UCHAR", "MET_SHORT", "MET_FLOAT"};
    const int t = std::uniform_int_distribution<int>(0, 2)(rng);
    const int width = t == 0 ? 1 : (t == 1 ? 2 : 4);
    std::string s = "ObjectType = Image\nNDims = 3\nBinaryData = True\n"
                    "BinaryDataByteOrderMSB = False\nDimSize = " +
                    std::to_string(nx) + " " + std::to_string(ny) + " " + std::to_string(nz) +
                    "\nElementSpacing = 1 0.5 2\nOffset = 0 0 0\nElementType = " + types[t] +
                    "\nElementDataFile = LOCAL\n";
    for (int i = 0; i < nx * ny * nz * width; ++i)
      s.push_back(static_cast<char>(byte(rng)));
    return s;
  }
  case FuzzFormat::off:
    return "OFF\n# cube\n8 6 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n"
           "4 0 2 3 1\n4 4 5 7 6\n4 0 1 5 4\n4 2 6 7 3\n4 0 4 6 2\n4 1 3 7 5\n";
  case FuzzFormat::obj:
    return "# tetra\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nvn 0 0 1\n"
           "f 1/1/1 3/2/1 2/3/1\nf 1 2 4\nf -4 -1 -2\nf 2 3 4\ng group\n";
  case FuzzFormat::xml:
    return "<?xml version=\"1.0\"?>\n<physicalModel>\n  <!-- nodes -->\n  <nodes>\n"
           "    <node id=\"0\" x=\"0\" y='0' z=\"0\"/>\n    <node id=\"1\" x=\"1\" y=\"0\" "
           "z=\"0\"/>\n  </nodes>\n  <text>a &lt; b &amp;&amp; c &gt; d &quot;&apos;</text>\n"
           "</physicalModel>\n";
  }
  return {};
}

const char* const kTokens[] = {
  "<",    ">",     "/>",   "</",  "=",    "\"",   "'",   "&",    "&lt;", "&#65;", "<!--",
  "-->",  "<![CDATA[", "<!DOCTYPE", "<?pi?>", "a:b", " ", "\n",  "\r\n", "\0",  "-1",
  "0",    "4294967296", "1e999", "nan", "inf", "OFF", "v", "f", "//", "/", "DimSize = ",
  "ElementDataFile = LOCAL\n", "NDims = 2\n", "MET_DOUBLE", "99999999999999999999", "3 0 0 0",
};

} // namespace

std::string fuzz_input(Rng& rng, FuzzFormat format) {
  std::string s = seed_document(rng, format);
  const int mutations = std::uniform_int_distribution<int>(1, 8)(rng);
  std::uniform_int_distribution<int> kind(0, 5), byte(0, 255);
  std::uniform_int_distribution<std::size_t> token(0, std::size(kTokens) - 1);
  for (int m = 0; m < mutations; ++m) {
    auto pos = [&] { return std::uniform_int_distribution<std::size_t>(0, s.size())(rng); };
    switch (kind(rng)) {
    case 0: // flip a byte
      if (!s.empty())
        s[pos() % s.size()] = static_cast<char>(byte(rng));
      break;
    case 1: // truncate
      s.resize(pos());
      break;
    case 2: // splice a token
      s.insert(pos(), kTokens[token(rng)]);
      break;
    case 3: { // delete a span
      const auto a = pos(), b = pos();
      s.erase(std::min(a, b), std::max(a, b) - std::min(a, b));
      break;
    }
    case 4: { // duplicate a span
      const auto a = pos(), b = pos();
      const auto lo = std::min(a, b);
      s.insert(pos(), s.substr(lo, std::min<std::size_t>(std::max(a, b) - lo, 64)));
      break;
    }
    default: // replace a digit run start with a large or negative number
      for (std::size_t i = pos(); i < s.size(); ++i)
        if (s[i] >= '0' && s[i] <= '9') {
          s.insert(i, std::uniform_int_distribution<int>(0, 1)(rng) ? "-" : "999999999");
          break;
        }
      break;
    }
  }
  return s;
}

std::filesystem::path temp_dir(const std::string& tag) {
  static std::random_device rd;
  auto dir = std::filesystem::temp_directory_path() /
             ("camikit_" + tag + "_" + std::to_string(rd()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace fixtures
