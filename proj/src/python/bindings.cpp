#include "camikit/biomech/elasticity.hpp"
#include "camikit/error.hpp"
#include "camikit/extensions/builtin.hpp"
#include "camikit/formats/mha.hpp"
#include "camikit/kernel/kernel.hpp"
#include "camikit/protocol/protocol.hpp"
#include "camikit/service/service.hpp"
#include "camikit/wizard/wizard.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

namespace py = pybind11;
using namespace camikit;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
std::string dump(const json& j) { return j.dump(); }

template <typename T>
py::array volume_array(const ImageVolume& v, const std::vector<T>& data) {
  const auto& d = v.dims();
  std::vector<py::ssize_t> shape{py::ssize_t(d.nz), py::ssize_t(d.ny), py::ssize_t(d.nx)};
  return py::array_t<T>(shape, data.data());
}

template <typename T>
ImageVolume volume_from(py::array_t<T, py::array::c_style | py::array::forcecast> a, Vec3 spacing,
                        Vec3 origin) {
  if (a.ndim() != 3)
    throw Error(ErrorCode::InvalidArgument, "expected a 3-d array indexed [k, j, i]");
  const Dims dims{std::size_t(a.shape(2)), std::size_t(a.shape(1)), std::size_t(a.shape(0))};
  std::vector<T> data(a.data(), a.data() + a.size());
  return ImageVolume(dims, spacing, origin, VoxelBuffer(std::move(data)));
}

Vec3 vec3(const std::vector<double>& xs) {
  if (xs.size() != 3)
    throw Error(ErrorCode::InvalidArgument, "expected three components");
  return {xs[0], xs[1], xs[2]};
}

class PyKernel {
public:
  explicit PyKernel(bool builtin) {
    if (builtin)
      register_builtin_extensions(kernel);
  }

  Kernel kernel;
  std::unique_ptr<service::Service> server;

  std::string actions(const std::optional<std::string>& kind) const {
    std::optional<ComponentKind> k;
    if (kind) {
      k = component_kind_from_string(*kind);
      if (!k)
        throw Error(ErrorCode::InvalidArgument, "unknown kind " + *kind);
    }
    json out = json::array();
    for (const auto& d : kernel.list_actions(k))
      out.push_back(service::descriptor_json(d));
    return dump(out);
  }

  std::vector<ComponentId> apply(const std::string& name, const std::vector<ComponentId>& targets,
                                 const std::string& params_json) {
    const auto& d = kernel.describe_action(name);
    return kernel.apply_action(name, targets, params_from_json(d.parameters, json::parse(params_json)));
  }

  std::string tree() const {
    json out = json::array();
    for (const auto& c : kernel.component_tree())
      out.push_back(service::component_json(c));
    return dump(out);
  }

  py::object volume(ComponentId id) const {
    const auto p = kernel.payload(id);
    const auto* v = std::get_if<ImageVolume>(p.get());
    if (!v)
      throw Error(ErrorCode::KindMismatch, "component " + std::to_string(id) + " is not an image");
    return std::visit([&](const auto& data) -> py::object { return volume_array(*v, data); },
                      v->buffer());
  }

  py::tuple mesh(ComponentId id) const {
    const auto p = kernel.payload(id);
    const auto* m = std::get_if<SurfaceMesh>(p.get());
    if (!m)
      throw Error(ErrorCode::KindMismatch, "component " + std::to_string(id) + " is not a mesh");
    py::array_t<double> verts({py::ssize_t(m->vertices.size()), py::ssize_t(3)});
    auto vv = verts.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m->vertices.size(); ++i) {
      vv(i, 0) = m->vertices[i].x;
      vv(i, 1) = m->vertices[i].y;
      vv(i, 2) = m->vertices[i].z;
    }
    py::array_t<std::uint32_t> tris({py::ssize_t(m->triangles.size()), py::ssize_t(3)});
    auto tt = tris.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m->triangles.size(); ++i)
      for (int c = 0; c < 3; ++c)
        tt(i, c) = m->triangles[i][c];
    return py::make_tuple(verts, tris);
  }

  std::string report(ComponentId id) const {
    const auto p = kernel.payload(id);
    const auto* g = std::get_if<GenericData>(p.get());
    if (!g)
      throw Error(ErrorCode::KindMismatch, "component " + std::to_string(id) + " is not generic data");
    return g->bytes;
  }

  std::string run_pipeline(const std::string& text, const std::map<std::string, ComponentId>& bindings) {
    const auto pipeline = parse_pipeline(text);
    RunReport r;
    {
      py::gil_scoped_release release;
      r = kernel.run_pipeline(pipeline, bindings);
    }
    return dump(to_json(r));
  }

  std::string run_protocol(const std::string& xml, const std::map<std::string, ComponentId>& context,
                           const std::vector<std::string>& script, std::size_t max_steps) {
    auto h = protocol::start(kernel, protocol::parse_protocol(xml), context);
    const auto status = protocol::run_to_completion(kernel, h, script, max_steps);
    auto j = to_json(h);
    j["status"] = std::string(protocol::to_string(status));
    return dump(j);
  }

  int serve(const std::string& host, int port) {
    if (server)
      throw Error(ErrorCode::InvalidArgument, "already serving");
    server = std::make_unique<service::Service>(kernel);
    const int bound = server->bind(host, port);
    server->start();
    return bound;
  }

  void shutdown() {
    if (server) {
      server->stop();
      server.reset();
    }
  }
};

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "camikit native core";

  // leaked on purpose: the type must outlive the interpreter's module teardown
  static PyObject* error = PyErr_NewException("camikit._core.Error", PyExc_RuntimeError, nullptr);
  m.attr("Error") = py::handle(error);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p)
        std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error)(py::str(e.what()));
      inst.attr("code") = std::string(to_string(e.code()));
      inst.attr("detail") = e.detail();
      inst.attr("line") = e.line() ? py::cast(*e.line()) : py::none();
      PyErr_SetObject(error, inst.ptr());
    }
  });

  py::class_<PyKernel>(m, "Kernel")
    .def(py::init<bool>(), py::arg("builtin") = true)
    .def("actions", &PyKernel::actions, py::arg("kind") = py::none())
    .def("describe_action",
         [](const PyKernel& k, const std::string& name) {
           return dump(service::descriptor_json(k.kernel.describe_action(name)));
         })
    .def("open", [](PyKernel& k, const std::filesystem::path& p) { return k.kernel.open_component(p); })
    .def("save", [](const PyKernel& k, ComponentId id, const std::filesystem::path& p) {
      k.kernel.save_component(id, p);
    })
    .def("apply", &PyKernel::apply, py::arg("name"), py::arg("targets"), py::arg("params_json") = "{}",
         py::call_guard<py::gil_scoped_release>())
    .def("tree", &PyKernel::tree)
    .def("component",
         [](const PyKernel& k, ComponentId id) { return dump(service::component_json(k.kernel.component(id))); })
    .def("contains", [](const PyKernel& k, ComponentId id) { return k.kernel.contains(id); })
    .def("close", [](PyKernel& k, ComponentId id) { return k.kernel.close_component(id); })
    .def("volume", &PyKernel::volume)
    .def("mesh", &PyKernel::mesh)
    .def("report", &PyKernel::report)
    .def("add_volume",
         [](PyKernel& k, const std::string& name, py::array a, const std::vector<double>& spacing,
            const std::vector<double>& origin) {
           ImageVolume v;
           const auto sp = vec3(spacing), org = vec3(origin);
           if (a.dtype().is(py::dtype::of<std::uint8_t>()))
             v = volume_from<std::uint8_t>(a, sp, org);
           else if (a.dtype().is(py::dtype::of<std::int16_t>()))
             v = volume_from<std::int16_t>(a, sp, org);
           else
             v = volume_from<float>(a, sp, org);
           return k.kernel.add_component(name, std::move(v));
         },
         py::arg("name"), py::arg("array"), py::arg("spacing") = std::vector<double>{1, 1, 1},
         py::arg("origin") = std::vector<double>{0, 0, 0})
    .def("add_mesh",
         [](PyKernel& k, const std::string& name,
            py::array_t<double, py::array::c_style | py::array::forcecast> verts,
            py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> tris) {
           if (verts.ndim() != 2 || verts.shape(1) != 3 || tris.ndim() != 2 || tris.shape(1) != 3)
             throw Error(ErrorCode::InvalidArgument, "expected (n, 3) vertex and triangle arrays");
           SurfaceMesh mesh;
           auto v = verts.unchecked<2>();
           for (py::ssize_t i = 0; i < v.shape(0); ++i)
             mesh.vertices.push_back({v(i, 0), v(i, 1), v(i, 2)});
           auto t = tris.unchecked<2>();
           for (py::ssize_t i = 0; i < t.shape(0); ++i) {
             Triangle tri{};
             for (int c = 0; c < 3; ++c) {
               if (t(i, c) < 0)
                 throw Error(ErrorCode::InvalidArgument, "negative vertex index");
               tri[c] = static_cast<std::uint32_t>(t(i, c));
             }
             mesh.triangles.push_back(tri);
           }
           validate_mesh(mesh);
           return k.kernel.add_component(name, std::move(mesh));
         })
    .def("run_pipeline", &PyKernel::run_pipeline, py::arg("pipeline_json"),
         py::arg("bindings") = std::map<std::string, ComponentId>{})
    .def("run_protocol", &PyKernel::run_protocol, py::arg("protocol_xml"),
         py::arg("context") = std::map<std::string, ComponentId>{}, py::arg("script") = std::vector<std::string>{},
         py::arg("max_steps") = 100, py::call_guard<py::gil_scoped_release>())
    .def("serve", &PyKernel::serve, py::arg("host") = "127.0.0.1", py::arg("port") = 0)
    .def("shutdown", &PyKernel::shutdown);

  m.def("validate_protocol", [](const std::string& xml) {
    json out = json::array();
    for (const auto& d : protocol::validate(protocol::parse_protocol(xml)))
      out.push_back(to_json(d));
    return dump(out);
  });

  m.def("validate_manifest", [](const std::string& bytes) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& d : wizard::validate_manifest(bytes))
      out.emplace_back(d.code, d.subject);
    return out;
  });

  m.def("generate_skeleton",
        [](const std::string& kind, const std::string& name, const std::filesystem::path& dir,
           const std::string& prefix) {
          const auto k = extension_kind_from_string(kind);
          if (!k)
            throw Error(ErrorCode::InvalidArgument, "unknown kind " + kind);
          wizard::SkeletonRequest req;
          req.kind = *k;
          req.name = name;
          req.target_dir = dir;
          req.id_prefix = prefix;
          return wizard::generate_skeleton(req);
        },
        py::arg("kind"), py::arg("name"), py::arg("dir"), py::arg("prefix") = "org.example");

  m.def("estimate_elasticity",
        [](const std::vector<double>& pressures, const std::vector<double>& heights,
           const std::vector<double>& E_values, double aperture_mm, double phi) {
          const auto lib = biomech::build_library(E_values, pressures, aperture_mm, phi);
          const auto est = biomech::estimate_elasticity({pressures, heights}, lib);
          return py::make_tuple(est.E, est.residual);
        },
        py::arg("pressures"), py::arg("heights"), py::arg("E_values"), py::arg("aperture_mm") = 1.0,
        py::arg("phi") = 1.0);

  m.def("window_level", &service::window_level);
}
