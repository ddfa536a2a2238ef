#include "camikit/service/service.hpp"

#include "camikit/error.hpp"
#include "camikit/protocol/protocol.hpp"
#include "camikit/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

namespace camikit::service {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
  case ErrorCode::UnknownId:
  case ErrorCode::UnknownAction:
  case ErrorCode::IoFailure:
    return 404;
  case ErrorCode::KindMismatch:
  case ErrorCode::ValidationFailed:
  case ErrorCode::NoSuchTransition:
  case ErrorCode::AtFinalState:
  case ErrorCode::UnresolvedBinding:
  case ErrorCode::DuplicateId:
    return 409;
  case ErrorCode::ParamValidation:
    return 422;
  case ErrorCode::ActionFailure:
    return 500;
  default:
    return 400;
  }
}

json component_json(const ComponentInfo& info) {
  json children = json::array();
  for (auto c : info.children)
    children.push_back(std::to_string(c));
  json j{{"id", std::to_string(info.id)},
         {"name", info.name},
         {"kind", to_string(info.kind)},
         {"parent", info.parent ? json(std::to_string(*info.parent)) : json()},
         {"children", children},
         {"modified", info.modified}};
  if (info.provenance) {
    json inputs = json::array();
    for (auto id : info.provenance->inputs)
      inputs.push_back(std::to_string(id));
    j["provenance"] = {{"action", info.provenance->action},
                       {"params", to_json(info.provenance->params)},
                       {"inputs", inputs}};
  } else {
    j["provenance"] = nullptr;
  }
  struct Summary {
    json operator()(const ImageVolume& v) const {
      return {{"dims", {v.dims().nx, v.dims().ny, v.dims().nz}},
              {"spacing", {v.spacing().x, v.spacing().y, v.spacing().z}},
              {"origin", {v.origin().x, v.origin().y, v.origin().z}},
              {"voxel_type", to_string(v.voxel_type())}};
    }
    json operator()(const SurfaceMesh& m) const {
      return {{"vertex_count", m.vertices.size()},
              {"triangle_count", m.triangles.size()},
              {"has_normals", !m.normals.empty()}};
    }
    json operator()(const PhysicalModel& p) const {
      return {{"node_count", p.nodes.size()},
              {"tetra_count", p.tetrahedra.size()},
              {"spring_count", p.springs.size()},
              {"fixed_count", p.fixed_nodes.size()}};
    }
    json operator()(const GenericData& g) const {
      return {{"media_type", g.media_type}, {"size", g.bytes.size()}};
    }
  };
  j["summary"] = std::visit(Summary{}, *info.payload);
  return j;
}

json descriptor_json(const ActionDescriptor& d) {
  json kinds = json::array(), outputs = json::array(), params = json::array();
  for (auto k : d.applies_to)
    kinds.push_back(to_string(k));
  for (auto k : d.outputs)
    outputs.push_back(to_string(k));
  for (const auto& p : d.parameters)
    params.push_back(to_json(p));
  json j{{"name", d.name},         {"applies_to", kinds},       {"outputs", outputs},
         {"parameters", params},   {"category", d.category},    {"description", d.description},
         {"min_targets", d.min_targets}, {"max_targets", d.max_targets}};
  if (!d.target_kinds.empty()) {
    json tk = json::array();
    for (auto k : d.target_kinds)
      tk.push_back(to_string(k));
    j["target_kinds"] = tk;
  }
  return j;
}

json mesh_json(const SurfaceMesh& m) {
  json v = json::array(), t = json::array(), n = json::array();
  for (const auto& p : m.vertices)
    v.push_back({p.x, p.y, p.z});
  for (const auto& tri : m.triangles)
    t.push_back({tri[0], tri[1], tri[2]});
  for (const auto& p : m.normals)
    n.push_back({p.x, p.y, p.z});
  return {{"vertices", v}, {"triangles", t}, {"normals", n}};
}

json api_schema() {
  auto ep = [](const char* method, const char* path, const char* summary, json body = nullptr) {
    json e{{"method", method}, {"path", path}, {"summary", summary}};
    if (!body.is_null())
      e["body"] = std::move(body);
    return e;
  };
  return {
    {"title", "camikit workbench API"},
    {"ids", "component and protocol handle ids are decimal strings"},
    {"errors", {{"400", "malformed request"},
                {"404", "unknown id, action or file"},
                {"409", "kind mismatch or validation failure"},
                {"422", "parameter validation"},
                {"500", "wrapped action failure"},
                {"body", {{"error", "string"}, {"detail", "string"}}}}},
    {"endpoints",
     json::array({
       ep("GET", "/api/components", "component tree snapshot"),
       ep("POST", "/api/components", "open a file", {{"path", "string"}}),
       ep("GET", "/api/components/{id}", "one component"),
       ep("DELETE", "/api/components/{id}", "close a component and its subtree"),
       ep("GET", "/api/components/{id}/slice",
          "8-bit grayscale PNG; query axis=axial|coronal|sagittal, index, window, level"),
       ep("GET", "/api/components/{id}/mesh", "vertices, triangles and normals"),
       ep("GET", "/api/actions", "action descriptors; query kind"),
       ep("POST", "/api/actions/{name}", "apply an action",
          {{"targets", "[id]"}, {"params", "object"}}),
       ep("POST", "/api/pipelines", "run a pipeline",
          {{"pipeline", "object"}, {"bindings", "{name: id}"}}),
       ep("POST", "/api/protocols", "start a protocol",
          {{"document", "protocol XML"}, {"context", "{name: id}"}}),
       ep("GET", "/api/protocols/{hid}", "current state and trace"),
       ep("POST", "/api/protocols/{hid}/step", "consume one event", {{"event", "string"}}),
       ep("GET", "/api/extensions", "registered extension manifests"),
       ep("GET", "/api/schema", "this document"),
     })}};
}

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string detail;
};

[[noreturn]] void bad_request(const std::string& detail) {
  throw HttpError{400, "BadRequest", detail};
}

void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

json body_object(const httplib::Request& req) {
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    bad_request("request body must be a JSON object");
  return j;
}

ComponentId parse_id(const json& v) {
  if (v.is_number_unsigned())
    return v.get<ComponentId>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (auto n = text::parse_int(s); n && *n > 0 && std::to_string(*n) == s)
      return static_cast<ComponentId>(*n);
  }
  bad_request("invalid id " + v.dump());
}

ComponentId parse_id(const std::string& s) { return parse_id(json(s)); }

std::optional<double> query_real(const httplib::Request& req, const char* key) {
  if (!req.has_param(key))
    return std::nullopt;
  auto v = text::parse_double(req.get_param_value(key));
  if (!v)
    bad_request(std::string("query parameter ") + key + " is not a number");
  return v;
}

std::map<std::string, ComponentId> bindings_from(const json& j) {
  std::map<std::string, ComponentId> out;
  if (j.is_null())
    return out;
  if (!j.is_object())
    bad_request("bindings must be an object");
  for (const auto& [name, id] : j.items())
    out[name] = parse_id(id);
  return out;
}

} // namespace

struct Service::Impl {
  Kernel& kernel;
  httplib::Server server;
  std::thread thread;
  std::atomic<bool> bound{false};

  struct Session {
    std::mutex mutex;
    protocol::Handle handle;
  };
  std::mutex sessions_mutex;
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions;
  std::uint64_t next_session = 1;

  Impl(Kernel& k, const std::filesystem::path& static_dir) : kernel(k) {
    if (!static_dir.empty())
      server.set_mount_point("/", static_dir.string());
    routes(!static_dir.empty());
  }

  std::shared_ptr<Session> session(const std::string& id) {
    std::lock_guard lock(sessions_mutex);
    auto it = sessions.find(parse_id(id));
    if (it == sessions.end())
      throw Error(ErrorCode::UnknownId, "protocol handle " + id);
    return it->second;
  }

  // Wraps a handler so domain and request errors become {error, detail}.
  template <class F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_json(res, {{"error", e.code}, {"detail", e.detail}}, e.status);
      } catch (const Error& e) {
        send_json(res, {{"error", to_string(e.code())}, {"detail", e.detail()}},
                  http_status(e.code()));
      } catch (const json::exception& e) {
        send_json(res, {{"error", "BadRequest"}, {"detail", e.what()}}, 400);
      } catch (const std::exception& e) {
        send_json(res, {{"error", "InternalError"}, {"detail", e.what()}}, 500);
      }
    };
  }

  void routes(bool has_static) {
    auto& s = server;

    if (!has_static)
      s.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("<!doctype html><title>camikit</title>"
                        "<p>camikit workbench service. See <a href=\"/api/schema\">"
                        "/api/schema</a>.</p>\n",
                        "text/html");
      });

    s.Get("/api/schema", guarded([](const httplib::Request&, httplib::Response& res) {
            send_json(res, api_schema());
          }));

    s.Get("/api/extensions", guarded([this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& m : kernel.extensions())
              out.push_back(to_json(m));
            send_json(res, out);
          }));

    s.Get("/api/components", guarded([this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& info : kernel.component_tree())
              out.push_back(component_json(info));
            send_json(res, out);
          }));

    s.Post("/api/components", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = body_object(req);
             if (!body.contains("path") || !body["path"].is_string())
               bad_request("missing string field 'path'");
             const auto id = kernel.open_component(body["path"].get<std::string>());
             send_json(res, component_json(kernel.component(id)), 201);
           }));

    s.Get(R"(/api/components/([^/]+))",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, component_json(kernel.component(parse_id(req.matches[1].str()))));
          }));

    s.Delete(R"(/api/components/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               json removed = json::array();
               for (auto id : kernel.close_component(parse_id(req.matches[1].str())))
                 removed.push_back(std::to_string(id));
               send_json(res, {{"removed", removed}});
             }));

    s.Get(R"(/api/components/([^/]+)/slice)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto payload = kernel.payload(parse_id(req.matches[1].str()));
            const auto* volume = std::get_if<ImageVolume>(payload.get());
            if (!volume)
              throw Error(ErrorCode::KindMismatch, "component is not an image");
            const auto axis_name = req.has_param("axis") ? req.get_param_value("axis") : "axial";
            const auto axis = imaging::slice_axis_from_string(axis_name);
            if (!axis)
              bad_request("axis must be axial, coronal or sagittal");
            if (!req.has_param("index"))
              bad_request("missing query parameter index");
            const auto index = text::parse_int(req.get_param_value("index"));
            if (!index || *index < 0)
              bad_request("index must be a non-negative integer");
            const auto slice =
              imaging::extract_slice(*volume, *axis, static_cast<std::size_t>(*index));
            const auto pixels =
              slice_pixels(*volume, slice, query_real(req, "window"), query_real(req, "level"));
            res.set_content(encode_png(slice.width, slice.height, pixels), "image/png");
          }));

    s.Get(R"(/api/components/([^/]+)/mesh)",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto payload = kernel.payload(parse_id(req.matches[1].str()));
            const auto* mesh = std::get_if<SurfaceMesh>(payload.get());
            if (!mesh)
              throw Error(ErrorCode::KindMismatch, "component is not a mesh");
            send_json(res, mesh_json(*mesh));
          }));

    s.Get("/api/actions", guarded([this](const httplib::Request& req, httplib::Response& res) {
            std::optional<ComponentKind> kind;
            if (req.has_param("kind") && req.get_param_value("kind") != "all") {
              kind = component_kind_from_string(req.get_param_value("kind"));
              if (!kind)
                bad_request("unknown component kind " + req.get_param_value("kind"));
            }
            json out = json::array();
            for (const auto& d : kernel.list_actions(kind))
              out.push_back(descriptor_json(d));
            send_json(res, out);
          }));

    s.Post(R"(/api/actions/([^/]+))",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto name = req.matches[1].str();
             const auto& desc = kernel.describe_action(name);
             const auto body = body_object(req);
             std::vector<ComponentId> targets;
             if (!body.contains("targets") || !body["targets"].is_array())
               bad_request("missing array field 'targets'");
             for (const auto& t : body["targets"])
               targets.push_back(parse_id(t));
             ParamSet params;
             if (body.contains("params")) {
               if (!body["params"].is_object())
                 bad_request("params must be an object");
               params = params_from_json(desc.parameters, body["params"]);
             }
             json produced = json::array();
             for (auto id : kernel.apply_action(name, targets, params))
               produced.push_back(std::to_string(id));
             send_json(res, {{"produced", produced}}, 201);
           }));

    s.Post("/api/pipelines", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = body_object(req);
             if (!body.contains("pipeline") || !body["pipeline"].is_object())
               bad_request("missing object field 'pipeline'");
             const auto pipeline = parse_pipeline(body["pipeline"].dump());
             auto bindings = bindings_from(body.value("bindings", json()));
             for (const auto& [name, path] : pipeline.file_bindings)
               if (!bindings.count(name))
                 bindings[name] = kernel.open_component(path);
             send_json(res, to_json(kernel.run_pipeline(pipeline, bindings)));
           }));

    s.Post("/api/protocols", guarded([this](const httplib::Request& req, httplib::Response& res) {
             const auto body = body_object(req);
             if (!body.contains("document") || !body["document"].is_string())
               bad_request("missing string field 'document'");
             const auto machine = protocol::parse_protocol(body["document"].get<std::string>());
             auto context = bindings_from(body.value("context", json()));
             auto session = std::make_shared<Session>();
             session->handle = protocol::start(kernel, machine, std::move(context));
             std::uint64_t id;
             {
               std::lock_guard lock(sessions_mutex);
               id = next_session++;
               sessions[id] = session;
             }
             std::lock_guard lock(session->mutex);
             auto j = protocol::to_json(session->handle);
             j["handle"] = std::to_string(id);
             send_json(res, j, 201);
           }));

    s.Get(R"(/api/protocols/([^/]+))",
          guarded([this](const httplib::Request& req, httplib::Response& res) {
            auto sess = session(req.matches[1].str());
            std::lock_guard lock(sess->mutex);
            auto j = protocol::to_json(sess->handle);
            j["handle"] = req.matches[1].str();
            send_json(res, j);
          }));

    s.Post(R"(/api/protocols/([^/]+)/step)",
           guarded([this](const httplib::Request& req, httplib::Response& res) {
             auto sess = session(req.matches[1].str());
             const auto body = body_object(req);
             if (!body.contains("event") || !body["event"].is_string())
               bad_request("missing string field 'event'");
             std::lock_guard lock(sess->mutex);
             send_json(res, protocol::to_json(
                              protocol::step(kernel, sess->handle, body["event"].get<std::string>())));
           }));
  }
};

Service::Service(Kernel& kernel, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(kernel, static_dir)) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0)
    bound = impl_->server.bind_to_any_port(host);
  else if (!impl_->server.bind_to_port(host, port))
    bound = -1;
  if (bound <= 0)
    throw Error(ErrorCode::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void Service::run() {
  if (!impl_->bound)
    throw Error(ErrorCode::InvalidArgument, "bind() before run()");
  impl_->server.listen_after_bind();
}

void Service::start() {
  if (!impl_->bound)
    throw Error(ErrorCode::InvalidArgument, "bind() before start()");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable())
    impl_->thread.join();
}

} // namespace camikit::service
