#include "doctest.h"

#include "fixtures.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

#include "camikit/error.hpp"
#include "camikit/extensions/builtin.hpp"
#include "camikit/formats/mha.hpp"
#include "camikit/imaging/imaging.hpp"
#include "camikit/kernel/kernel.hpp"
#include "camikit/service/service.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

using namespace camikit;
using nlohmann::json;

namespace {

const std::string kData = CAMIKIT_TEST_DATA;

struct Server {
  Kernel kernel;
  service::Service svc{kernel};
  int port = 0;

  explicit Server(bool builtin = true) {
    if (builtin)
      register_builtin_extensions(kernel);
    port = svc.bind("127.0.0.1", 0);
    svc.start();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

std::string post_json(httplib::Client& c, const std::string& path, const json& j, int& status) {
  auto r = c.Post(path, j.dump(), "application/json");
  REQUIRE(r);
  status = r->status;
  return r->body;
}

// full finite range of the volume, matching the documented defaults
std::pair<double, double> default_window(const ImageVolume& v) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::isfinite(v.value(i))) {
      lo = std::min(lo, v.value(i));
      hi = std::max(hi, v.value(i));
    }
  return {hi - lo, (hi + lo) / 2};
}

} // namespace

TEST_CASE("window/level formula") {
  using service::window_level;
  CHECK(window_level(0, 100, 50) == 0);
  CHECK(window_level(100, 100, 50) == 255);
  CHECK(window_level(50, 100, 50) == 128); // 127.5 rounds away from zero
  CHECK(window_level(-1e9, 100, 50) == 0);
  CHECK(window_level(1e9, 100, 50) == 255);
  CHECK(window_level(10, 0, 10) == 255);
  CHECK(window_level(9.99, 0, 10) == 0);
  for (double x : {-3.0, 0.1, 7.7, 12.5, 200.0})
    CHECK(window_level(x, 20, 5) == oracle::window_level({x}, 20, 5)[0]);
}

TEST_CASE("http status mapping") {
  using service::http_status;
  CHECK(http_status(ErrorCode::UnknownId) == 404);
  CHECK(http_status(ErrorCode::UnknownAction) == 404);
  CHECK(http_status(ErrorCode::KindMismatch) == 409);
  CHECK(http_status(ErrorCode::ValidationFailed) == 409);
  CHECK(http_status(ErrorCode::ParamValidation) == 422);
  CHECK(http_status(ErrorCode::ActionFailure) == 500);
  CHECK(http_status(ErrorCode::MalformedPipeline) == 400);
}

TEST_CASE("default port honours CAMIKIT_PORT") {
  ::unsetenv("CAMIKIT_PORT");
  CHECK(service::default_port() == 8417);
  ::setenv("CAMIKIT_PORT", "9001", 1);
  CHECK(service::default_port() == 9001);
  ::setenv("CAMIKIT_PORT", "banana", 1);
  CHECK(service::default_port() == 8417);
  ::unsetenv("CAMIKIT_PORT");
}

TEST_CASE("components: list, open, get, delete") {
  Server s;
  auto c = s.client();
  CHECK(body(c.Get("/api/components")) == json::array());

  int status = 0;
  const auto opened = json::parse(post_json(c, "/api/components", {{"path", kData + "/cube.off"}}, status));
  CHECK(status == 201);
  CHECK(opened["kind"] == "mesh");
  CHECK(opened["id"].is_string());
  CHECK(opened["provenance"].is_null());
  const std::string id = opened["id"];

  const auto list = body(c.Get("/api/components"));
  REQUIRE(list.size() == 1);
  CHECK(list[0] == service::component_json(s.kernel.component_tree()[0]));

  const auto mesh = body(c.Get("/api/components/" + id + "/mesh"));
  CHECK(mesh == service::mesh_json(std::get<SurfaceMesh>(*s.kernel.payload(std::stoull(id)))));
  CHECK(mesh["vertices"].size() == 8);
  CHECK(mesh["triangles"].size() == 12);

  auto r = c.Delete("/api/components/" + id);
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["removed"] == json::array({id}));
  CHECK(body(c.Get("/api/components")) == json::array());

  auto missing = c.Get("/api/components/" + id);
  REQUIRE(missing);
  CHECK(missing->status == 404);
  const auto err = json::parse(missing->body);
  CHECK(err["error"] == "UnknownId");
  CHECK(err.contains("detail"));
}

TEST_CASE("error statuses") {
  Server s;
  auto c = s.client();
  const auto cube = s.kernel.open_component(kData + "/cube.off");
  const auto vol = s.kernel.add_component("v", fixtures::sphere_field(8, 3));
  int status = 0;

  post_json(c, "/api/actions/threshold",
            {{"targets", {std::to_string(cube)}}, {"params", {{"low", 0}, {"high", 1}}}}, status);
  CHECK(status == 409);
  post_json(c, "/api/actions/threshold", {{"targets", {std::to_string(vol)}}, {"params", {{"low", 0}}}},
            status);
  CHECK(status == 422);
  post_json(c, "/api/actions/no_such_action", {{"targets", json::array()}}, status);
  CHECK(status == 404);
  post_json(c, "/api/actions/threshold", {{"targets", {"99999"}}, {"params", {{"low", 0}, {"high", 1}}}},
            status);
  CHECK(status == 404);
  auto r = c.Post("/api/actions/threshold", "{not json", "application/json");
  REQUIRE(r);
  CHECK(r->status == 400);
  post_json(c, "/api/actions/crop",
            {{"targets", {std::to_string(vol)}},
             {"params", {{"i_min", 6}, {"i_max", 2}, {"j_min", 0}, {"j_max", 0}, {"k_min", 0}, {"k_max", 0}}}},
            status);
  CHECK(status == 500);
  auto png = c.Get("/api/components/" + std::to_string(cube) + "/slice?index=0");
  REQUIRE(png);
  CHECK(png->status == 409);
  auto no_index = c.Get("/api/components/" + std::to_string(vol) + "/slice?axis=axial");
  REQUIRE(no_index);
  CHECK(no_index->status == 400);
  auto wrong_axis = c.Get("/api/components/" + std::to_string(vol) + "/slice?axis=up&index=0");
  REQUIRE(wrong_axis);
  CHECK(wrong_axis->status == 400);
}

TEST_CASE("actions endpoint mirrors list_actions") {
  Server s;
  auto c = s.client();
  const auto all = body(c.Get("/api/actions"));
  CHECK(all.size() == s.kernel.list_actions().size());
  const auto meshes = body(c.Get("/api/actions?kind=mesh"));
  json expected = json::array();
  for (const auto& d : s.kernel.list_actions(ComponentKind::mesh))
    expected.push_back(service::descriptor_json(d));
  CHECK(meshes == expected);
  CHECK(body(c.Get("/api/schema")) == service::api_schema());
}

TEST_CASE("action POST creates children with provenance") {
  Server s;
  auto c = s.client();
  const auto vol = s.kernel.add_component("v", fixtures::sphere_field(8, 3));
  int status = 0;
  const auto out = json::parse(post_json(
      c, "/api/actions/threshold",
      {{"targets", {std::to_string(vol)}}, {"params", {{"low", 0.0}, {"high", 10}}}}, status));
  CHECK(status == 201);
  REQUIRE(out["produced"].size() == 1);
  const auto child = body(c.Get("/api/components/" + out["produced"][0].get<std::string>()));
  CHECK(child["parent"] == std::to_string(vol));
  CHECK(child["provenance"]["action"] == "threshold");
}

TEST_CASE("slice PNG equals extract_slice after window/level") {
  Server s;
  auto c = s.client();
  fixtures::Rng rng(61);
  for (int n = 0; n < 25; ++n) {
    const auto type = static_cast<VoxelType>(n % 3);
    const auto v = fixtures::random_volume(rng, type, 9);
    const auto id = s.kernel.add_component("v", v);
    const auto axis = static_cast<imaging::SliceAxis>(n % 3);
    const std::size_t extent = axis == imaging::SliceAxis::axial    ? v.dims().nz
                               : axis == imaging::SliceAxis::coronal ? v.dims().ny
                                                                     : v.dims().nx;
    const auto index = std::uniform_int_distribution<std::size_t>(0, extent - 1)(rng);
    std::string url = "/api/components/" + std::to_string(id) +
                      "/slice?axis=" + std::string(imaging::to_string(axis)) +
                      "&index=" + std::to_string(index);
    auto [window, level] = default_window(v);
    if (n % 2) {
      window = std::uniform_real_distribution<double>(0, 300)(rng);
      level = std::uniform_real_distribution<double>(-100, 200)(rng);
      url += "&window=" + std::to_string(window) + "&level=" + std::to_string(level);
      // the server parses what we printed
      window = std::stod(std::to_string(window));
      level = std::stod(std::to_string(level));
    }
    auto r = c.Get(url);
    REQUIRE(r);
    REQUIRE(r->status == 200);
    CHECK(r->get_header_value("Content-Type") == "image/png");

    const auto slice = imaging::extract_slice(v, axis, index);
    std::vector<double> xs;
    for (std::size_t i = 0; i < slice.width * slice.height; ++i)
      xs.push_back(buffer_value(slice.pixels, i));
    const auto decoded = oracle::decode_png(r->body);
    CHECK(decoded.width == slice.width);
    CHECK(decoded.height == slice.height);
    CHECK(decoded.bit_depth == 8);
    CHECK(decoded.color_type == 0);
    CHECK(decoded.pixels == oracle::window_level(xs, window, level));
  }
}

TEST_CASE("pipeline and protocol endpoints") {
  Server s;
  auto c = s.client();
  const auto vol = s.kernel.add_component("v", fixtures::sphere_field(12, 4));
  int status = 0;
  auto p = json::parse(fixtures::read_file(kData + "/threshold_isosurface.pipeline.json"));
  p["steps"][0]["params"] = {{"low", 0}, {"high", 100}};
  const auto report = json::parse(
      post_json(c, "/api/pipelines", {{"pipeline", p}, {"bindings", {{"volume", std::to_string(vol)}}}}, status));
  CHECK(status == 200);
  REQUIRE(report["steps"].size() == 3);
  for (const auto& st : report["steps"])
    CHECK(st["status"] == "ok");

  post_json(c, "/api/pipelines", {{"pipeline", p}, {"bindings", {{"nothing", "1"}}}}, status);
  CHECK(status == 409);

  const auto doc = fixtures::read_file(kData + "/segmentation.protocol.xml");
  const auto h = json::parse(
      post_json(c, "/api/protocols", {{"document", doc}, {"context", {{"input", std::to_string(vol)}}}}, status));
  CHECK(status == 201);
  const std::string hid = h["handle"];
  CHECK(h["current_state"] == "loaded");
  const auto e1 = json::parse(post_json(c, "/api/protocols/" + hid + "/step", {{"event", "segment"}}, status));
  CHECK(status == 200);
  CHECK(e1["state"] == "segmented");
  post_json(c, "/api/protocols/" + hid + "/step", {{"event", "bogus"}}, status);
  CHECK(status == 409);
  post_json(c, "/api/protocols/" + hid + "/step", {{"event", "reconstruct"}}, status);
  CHECK(status == 200);
  const auto now = body(c.Get("/api/protocols/" + hid));
  CHECK(now["current_state"] == "reconstructed");
  CHECK(now["trace"].size() == 2);
  post_json(c, "/api/protocols/" + hid + "/step", {{"event", "reconstruct"}}, status);
  CHECK(status == 409);
  auto gone = c.Get("/api/protocols/12345");
  REQUIRE(gone);
  CHECK(gone->status == 404);
  post_json(c, "/api/protocols", {{"document", "<protocol"}}, status);
  CHECK(status == 400);
}

TEST_CASE("16 concurrent action POSTs keep the forest") {
  Server s;
  const auto vol = s.kernel.add_component("v", fixtures::sphere_field(10, 3));
  const auto mesh = s.kernel.add_component("m", fixtures::unit_cube());
  std::vector<std::thread> threads;
  std::vector<int> statuses(16, 0);
  std::vector<std::size_t> produced(16, 0);
  for (int i = 0; i < 16; ++i)
    threads.emplace_back([&, i] {
      auto c = s.client();
      json req;
      std::string action;
      if (i % 2) {
        action = "compute_normals"; // two outputs
        req = {{"targets", {std::to_string(mesh)}}};
      } else {
        action = "threshold";
        req = {{"targets", {std::to_string(vol)}}, {"params", {{"low", -1.0 * i}, {"high", 10}}}};
      }
      auto r = c.Post("/api/actions/" + action, req.dump(), "application/json");
      if (r) {
        statuses[i] = r->status;
        produced[i] = json::parse(r->body)["produced"].size();
      }
    });
  for (auto& t : threads)
    t.join();
  std::size_t total = 2;
  for (int i = 0; i < 16; ++i) {
    CHECK(statuses[i] == 201);
    total += produced[i];
  }
  CHECK(total == 2 + 8 * 1 + 8 * 2);
  CHECK(s.kernel.component_tree().size() == total);
  CHECK(fixtures::forest_ok(s.kernel));
}

TEST_CASE("reads stay responsive during a long action") {
  Server s(false);
  Action slow;
  slow.descriptor.name = "slow";
  slow.descriptor.applies_to = {ComponentKind::generic};
  slow.descriptor.outputs = {ComponentKind::generic};
  slow.run = [](std::span<const ActionInput> in, const ParamSet&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    return std::vector<ActionOutput>{{"", *in[0].payload}};
  };
  ExtensionManifest m{"org.test.slow", ExtensionKind::action, "slow", "1.0.0", {}, {"slow"}, ""};
  s.kernel.register_extension(m, std::vector<Action>{slow});
  const auto g = s.kernel.add_component("g", GenericData{"text/plain", "x", ""});

  std::thread writer([&] {
    auto c = s.client();
    c.Post("/api/actions/slow", json{{"targets", {std::to_string(g)}}}.dump(), "application/json");
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  auto c = s.client();
  double worst = 0;
  for (int i = 0; i < 5; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = c.Get("/api/components");
    const auto ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(r);
    CHECK(r->status == 200);
    worst = std::max(worst, ms);
  }
  CHECK(worst < 100);
  writer.join();
  CHECK(s.kernel.component_tree().size() == 2);
}
