#include "camikit/formats/documents.hpp"

#include "camikit/error.hpp"
#include "camikit/text.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <set>

namespace camikit {

double tetra_signed_volume6(const Vec3& a, const Vec3& b, const Vec3& c,
                            const Vec3& d) noexcept {
  return dot(b - a, cross(c - a, d - a));
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
  case Metric::rms_displacement: return "rms_displacement";
  case Metric::max_displacement: return "max_displacement";
  case Metric::geometric_deviation: return "geometric_deviation";
  case Metric::computing_time: return "computing_time";
  }
  return "?";
}

std::optional<Metric> metric_from_string(std::string_view name) noexcept {
  for (auto m : {Metric::rms_displacement, Metric::max_displacement,
                 Metric::geometric_deviation, Metric::computing_time})
    if (to_string(m) == name)
      return m;
  return std::nullopt;
}

bool MonitoringSpec::wants(Metric m) const noexcept {
  return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
}

namespace formats {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::SchemaError, path + ": " + reason);
}

std::string element_path(const std::string& parent, const XmlNode& node, std::size_t index) {
  return parent + "/" + node.tag + "[" + std::to_string(index) + "]";
}

const std::string& require_attr(const XmlNode& node, std::string_view name,
                                const std::string& path) {
  const auto* v = node.attribute(name);
  if (!v)
    schema_error(path, "missing attribute '" + std::string(name) + "'");
  return *v;
}

double real_attr(const XmlNode& node, std::string_view name, const std::string& path) {
  const auto& raw = require_attr(node, name, path);
  auto v = text::parse_double(text::trim(raw));
  if (!v || !std::isfinite(*v))
    schema_error(path + "@" + std::string(name), "not a finite number");
  return *v;
}

std::size_t index_value(std::string_view token, const std::string& path) {
  auto v = text::parse_int(token);
  if (!v || *v < 0)
    schema_error(path, "'" + std::string(token) + "' is not a non-negative integer");
  return static_cast<std::size_t>(*v);
}

std::vector<std::size_t> id_list(const XmlNode& node, std::string_view name,
                                 const std::string& path) {
  std::vector<std::size_t> ids;
  for (auto tok : text::split_ws(require_attr(node, name, path)))
    ids.push_back(index_value(tok, path + "@" + std::string(name)));
  return ids;
}

void only_attributes(const XmlNode& node, std::initializer_list<std::string_view> allowed,
                     const std::string& path) {
  for (const auto& [key, value] : node.attributes)
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      schema_error(path, "unexpected attribute '" + key + "'");
}

void check_root(const XmlNode& root, std::string_view tag) {
  if (root.tag != tag)
    schema_error("/", "expected <" + std::string(tag) + ">, found <" + root.tag + ">");
}

XmlNode leaf(std::string tag, std::vector<std::pair<std::string, std::string>> attrs) {
  XmlNode n;
  n.tag = std::move(tag);
  n.attributes = std::move(attrs);
  return n;
}

std::string join_ids(const std::vector<std::size_t>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i)
      out += ' ';
    out += std::to_string(ids[i]);
  }
  return out;
}

constexpr std::array<std::string_view, 5> kMaterialProperties = {
  "E", "nu", "density", "spring_stiffness", "damping"};

} // namespace

PhysicalModel parse_pml(const XmlNode& root) {
  check_root(root, "physicalModel");
  const std::string base = "/physicalModel";
  PhysicalModel model;
  model.material.ref = "default";

  const XmlNode* nodes = nullptr;
  const XmlNode* elements = nullptr;
  const XmlNode* material = nullptr;
  const XmlNode* fixed = nullptr;
  for (const auto& child : root.children) {
    const XmlNode** slot = nullptr;
    if (child.tag == "nodes")
      slot = &nodes;
    else if (child.tag == "elements")
      slot = &elements;
    else if (child.tag == "material")
      slot = &material;
    else if (child.tag == "fixed")
      slot = &fixed;
    else
      schema_error(base, "unexpected element <" + child.tag + ">");
    if (*slot)
      schema_error(base, "duplicate <" + child.tag + ">");
    *slot = &child;
  }
  if (!nodes)
    schema_error(base, "missing <nodes>");

  const std::string nodes_path = base + "/nodes";
  const auto count = nodes->children.size();
  if (count == 0)
    schema_error(nodes_path, "no nodes");
  model.nodes.resize(count);
  std::vector<bool> seen(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& n = nodes->children[i];
    const auto path = element_path(nodes_path, n, i);
    if (n.tag != "node")
      schema_error(path, "expected <node>");
    only_attributes(n, {"id", "x", "y", "z"}, path);
    const auto id = index_value(text::trim(require_attr(n, "id", path)), path + "@id");
    if (id >= count)
      schema_error(path + "@id", "id out of range (node ids must be 0.." +
                                   std::to_string(count - 1) + ")");
    if (seen[id])
      schema_error(path + "@id", "duplicate node id " + std::to_string(id));
    seen[id] = true;
    model.nodes[id] = {real_attr(n, "x", path), real_attr(n, "y", path),
                       real_attr(n, "z", path)};
  }

  if (elements) {
    const std::string elem_path = base + "/elements";
    for (std::size_t i = 0; i < elements->children.size(); ++i) {
      const auto& e = elements->children[i];
      const auto path = element_path(elem_path, e, i);
      if (e.tag == "tetra") {
        only_attributes(e, {"n0", "n1", "n2", "n3"}, path);
        std::array<std::size_t, 4> t{};
        for (std::size_t c = 0; c < 4; ++c) {
          const std::string key = "n" + std::to_string(c);
          t[c] = index_value(text::trim(require_attr(e, key, path)), path + "@" + key);
          if (t[c] >= count)
            schema_error(path + "@" + key, "node index out of range");
        }
        std::set<std::size_t> distinct(t.begin(), t.end());
        if (distinct.size() != 4)
          schema_error(path, "tetra repeats a node");
        const double v6 = tetra_signed_volume6(model.nodes[t[0]], model.nodes[t[1]],
                                               model.nodes[t[2]], model.nodes[t[3]]);
        if (v6 == 0.0)
          schema_error(path, "degenerate tetra (zero volume)");
        if (v6 < 0.0)
          std::swap(t[2], t[3]);
        model.tetrahedra.push_back(t);
      } else if (e.tag == "spring") {
        only_attributes(e, {"n0", "n1"}, path);
        std::array<std::size_t, 2> s{};
        for (std::size_t c = 0; c < 2; ++c) {
          const std::string key = "n" + std::to_string(c);
          s[c] = index_value(text::trim(require_attr(e, key, path)), path + "@" + key);
          if (s[c] >= count)
            schema_error(path + "@" + key, "node index out of range");
        }
        if (s[0] == s[1])
          schema_error(path, "spring connects a node to itself");
        model.springs.push_back(s);
      } else {
        schema_error(path, "expected <tetra> or <spring>");
      }
    }
  }

  if (material) {
    const std::string path = base + "/material";
    model.material.ref = require_attr(*material, "ref", path);
    for (const auto& [key, value] : material->attributes) {
      if (key == "ref")
        continue;
      if (std::find(kMaterialProperties.begin(), kMaterialProperties.end(), key) ==
          kMaterialProperties.end())
        schema_error(path, "unknown material property '" + key + "'");
      model.material.properties.emplace_back(key, real_attr(*material, key, path));
    }
  }

  if (fixed) {
    const std::string path = base + "/fixed";
    only_attributes(*fixed, {"ids"}, path);
    auto ids = id_list(*fixed, "ids", path);
    for (auto id : ids)
      if (id >= count)
        schema_error(path + "@ids", "node " + std::to_string(id) + " out of range");
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    model.fixed_nodes = std::move(ids);
  }
  return model;
}

XmlNode to_xml(const PhysicalModel& model) {
  XmlNode root;
  root.tag = "physicalModel";
  XmlNode nodes;
  nodes.tag = "nodes";
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    const auto& p = model.nodes[i];
    nodes.children.push_back(leaf("node", {{"id", std::to_string(i)},
                                           {"x", text::format_double(p.x)},
                                           {"y", text::format_double(p.y)},
                                           {"z", text::format_double(p.z)}}));
  }
  root.children.push_back(std::move(nodes));
  XmlNode elements;
  elements.tag = "elements";
  for (const auto& t : model.tetrahedra)
    elements.children.push_back(leaf("tetra", {{"n0", std::to_string(t[0])},
                                               {"n1", std::to_string(t[1])},
                                               {"n2", std::to_string(t[2])},
                                               {"n3", std::to_string(t[3])}}));
  for (const auto& s : model.springs)
    elements.children.push_back(
      leaf("spring", {{"n0", std::to_string(s[0])}, {"n1", std::to_string(s[1])}}));
  root.children.push_back(std::move(elements));
  XmlNode material = leaf("material", {{"ref", model.material.ref}});
  for (const auto& [key, value] : model.material.properties)
    material.attributes.emplace_back(key, text::format_double(value));
  root.children.push_back(std::move(material));
  if (!model.fixed_nodes.empty())
    root.children.push_back(leaf("fixed", {{"ids", join_ids(model.fixed_nodes)}}));
  return root;
}

void check_loads(const LoadSet& loads, const PhysicalModel& model) {
  for (std::size_t i = 0; i < loads.loads.size(); ++i) {
    const auto& load = loads.loads[i];
    const auto path = "/loads/load[" + std::to_string(i) + "]";
    for (auto t : load.targets) {
      if (t >= model.nodes.size())
        schema_error(path + "@target", "node " + std::to_string(t) + " out of range");
      if (load.type == LoadType::displacement &&
          std::binary_search(model.fixed_nodes.begin(), model.fixed_nodes.end(), t))
        schema_error(path + "@target",
                     "displacement load targets fixed node " + std::to_string(t));
    }
  }
}

LoadSet parse_lml(const XmlNode& root, const PhysicalModel* model) {
  check_root(root, "loads");
  LoadSet set;
  for (std::size_t i = 0; i < root.children.size(); ++i) {
    const auto& node = root.children[i];
    const auto path = element_path("/loads", node, i);
    if (node.tag != "load")
      schema_error(path, "expected <load>");
    only_attributes(node, {"type", "target", "x", "y", "z"}, path);
    Load load;
    const auto& type = require_attr(node, "type", path);
    if (type == "force")
      load.type = LoadType::force;
    else if (type == "displacement")
      load.type = LoadType::displacement;
    else
      schema_error(path + "@type", "expected force or displacement");
    load.targets = id_list(node, "target", path);
    if (load.targets.empty())
      schema_error(path + "@target", "no target nodes");
    load.vector = {real_attr(node, "x", path), real_attr(node, "y", path),
                   real_attr(node, "z", path)};
    set.loads.push_back(std::move(load));
  }
  if (model)
    check_loads(set, *model);
  return set;
}

XmlNode to_xml(const LoadSet& loads) {
  XmlNode root;
  root.tag = "loads";
  for (const auto& load : loads.loads)
    root.children.push_back(
      leaf("load", {{"type", load.type == LoadType::force ? "force" : "displacement"},
                    {"target", join_ids(load.targets)},
                    {"x", text::format_double(load.vector.x)},
                    {"y", text::format_double(load.vector.y)},
                    {"z", text::format_double(load.vector.z)}}));
  return root;
}

MonitoringSpec parse_mml(const XmlNode& root) {
  check_root(root, "monitoring");
  MonitoringSpec spec;
  bool seen_simulation = false;
  for (std::size_t i = 0; i < root.children.size(); ++i) {
    const auto& node = root.children[i];
    const auto path = element_path("/monitoring", node, i);
    auto single_path = [&](std::optional<std::string>& slot) {
      only_attributes(node, {"path"}, path);
      if (slot)
        schema_error(path, "duplicate <" + node.tag + ">");
      slot = require_attr(node, "path", path);
      if (slot->empty())
        schema_error(path + "@path", "empty path");
    };
    if (node.tag == "metric") {
      only_attributes(node, {"name"}, path);
      const auto& name = require_attr(node, "name", path);
      auto metric = metric_from_string(name);
      if (!metric)
        schema_error(path + "@name", "unknown metric '" + name + "'");
      spec.metrics.push_back(*metric);
    } else if (node.tag == "reference") {
      single_path(spec.reference);
    } else if (node.tag == "model") {
      single_path(spec.model_path);
    } else if (node.tag == "loads") {
      single_path(spec.loads_path);
    } else if (node.tag == "simulation") {
      if (seen_simulation)
        schema_error(path, "duplicate <simulation>");
      seen_simulation = true;
      only_attributes(node, {"mode", "dt", "steps"}, path);
      if (const auto* mode = node.attribute("mode")) {
        if (*mode == "static_fem")
          spec.simulation.mode = SimulationMode::static_fem;
        else if (*mode == "dynamic_mass_spring")
          spec.simulation.mode = SimulationMode::dynamic_mass_spring;
        else
          schema_error(path + "@mode", "expected static_fem or dynamic_mass_spring");
      }
      if (node.attribute("dt")) {
        spec.simulation.dt = real_attr(node, "dt", path);
        if (!(spec.simulation.dt > 0))
          schema_error(path + "@dt", "must be positive");
      }
      if (const auto* steps = node.attribute("steps"))
        spec.simulation.steps = index_value(text::trim(*steps), path + "@steps");
    } else {
      schema_error(path, "unexpected element <" + node.tag + ">");
    }
  }
  std::sort(spec.metrics.begin(), spec.metrics.end());
  spec.metrics.erase(std::unique(spec.metrics.begin(), spec.metrics.end()),
                     spec.metrics.end());
  if (spec.metrics.empty())
    schema_error("/monitoring", "no <metric> requested");
  if (spec.wants(Metric::geometric_deviation) && !spec.reference)
    schema_error("/monitoring", "geometric_deviation requires a <reference>");
  return spec;
}

XmlNode to_xml(const MonitoringSpec& spec) {
  XmlNode root;
  root.tag = "monitoring";
  for (auto m : spec.metrics)
    root.children.push_back(leaf("metric", {{"name", std::string(to_string(m))}}));
  if (spec.reference)
    root.children.push_back(leaf("reference", {{"path", *spec.reference}}));
  if (spec.model_path)
    root.children.push_back(leaf("model", {{"path", *spec.model_path}}));
  if (spec.loads_path)
    root.children.push_back(leaf("loads", {{"path", *spec.loads_path}}));
  root.children.push_back(leaf(
    "simulation",
    {{"mode", spec.simulation.mode == SimulationMode::static_fem ? "static_fem"
                                                                 : "dynamic_mass_spring"},
     {"dt", text::format_double(spec.simulation.dt)},
     {"steps", std::to_string(spec.simulation.steps)}}));
  return root;
}

} // namespace formats
} // namespace camikit
