#include "cli.hpp"

#include "camikit/biomech/experiment.hpp"
#include "camikit/error.hpp"
#include "camikit/extensions/builtin.hpp"
#include "camikit/formats/xml.hpp"
#include "camikit/protocol/protocol.hpp"
#include "camikit/service/service.hpp"
#include "camikit/text.hpp"
#include "camikit/wizard/wizard.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace camikit::cli {

namespace {

using nlohmann::json;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

// Numbers name components in the store; anything else is opened as a file.
ComponentId resolve(Kernel& k, const std::string& target) {
  if (auto n = text::parse_int(target); n && std::to_string(*n) == target) {
    if (*n <= 0 || !k.contains(static_cast<ComponentId>(*n)))
      throw Error(ErrorCode::UnknownId, target);
    return static_cast<ComponentId>(*n);
  }
  return k.open_component(target);
}

std::map<std::string, ComponentId> parse_bindings(Kernel& k, const std::vector<std::string>& items) {
  std::map<std::string, ComponentId> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--bind", "expected name=target, got '" + item + "'");
    out[item.substr(0, eq)] = resolve(k, item.substr(eq + 1));
  }
  return out;
}

std::string id_list(const std::vector<ComponentId>& ids) {
  std::string s;
  for (auto id : ids)
    s += (s.empty() ? "" : " ") + std::to_string(id);
  return s;
}

void print_component(std::ostream& out, const json& c) {
  out << c["id"].get<std::string>() << "\t" << c["kind"].get<std::string>() << "\t"
      << c["name"].get<std::string>();
  if (c["provenance"].is_object())
    out << "\t<- " << c["provenance"]["action"].get<std::string>();
  out << "\n";
}

struct Options {
  std::vector<std::string> open;
  bool json_output = false;

  std::string info_target;
  std::string kind = "all";

  std::string action;
  std::vector<std::string> targets;
  std::vector<std::string> params;
  std::vector<std::string> save;

  std::string file;
  std::vector<std::string> bindings;
  std::string events;
  std::size_t max_steps = 1000;

  std::string mml, grid, output;

  std::string wizard_kind = "action", wizard_name, wizard_dir = ".", wizard_prefix = "org.example";
  std::string templates;

  std::string host = "127.0.0.1";
  int port = 0;
  std::string static_dir;
};

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"camikit: extensible workbench for medical images, meshes and biomechanics",
               "camikit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--open", o.open, "Open files before the command; ids start at 1");
  app.add_flag("--json", o.json_output, "Machine-readable output");

  auto* open = app.add_subcommand("open", "Open files and list the component tree");
  open->add_option("files", o.open, "Files to open")->required();

  auto* info = app.add_subcommand("info", "Describe one component");
  info->add_option("target", o.info_target, "Component id or file")->required();

  auto* actions = app.add_subcommand("actions", "List registered actions");
  actions->add_option("--kind", o.kind, "image, mesh, physical_model, generic or all")
    ->check(CLI::IsMember({"all", "image", "mesh", "physical_model", "generic"}));

  auto* apply = app.add_subcommand("apply", "Apply an action");
  apply->add_option("action", o.action, "Action name")->required();
  apply->add_option("--target,-t", o.targets, "Component id or file (repeatable)")->required();
  apply->add_option("--param,-p", o.params, "name=value (repeatable; real3 as x,y,z)");
  apply->add_option("--save", o.save, "Write produced components, in order, to these files");

  auto* pipeline = app.add_subcommand("pipeline", "Pipelines");
  pipeline->require_subcommand(1);
  auto* pipeline_run = pipeline->add_subcommand("run", "Run a pipeline file");
  pipeline_run->add_option("file", o.file, "Pipeline JSON")->required()->check(CLI::ExistingFile);
  pipeline_run->add_option("--bind", o.bindings, "name=target (repeatable)");

  auto* protocol_cmd = app.add_subcommand("protocol", "Protocol state machines");
  protocol_cmd->require_subcommand(1);
  auto* protocol_run = protocol_cmd->add_subcommand("run", "Run a protocol against an event script");
  protocol_run->add_option("file", o.file, "Protocol XML")->required()->check(CLI::ExistingFile);
  protocol_run->add_option("--events", o.events, "Comma-separated events");
  protocol_run->add_option("--bind", o.bindings, "name=target (repeatable)");
  protocol_run->add_option("--max-steps", o.max_steps, "Trace length limit")
    ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  auto* protocol_validate = protocol_cmd->add_subcommand("validate", "Static checks");
  protocol_validate->add_option("file", o.file, "Protocol XML")->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep over a monitoring document");
  sweep->add_option("mml", o.mml, "Monitoring document")->required()->check(CLI::ExistingFile);
  sweep->add_option("grid", o.grid, "Grid CSV")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", o.output, "Write the CSV here instead of stdout");

  auto* wizard = app.add_subcommand("wizard", "Extension skeletons");
  wizard->require_subcommand(1);
  auto* wizard_new = wizard->add_subcommand("new", "Generate a skeleton");
  wizard_new->add_option("--kind", o.wizard_kind, "component, action, viewer or application")
    ->check(CLI::IsMember({"component", "action", "viewer", "application"}));
  wizard_new->add_option("--name", o.wizard_name, "Extension name")->required();
  wizard_new->add_option("--dir", o.wizard_dir, "Target directory");
  wizard_new->add_option("--prefix", o.wizard_prefix, "Reverse-dot id prefix");
  wizard_new->add_option("--templates", o.templates, "Template directory");
  auto* wizard_validate = wizard->add_subcommand("validate", "Check a manifest");
  wizard_validate->add_option("file", o.file, "manifest.json")->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", o.port, "Port (default CAMIKIT_PORT or 8417)")
    ->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--static", o.static_dir, "Directory served at /");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  Kernel kernel;
  register_builtin_extensions(kernel);

  try {
    std::vector<ComponentId> opened;
    for (const auto& f : o.open)
      opened.push_back(kernel.open_component(f));

    if (*open || *info) {
      std::vector<ComponentInfo> nodes;
      if (*info)
        nodes.push_back(kernel.component(resolve(kernel, o.info_target)));
      else
        nodes = kernel.component_tree();
      json arr = json::array();
      for (const auto& n : nodes)
        arr.push_back(service::component_json(n));
      if (o.json_output)
        out << (*info ? arr[0] : arr).dump(2) << "\n";
      else if (*info)
        out << arr[0].dump(2) << "\n";
      else
        for (const auto& c : arr)
          print_component(out, c);
      return 0;
    }

    if (*actions) {
      std::optional<ComponentKind> kind;
      if (o.kind != "all")
        kind = component_kind_from_string(o.kind);
      const auto list = kernel.list_actions(kind);
      if (o.json_output) {
        json arr = json::array();
        for (const auto& d : list)
          arr.push_back(service::descriptor_json(d));
        out << arr.dump(2) << "\n";
      } else {
        for (const auto& d : list) {
          std::string kinds;
          for (auto k : d.applies_to)
            kinds += (kinds.empty() ? "" : ",") + std::string(to_string(k));
          out << d.name << "\t[" << kinds << "]\t" << d.description << "\n";
        }
      }
      return 0;
    }

    if (*apply) {
      const auto& desc = kernel.describe_action(o.action);
      ParamSet params;
      for (const auto& item : o.params) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
          err << "error: --param expects name=value, got '" << item << "'\n";
          return 2;
        }
        const auto name = item.substr(0, eq);
        auto spec = std::find_if(desc.parameters.begin(), desc.parameters.end(),
                                 [&](const ParamSpec& p) { return p.name == name; });
        if (spec == desc.parameters.end())
          throw Error(ErrorCode::ParamValidation, name + ": unknown parameter of " + o.action);
        params[name] = parse_param_text(*spec, item.substr(eq + 1));
      }
      std::vector<ComponentId> targets;
      for (const auto& t : o.targets)
        targets.push_back(resolve(kernel, t));
      const auto produced = kernel.apply_action(o.action, targets, params);
      for (std::size_t i = 0; i < o.save.size() && i < produced.size(); ++i)
        kernel.save_component(produced[i], o.save[i]);
      if (o.json_output) {
        json arr = json::array();
        for (auto id : produced)
          arr.push_back(service::component_json(kernel.component(id)));
        out << json{{"produced", arr}}.dump(2) << "\n";
      } else {
        for (auto id : produced) {
          print_component(out, service::component_json(kernel.component(id)));
          const auto p = kernel.payload(id);
          if (const auto* g = std::get_if<GenericData>(p.get()); g && g->media_type == "application/json")
            out << g->bytes;
        }
      }
      return 0;
    }

    if (*pipeline_run) {
      const auto p = parse_pipeline(slurp(o.file));
      auto bindings = parse_bindings(kernel, o.bindings);
      const auto base = std::filesystem::path(o.file).parent_path();
      for (const auto& [name, path] : p.file_bindings)
        if (!bindings.count(name)) {
          const std::filesystem::path fp(path);
          bindings[name] = kernel.open_component(fp.is_absolute() ? fp : base / fp);
        }
      const auto report = kernel.run_pipeline(p, bindings);
      if (o.json_output) {
        out << to_json(report).dump(2) << "\n";
      } else {
        for (std::size_t i = 0; i < report.steps.size(); ++i) {
          const auto& s = report.steps[i];
          out << i << "\t" << s.action << "\t" << to_string(s.status) << "\t" << s.duration_ms
              << " ms\t" << id_list(s.produced);
          if (!s.error.empty())
            out << "\t" << s.error;
          out << "\n";
        }
        out << "total\t" << report.total_duration_ms << " ms\n";
      }
      return report.ok() ? 0 : 1;
    }

    if (*protocol_validate) {
      const auto m = protocol::parse_protocol(slurp(o.file));
      const auto diags = protocol::validate(m, &kernel);
      bool errors = false;
      json arr = json::array();
      for (const auto& d : diags) {
        errors = errors || d.severity == protocol::Severity::error;
        arr.push_back(protocol::to_json(d));
        if (!o.json_output)
          out << d.str() << "\n";
      }
      if (o.json_output)
        out << arr.dump(2) << "\n";
      return errors ? 1 : 0;
    }

    if (*protocol_run) {
      const auto m = protocol::parse_protocol(slurp(o.file));
      std::vector<std::string> script;
      for (auto e : text::split(o.events, ','))
        if (!text::trim(e).empty())
          script.emplace_back(text::trim(e));
      auto context = parse_bindings(kernel, o.bindings);
      if (context.empty() && !opened.empty())
        context["input"] = opened.front();
      auto handle = protocol::start(kernel, m, std::move(context));
      const auto status = protocol::run_to_completion(kernel, handle, script, o.max_steps);
      if (o.json_output) {
        auto j = protocol::to_json(handle);
        j["status"] = protocol::to_string(status);
        out << j.dump(2) << "\n";
      } else {
        for (const auto& e : handle.trace)
          out << e.step << "\t" << (e.event.empty() ? "-" : e.event) << "\t" << e.state << "\t"
              << to_string(e.status) << (e.action ? "\t" + *e.action : "") << "\t"
              << id_list(e.produced) << (e.error.empty() ? "" : "\t" + e.error) << "\n";
        out << protocol::to_string(status) << "\t" << handle.current << "\n";
      }
      return 0;
    }

    if (*sweep) {
      const auto ex = biomech::load_experiment(std::filesystem::path(o.mml));
      const auto grid = biomech::parse_grid_csv(slurp(o.grid));
      const auto rows = biomech::sweep(ex.model, biomech::material_from(ex.model.material), ex.loads,
                                       ex.spec, grid, ex.reference ? &*ex.reference : nullptr);
      const auto csv = biomech::sweep_to_csv(grid, ex.spec, rows);
      if (!o.output.empty()) {
        std::ofstream f(o.output, std::ios::binary);
        if (!(f << csv))
          throw Error(ErrorCode::IoFailure, "cannot write " + o.output);
      } else {
        out << csv;
      }
      return 0;
    }

    if (*wizard_new) {
      wizard::SkeletonRequest req;
      req.kind = *extension_kind_from_string(o.wizard_kind);
      req.name = o.wizard_name;
      req.target_dir = o.wizard_dir;
      req.id_prefix = o.wizard_prefix;
      if (!o.templates.empty())
        req.template_dir = o.templates;
      const auto paths = wizard::generate_skeleton(req);
      if (o.json_output) {
        json arr = json::array();
        for (const auto& p : paths)
          arr.push_back(p.string());
        out << json{{"id", wizard::skeleton_manifest(req).id}, {"files", arr}}.dump(2) << "\n";
      } else {
        for (const auto& p : paths)
          out << p.string() << "\n";
      }
      return 0;
    }

    if (*wizard_validate) {
      const auto diags = wizard::validate_manifest(slurp(o.file));
      json arr = json::array();
      for (const auto& d : diags) {
        arr.push_back(d.str());
        if (!o.json_output)
          out << d.str() << "\n";
      }
      if (o.json_output)
        out << arr.dump(2) << "\n";
      return diags.empty() ? 0 : 1;
    }

    if (*serve) {
      const int port = serve->count("--port") ? o.port : service::default_port();
      service::Service svc(kernel, o.static_dir);
      const int bound = svc.bind(o.host, port);
      out << "serving on http://" << o.host << ":" << bound << "\n" << std::flush;
      svc.run();
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    if (o.json_output)
      out << json{{"error", to_string(e.code())}, {"detail", e.detail()}}.dump(2) << "\n";
    err << "error: " << to_string(e.code()) << ": " << e.detail() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

} // namespace camikit::cli
