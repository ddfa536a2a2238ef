#include "camikit/biomech/experiment.hpp"

#include "camikit/error.hpp"
#include "camikit/formats/mesh_io.hpp"
#include "camikit/formats/xml.hpp"
#include "camikit/text.hpp"

#include <fstream>
#include <sstream>

namespace camikit::biomech {

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

} // namespace

Experiment load_experiment(std::string_view mml_text, const std::filesystem::path& base_dir) {
  Experiment ex;
  ex.spec = formats::parse_mml(formats::parse_xml(mml_text));
  if (!ex.spec.model_path)
    throw Error(ErrorCode::SchemaError, "/monitoring: no <model> named");
  ex.model = formats::parse_pml(formats::parse_xml(slurp(resolve(base_dir, *ex.spec.model_path))));
  if (ex.spec.loads_path)
    ex.loads = formats::parse_lml(
      formats::parse_xml(slurp(resolve(base_dir, *ex.spec.loads_path))), &ex.model);
  if (ex.spec.reference) {
    const auto path = resolve(base_dir, *ex.spec.reference);
    const auto name = path.filename().string();
    const auto bytes = slurp(path);
    if (text::ends_with_ci(name, ".off"))
      ex.reference = formats::parse_off(bytes);
    else if (text::ends_with_ci(name, ".obj"))
      ex.reference = formats::parse_obj(bytes);
    else if (text::ends_with_ci(name, ".pml"))
      ex.reference = model_surface(formats::parse_pml(formats::parse_xml(bytes)));
    else
      throw Error(ErrorCode::SchemaError,
                  "/monitoring/reference: unsupported reference file " + name);
  }
  return ex;
}

Experiment load_experiment(const std::filesystem::path& mml_path) {
  return load_experiment(slurp(mml_path), mml_path.parent_path());
}

} // namespace camikit::biomech
