#pragma once

#include "camikit/biomech/evaluation.hpp"

#include <filesystem>
#include <optional>
#include <string_view>

namespace camikit::biomech {

/// A monitoring document together with the files it names.
struct Experiment {
  MonitoringSpec spec;
  PhysicalModel model;
  LoadSet loads;
  std::optional<SurfaceMesh> reference;
};

/// Parses an MML document and loads its <model>, <loads> and <reference>
/// paths relative to `base_dir`. A reference may be an OFF or OBJ mesh, or
/// a PML model whose undeformed surface is used. Throws SchemaError when no
/// model is named, IoFailure on unreadable files.
Experiment load_experiment(std::string_view mml_text, const std::filesystem::path& base_dir);
Experiment load_experiment(const std::filesystem::path& mml_path);

} // namespace camikit::biomech
