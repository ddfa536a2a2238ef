#pragma once

#include "camikit/kernel/kernel.hpp"

namespace camikit {

/// Registers the shipped component, action, viewer and application
/// extensions.
void register_builtin_extensions(Kernel& kernel);

namespace extensions {

std::vector<ComponentFormat> file_formats();
std::vector<Action> imaging_actions();
std::vector<Action> mesh_actions();
std::vector<Action> biomech_actions();

} // namespace extensions
} // namespace camikit
