#pragma once

#include "fixtures.hpp"

#include "camikit/kernel/kernel.hpp"
#include "camikit/kernel/pipeline.hpp"
#include "camikit/protocol/protocol.hpp"

#include <map>
#include <string>

namespace fixtures {

/// Walks parent and child links: every parent lists the child exactly once,
/// every child points back, and no parent chain cycles.
bool forest_ok(const camikit::Kernel& kernel);

struct PipelineCase {
  camikit::Pipeline pipeline;
  std::map<std::string, camikit::Payload> initial;
};

/// 2..6 steps over the shipped imaging and mesh actions, starting from a
/// random u8 volume "v0" and a mesh "m0", with parameters drawn in range.
PipelineCase random_pipeline(Rng& rng);

/// Runs the case through run_pipeline in one kernel and through manual
/// apply_action calls in another, then compares every produced payload.
/// Returns an empty string when they agree.
std::string compare_pipeline_to_manual(const PipelineCase& c);

/// 1..max_states states named s0.., events drawn from {a, b, c, failure}.
/// With `actions`, some states invoke imaging actions on the context names
/// "input" and "mask"; some of those invocations fail by construction.
/// The result always passes check_structure but may fail validate.
camikit::protocol::Machine random_machine(Rng& rng, std::size_t max_states, bool actions);

std::vector<std::string> random_script(Rng& rng, std::size_t max_length);

/// Enumerates every script of up to `max_length` events over the machine's
/// event labels, driving the engine from the initial state. Returns a
/// description of the first script that enters a state validate() flagged
/// Unreachable, or that never reaches a state validate() left unflagged;
/// empty when validate agrees with the enumeration. `scripts` counts the
/// scripts executed.
std::string check_reachability(const camikit::protocol::Machine& m, std::size_t max_length,
                               std::size_t& scripts);

/// Runs `script` on a fresh kernel holding `input` and returns a canonical
/// rendering of the trace: states, events, statuses, and produced payload
/// bytes.
std::string replay(const camikit::protocol::Machine& m, const camikit::ImageVolume& input,
                   const std::vector<std::string>& script, std::size_t max_steps);

/// Capabilities shaped like the wizard's C++ stubs: a pass-through action,
/// a reader for the manifest's suffix, or nothing for viewers and
/// applications.
camikit::Capabilities stub_capabilities(const camikit::ExtensionManifest& manifest);

/// Random wizard-valid extension name.
std::string random_extension_name(Rng& rng);

} // namespace fixtures
