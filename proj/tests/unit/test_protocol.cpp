#include "doctest.h"

#include "fixtures.hpp"
#include "scenarios.hpp"

#include "camikit/error.hpp"
#include "camikit/extensions/builtin.hpp"
#include "camikit/formats/xml.hpp"
#include "camikit/protocol/protocol.hpp"

#include <algorithm>

using namespace camikit;
using namespace camikit::protocol;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

const std::string kData = CAMIKIT_TEST_DATA;

const char* kLinear = R"(<protocol name="linear" initial="a">
  <state name="a"><transition on="ok" to="b"/></state>
  <state name="b"><transition on="ok" to="c"/></state>
  <state name="c" final="true"/>
</protocol>)";

std::vector<std::string> codes(const std::vector<protocol::Diagnostic>& d) {
  std::vector<std::string> out;
  for (const auto& x : d)
    out.push_back(x.code + (x.subject.empty() ? "" : ":" + x.subject));
  return out;
}

ImageVolume ramp() {
  return fixtures::volume_from({6, 6, 6}, VoxelType::u8,
                               [](auto i, auto j, auto k) { return double(20 * (i + j + k)); });
}

} // namespace

TEST_CASE("parse: linear machine") {
  const auto m = parse_protocol(kLinear);
  CHECK(m.states.size() == 3);
  CHECK(m.initial == "a");
  CHECK(m.find("c")->final);
  CHECK(m.target("a", "ok") == std::optional<std::string>("b"));
  CHECK_FALSE(m.target("a", "nope"));
  CHECK(parse_protocol(formats::write_xml(to_xml(m))) == m);
}

TEST_CASE("parse: structural errors") {
  CHECK(code_of([] {
          parse_protocol(R"(<protocol name="x" initial="a"><state name="a">
                            <transition on="go" to="ghost"/></state></protocol>)");
        }) == ErrorCode::SchemaError);
  CHECK(code_of([] {
          parse_protocol(R"(<protocol name="x" initial="a"><state name="a">
                            <transition on="go" to="a"/><transition on="go" to="b"/></state>
                            <state name="b" final="true"/></protocol>)");
        }) == ErrorCode::SchemaError);
  CHECK(code_of([] {
          parse_protocol(R"(<protocol name="x" initial="z"><state name="a" final="true"/></protocol>)");
        }) == ErrorCode::SchemaError);
  CHECK(code_of([] {
          parse_protocol(R"(<protocol name="x" initial="a"><state name="a" final="true">
                            <transition on="go" to="a"/></state></protocol>)");
        }) == ErrorCode::SchemaError);
  CHECK(code_of([] {
          parse_protocol(R"(<protocol name="x" initial="a"><state name="a"/><state name="a"/></protocol>)");
        }) == ErrorCode::SchemaError);
  CHECK(code_of([] { parse_protocol("<machine/>"); }) == ErrorCode::SchemaError);
}

TEST_CASE("parse: shipped segmentation protocol") {
  const auto m = parse_protocol(fixtures::read_file(kData + "/segmentation.protocol.xml"));
  REQUIRE(m.find("segmented")->invoke);
  const auto& inv = *m.find("segmented")->invoke;
  CHECK(inv.action == "threshold");
  CHECK(inv.targets == std::vector<std::string>{"input"});
  CHECK(inv.outputs == std::vector<std::string>{"mask"});
  CHECK(inv.params.size() == 2);
}

TEST_CASE("validate: examples") {
  CHECK(validate(parse_protocol(kLinear)).empty());

  const auto orphan = parse_protocol(R"(<protocol name="o" initial="a">
    <state name="a"><transition on="ok" to="b"/></state>
    <state name="b" final="true"/>
    <state name="orphan"><transition on="ok" to="b"/></state></protocol>)");
  CHECK(codes(validate(orphan)) == std::vector<std::string>{"Unreachable:orphan"});

  const auto cycle = parse_protocol(R"(<protocol name="c" initial="a">
    <state name="a"><transition on="go" to="b"/></state>
    <state name="b"><transition on="go" to="a"/></state></protocol>)");
  CHECK(codes(validate(cycle)) == std::vector<std::string>{"NoReachableFinal"});

  const auto dead = parse_protocol(R"(<protocol name="d" initial="a">
    <state name="a"><transition on="x" to="b"/><transition on="y" to="c"/></state>
    <state name="b"/>
    <state name="c" final="true"/></protocol>)");
  CHECK(codes(validate(dead)) == std::vector<std::string>{"DeadEnd:b"});
}

TEST_CASE("validate: unregistered actions are warnings") {
  Kernel k;
  register_builtin_extensions(k);
  const auto m = parse_protocol(R"(<protocol name="w" initial="a">
    <state name="a"><invoke action="teleport" target="input"/><transition on="ok" to="b"/></state>
    <state name="b" final="true"/></protocol>)");
  CHECK(validate(m).empty());
  const auto d = validate(m, &k);
  REQUIRE(d.size() == 1);
  CHECK(d[0].code == "UnregisteredAction");
  CHECK(d[0].severity == Severity::warning);
  CHECK_NOTHROW(start(k, m, {}));
}

TEST_CASE("start: examples") {
  Kernel k;
  register_builtin_extensions(k);
  const auto input = k.add_component("input", ramp());

  auto h = start(k, parse_protocol(kLinear), {});
  CHECK(h.current == "a");
  CHECK(h.trace.empty());

  const auto bound = parse_protocol(R"(<protocol name="t" initial="a">
    <state name="a"><invoke action="threshold" target="input" output="mask">
      <param name="low" value="40"/><param name="high" value="255"/></invoke>
      <transition on="ok" to="b"/></state>
    <state name="b" final="true"/></protocol>)");
  const auto before = k.component_tree().size();
  auto hb = start(k, bound, {{"input", input}});
  REQUIRE(hb.trace.size() == 1);
  CHECK(hb.trace[0].status == EntryStatus::ok);
  CHECK(hb.trace[0].produced.size() == 1);
  CHECK(hb.context.at("mask") == hb.trace[0].produced[0]);
  CHECK(k.component_tree().size() == before + 1);

  const auto orphan = parse_protocol(R"(<protocol name="o" initial="a">
    <state name="a"><transition on="ok" to="b"/></state>
    <state name="b" final="true"/><state name="orphan" final="true"/></protocol>)");
  CHECK(code_of([&] { start(k, orphan, {}); }) == ErrorCode::ValidationFailed);
}

TEST_CASE("step: examples") {
  Kernel k;
  auto h = start(k, parse_protocol(kLinear), {});
  CHECK(code_of([&] { step(k, h, "nope"); }) == ErrorCode::NoSuchTransition);
  CHECK(step(k, h, "ok").state == "b");
  CHECK(step(k, h, "ok").state == "c");
  CHECK(h.at_final());
  CHECK(h.trace.size() == 2);
  CHECK(code_of([&] { step(k, h, "ok"); }) == ErrorCode::AtFinalState);
}

TEST_CASE("step: action failure surfaces as a failure event") {
  Kernel k;
  register_builtin_extensions(k);
  const auto m = parse_protocol(fixtures::read_file(kData + "/segmentation.protocol.xml"));
  // no "input" in the context, so the threshold invocation fails
  auto h = start(k, m, {});
  const auto e = step(k, h, "segment");
  CHECK(e.status == EntryStatus::failed);
  CHECK(e.action == std::optional<std::string>("threshold"));
  CHECK(e.error.find("input") != std::string::npos);
  CHECK(h.current == "segmented");
  const auto events = h.available_events();
  REQUIRE_FALSE(events.empty());
  CHECK(events[0] == "failure");
  CHECK(step(k, h, "failure").state == "loaded");
}

TEST_CASE("step: segmentation runs to a surface") {
  Kernel k;
  register_builtin_extensions(k);
  const auto input = k.add_component("input", ramp());
  auto h = start(k, parse_protocol(fixtures::read_file(kData + "/segmentation.protocol.xml")),
                 {{"input", input}});
  CHECK(run_to_completion(k, h, {"segment", "reconstruct"}, 10) == RunStatus::completed);
  REQUIRE(h.trace.size() == 2);
  CHECK(h.trace[1].status == EntryStatus::ok);
  CHECK(k.component(h.context.at("surface")).kind == ComponentKind::mesh);
  const auto j = to_json(h);
  CHECK(j["current_state"] == "reconstructed");
  CHECK(j["trace"].size() == 2);
}

TEST_CASE("run_to_completion: examples") {
  Kernel k;
  auto h = start(k, parse_protocol(kLinear), {});
  CHECK(run_to_completion(k, h, {"ok", "ok"}, 100) == RunStatus::completed);

  auto e = start(k, parse_protocol(kLinear), {});
  CHECK(run_to_completion(k, e, {}, 100) == RunStatus::script_exhausted);
  CHECK(e.trace.empty());

  const auto loop = parse_protocol(R"(<protocol name="l" initial="a">
    <state name="a"><transition on="again" to="a"/><transition on="done" to="z"/></state>
    <state name="z" final="true"/></protocol>)");
  auto l = start(k, loop, {});
  CHECK(run_to_completion(k, l, std::vector<std::string>(50, "again"), 5) == RunStatus::step_limit);
  CHECK(l.trace.size() == 5);
  CHECK(code_of([&] { run_to_completion(k, l, {"again"}, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("trace invariants on random machines") {
  fixtures::Rng rng(41);
  Kernel k;
  register_builtin_extensions(k);
  const auto input = k.add_component("input", ramp());
  int started = 0;
  for (int n = 0; n < 300; ++n) {
    const auto m = fixtures::random_machine(rng, 6, true);
    const auto script = fixtures::random_script(rng, 8);
    const std::size_t max_steps = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    Handle h;
    try {
      h = start(k, m, {{"input", input}});
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ValidationFailed);
      continue;
    }
    ++started;
    const bool initial_entry = !h.trace.empty();
    try {
      run_to_completion(k, h, script, max_steps);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoSuchTransition);
    }
    CHECK(h.trace.size() <= std::max<std::size_t>(max_steps, initial_entry ? 1 : 0));
    // replaying the consumed events through the transition table lands on
    // the current state
    std::string state = m.initial;
    for (const auto& e : h.trace) {
      if (!e.event.empty())
        state = *m.target(state, e.event);
      CHECK(e.state == state);
    }
    CHECK(state == h.current);
    for (std::size_t i = 0; i < h.trace.size(); ++i)
      CHECK(h.trace[i].step == i);
  }
  CHECK(started > 20);
}

TEST_CASE("replay determinism") {
  fixtures::Rng rng(42);
  for (int n = 0; n < 40; ++n) {
    const auto m = fixtures::random_machine(rng, 5, true);
    const auto script = fixtures::random_script(rng, 8);
    const auto input = fixtures::random_volume(rng, VoxelType::u8, 6);
    CHECK(fixtures::replay(m, input, script, 12) == fixtures::replay(m, input, script, 12));
  }
}

TEST_CASE("validate is sound for reachability") {
  fixtures::Rng rng(43);
  std::size_t scripts = 0;
  for (int n = 0; n < 200; ++n) {
    const auto m = fixtures::random_machine(rng, 6, false);
    CHECK(fixtures::check_reachability(m, 8, scripts) == "");
  }
  CHECK(scripts > 1000);
}
