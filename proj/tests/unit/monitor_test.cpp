// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "support/gen.hpp"
#include "support/oracle.hpp"
#include "warden/monitor.hpp"
#include "warden/parser.hpp"

using namespace warden;

namespace {

StateSnapshot snap_of(std::initializer_list<std::pair<const char*, Value>> kv) {
  StateSnapshot s;
  for (const auto& [k, v] : kv) s[k] = v;
  return s;
}

}  // namespace

TEST_CASE("yesterday refers to the previous position and is false at the start") {
  Monitor m(parse_invariant("IF true THEN yesterday Door.locked == true"));
  CHECK_FALSE(m.step(snap_of({{"Door.locked", Value{true}}})));   // no position before 0
  CHECK(m.step(snap_of({{"Door.locked", Value{false}}})));        // locked held at 0
  CHECK_FALSE(m.step(snap_of({{"Door.locked", Value{false}}})));  // not locked at 1
}

TEST_CASE("since holds from the anchoring position onward") {
  // alarm stays on since the breach, must hold whenever breach ever happened
  Monitor m(parse_invariant(
      "IF true THEN Siren.state == \"on\" since Window.state == \"broken\""));
  auto quiet = snap_of({{"Siren.state", Value{std::string{"off"}}},
                        {"Window.state", Value{std::string{"ok"}}}});
  auto breach_on = snap_of({{"Siren.state", Value{std::string{"on"}}},
                            {"Window.state", Value{std::string{"broken"}}}});
  auto after_on = snap_of({{"Siren.state", Value{std::string{"on"}}},
                           {"Window.state", Value{std::string{"ok"}}}});
  auto after_off = snap_of({{"Siren.state", Value{std::string{"off"}}},
                            {"Window.state", Value{std::string{"ok"}}}});

  CHECK_FALSE(m.step(quiet));     // nothing anchored the since yet
  CHECK(m.step(breach_on));       // anchor position
  CHECK(m.step(after_on));        // siren kept on
  CHECK_FALSE(m.step(after_off)); // siren dropped: since broken
  CHECK_FALSE(m.step(after_on));  // does not recover without a new anchor
  CHECK(m.step(breach_on));       // re-anchored
}

TEST_CASE("the if-condition gates the verdict position by position") {
  Monitor m(parse_invariant(
      "IF HomeMode.status != \"Home\" THEN FrontDoorLock.status == \"locked\""));
  auto home_open = snap_of({{"HomeMode.status", Value{std::string{"Home"}}},
                            {"FrontDoorLock.status", Value{std::string{"unlocked"}}}});
  auto away_open = snap_of({{"HomeMode.status", Value{std::string{"Away"}}},
                            {"FrontDoorLock.status", Value{std::string{"unlocked"}}}});
  auto away_locked = snap_of({{"HomeMode.status", Value{std::string{"Away"}}},
                              {"FrontDoorLock.status", Value{std::string{"locked"}}}});
  CHECK(m.step(home_open));    // vacuous: condition is off
  CHECK_FALSE(m.step(away_open));
  CHECK(m.step(away_locked));
}

TEST_CASE("subformula table size") {
  CHECK(Monitor(parse_invariant("IF true THEN true")).subformula_count() == 3);
  CHECK(Monitor(parse_invariant("IF a.x == 1 THEN a.y == 2")).subformula_count() == 3);
  CHECK(Monitor(parse_invariant("IF a.x == 1 THEN yesterday a.y == 2")).subformula_count() ==
        4);
  // two relationals + not + and, two relationals + yesterday + since, implies
  CHECK(Monitor(parse_invariant(
                    "IF a.x == 1 and not (a.y == 2) THEN a.p == 3 since yesterday a.q == 4"))
            .subformula_count() == 9);
}

TEST_CASE("verdict requires at least one step") {
  Monitor m(parse_invariant("IF true THEN true"));
  CHECK_THROWS_AS(m.verdict(), std::logic_error);
  m.step({});
  CHECK(m.verdict());
  CHECK(m.position() == 1);
}

TEST_CASE("unknown variables and type errors surface as EvalError") {
  Monitor m(parse_invariant("IF true THEN Door.locked == true"));
  CHECK_THROWS_AS(m.step(snap_of({{"Door.open", Value{true}}})), EvalError);
  Monitor ord(parse_invariant("IF true THEN Door.locked < 3"));
  CHECK_THROWS_AS(ord.step(snap_of({{"Door.locked", Value{true}}})), EvalError);
}

TEST_CASE("monitor agrees with the whole-history reference semantics") {
  testgen::Rng rng(987654321u);
  for (int iter = 0; iter < 400; ++iter) {
    const Invariant inv = testgen::rand_invariant(rng, 4);
    const auto trace = testgen::rand_trace(rng, 1 + static_cast<std::size_t>(
                                                      testgen::irand(rng, 0, 11)));
    CAPTURE(render_invariant(inv), trace.size(), iter);
    const std::vector<bool> got = monitor_trace(inv, trace);
    const std::vector<bool> want = oracle::verdicts(inv, trace);
    REQUIRE(got == want);
  }
}

TEST_CASE("peek matches step without committing history") {
  testgen::Rng rng(5150u);
  for (int iter = 0; iter < 100; ++iter) {
    const Invariant inv = testgen::rand_invariant(rng, 3);
    const auto trace = testgen::rand_trace(rng, 8);
    Monitor committed(inv);
    Monitor peeking(inv);
    for (const auto& snap : trace) {
      // Peeking an unrelated hypothetical state must not disturb history.
      peeking.peek(testgen::rand_snapshot(rng));
      const bool hypothetical = peeking.peek(snap);
      const bool actual = committed.step(snap);
      CHECK(hypothetical == actual);
      peeking.step(snap);
    }
    CHECK(peeking.position() == committed.position());
  }
}

TEST_CASE("memory save and restore resumes exactly") {
  testgen::Rng rng(424242u);
  for (int iter = 0; iter < 60; ++iter) {
    const Invariant inv = testgen::rand_invariant(rng, 3);
    const auto trace = testgen::rand_trace(rng, 10);
    Monitor full(inv);
    for (std::size_t i = 0; i < 5; ++i) full.step(trace[i]);

    Monitor resumed(inv);
    resumed.restore(full.memory(), full.position());
    for (std::size_t i = 5; i < trace.size(); ++i)
      CHECK(resumed.step(trace[i]) == full.step(trace[i]));
  }
}

TEST_CASE("reset starts the trace over") {
  Monitor m(parse_invariant("IF true THEN yesterday Door.locked == true"));
  auto locked = snap_of({{"Door.locked", Value{true}}});
  m.step(locked);
  m.step(locked);
  m.reset();
  CHECK(m.position() == 0);
  CHECK_FALSE(m.step(locked));  // yesterday is false again at position 0
}
