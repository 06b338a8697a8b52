// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "warden/registry.hpp"
#include "warden/snapshot.hpp"

namespace warden {

/// The mediator's copy of the system state. Always total over the registry:
/// it starts from declared defaults (optionally overridden by a scenario's
/// init block) and is only ever changed one accepted update at a time.
class ShadowState {
 public:
  explicit ShadowState(const DeviceRegistry& reg, const StateSnapshot& init = {})
      : snap_(reg.default_snapshot()) {
    for (const auto& [key, value] : init) {
      auto it = snap_.find(key);
      if (it == snap_.end())
        throw RegistryError("init assignment targets unknown variable " + key);
      it->second = value;
    }
  }

  const StateSnapshot& snapshot() const { return snap_; }

  void apply_update(const std::string& device, const std::string& capability,
                    const Value& value) {
    snap_[state_key(device, capability)] = value;
    seq_[state_key(device, capability)] = ++updates_;
  }

  /// Copy of the snapshot with one command's declared effect applied; the
  /// shadow itself is untouched (used for command pre-checks).
  StateSnapshot apply_command_hypothetically(const DeviceRegistry& reg,
                                             const std::string& device,
                                             const std::string& command) const {
    const CommandSpec* cmd = reg.find_command(device, command);
    if (!cmd) throw RegistryError("unknown command " + device + "." + command);
    StateSnapshot copy = snap_;
    copy[state_key(device, cmd->capability)] = cmd->value;
    return copy;
  }

  /// Monotonic per-variable update counter (0 = still at its initial value).
  std::uint64_t sequence(const std::string& key) const {
    auto it = seq_.find(key);
    return it == seq_.end() ? 0 : it->second;
  }

  std::uint64_t update_count() const { return updates_; }

 private:
  StateSnapshot snap_;
  std::unordered_map<std::string, std::uint64_t> seq_;
  std::uint64_t updates_ = 0;
};

}  // namespace warden
