// Copyright 2026 The hypsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hyp
{

  /// Base privilege level as encoded in xPP fields.
  enum class BaseMode : uint8_t { User = 0, Supervisor = 1, Machine = 3 };

  /// The five modes a hart can execute in once the hypervisor extension
  /// is present.
  enum class EffectiveMode : uint8_t { M, HS, VS, U, VU };

  /// Raised on a mode change the architecture does not allow (entering
  /// virtualization from M, returning from a mode that is not current).
  class InvalidTransition : public std::logic_error
  {
  public:
    using std::logic_error::logic_error;
  };

  /// Base privilege plus the virtualization flag V.
  class PrivilegeState
  {
  public:

    /// Defaults to machine mode, the reset state.
    constexpr PrivilegeState() = default;

    /// Throws InvalidTransition on (Machine, true).
    PrivilegeState(BaseMode base, bool virt);

    static PrivilegeState fromEffective(EffectiveMode mode);

    BaseMode base() const
    { return base_; }

    bool virt() const
    { return virt_; }

    EffectiveMode effective() const;

    bool isUser() const
    { return base_ == BaseMode::User; }

    friend bool operator==(const PrivilegeState&, const PrivilegeState&) = default;

  private:

    BaseMode base_ = BaseMode::Machine;
    bool virt_ = false;
  };

  /// HS->VS, U->VU. Throws InvalidTransition from M.
  PrivilegeState enterVirtualization(PrivilegeState state);

  /// VS->HS, VU->U. No-op when V is already clear.
  PrivilegeState leaveVirtualization(PrivilegeState state);

  /// Rank used for "never trap downward" checks: M=3, HS=2, VS=1, U/VU=0.
  /// U and VU are incomparable in the lattice but both rank lowest.
  int privilegeRank(EffectiveMode mode);

  std::string_view toString(EffectiveMode mode);
  std::string toString(PrivilegeState state);

  std::optional<EffectiveMode> parseEffectiveMode(std::string_view text);

}
