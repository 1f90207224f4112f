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

#include "hyp/privilege.hpp"

namespace hyp
{

PrivilegeState::PrivilegeState(BaseMode base, bool virt)
  : base_(base), virt_(virt)
{
  if (base == BaseMode::Machine and virt)
    throw InvalidTransition("no virtualized machine mode");
}


PrivilegeState
PrivilegeState::fromEffective(EffectiveMode mode)
{
  switch (mode)
    {
    case EffectiveMode::M:  return PrivilegeState(BaseMode::Machine, false);
    case EffectiveMode::HS: return PrivilegeState(BaseMode::Supervisor, false);
    case EffectiveMode::VS: return PrivilegeState(BaseMode::Supervisor, true);
    case EffectiveMode::U:  return PrivilegeState(BaseMode::User, false);
    case EffectiveMode::VU: return PrivilegeState(BaseMode::User, true);
    }
  return {};
}


EffectiveMode
PrivilegeState::effective() const
{
  switch (base_)
    {
    case BaseMode::Machine:    return EffectiveMode::M;
    case BaseMode::Supervisor: return virt_ ? EffectiveMode::VS : EffectiveMode::HS;
    case BaseMode::User:       return virt_ ? EffectiveMode::VU : EffectiveMode::U;
    }
  return EffectiveMode::M;
}


PrivilegeState
enterVirtualization(PrivilegeState state)
{
  if (state.base() == BaseMode::Machine)
    throw InvalidTransition("cannot enter virtualization from M");
  return PrivilegeState(state.base(), true);
}


PrivilegeState
leaveVirtualization(PrivilegeState state)
{
  return PrivilegeState(state.base(), false);
}


int
privilegeRank(EffectiveMode mode)
{
  switch (mode)
    {
    case EffectiveMode::M:  return 3;
    case EffectiveMode::HS: return 2;
    case EffectiveMode::VS: return 1;
    case EffectiveMode::U:
    case EffectiveMode::VU: return 0;
    }
  return 0;
}


std::string_view
toString(EffectiveMode mode)
{
  switch (mode)
    {
    case EffectiveMode::M:  return "M";
    case EffectiveMode::HS: return "HS";
    case EffectiveMode::VS: return "VS";
    case EffectiveMode::U:  return "U";
    case EffectiveMode::VU: return "VU";
    }
  return "?";
}


std::string
toString(PrivilegeState state)
{
  return std::string(toString(state.effective()));
}


std::optional<EffectiveMode>
parseEffectiveMode(std::string_view text)
{
  for (auto mode : { EffectiveMode::M, EffectiveMode::HS, EffectiveMode::VS,
                     EffectiveMode::U, EffectiveMode::VU })
    if (toString(mode) == text)
      return mode;
  return std::nullopt;
}

}
