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

#include <array>
#include <utility>

#include "hyp/cause.hpp"

namespace hyp
{

namespace
{

constexpr std::array<std::pair<ExceptionCause, std::string_view>, 19> kExceptionNames = {{
  { ExceptionCause::InstructionAddressMisaligned, "InstructionAddressMisaligned" },
  { ExceptionCause::InstructionAccessFault, "InstructionAccessFault" },
  { ExceptionCause::IllegalInstruction, "IllegalInstruction" },
  { ExceptionCause::Breakpoint, "Breakpoint" },
  { ExceptionCause::LoadAddressMisaligned, "LoadAddressMisaligned" },
  { ExceptionCause::LoadAccessFault, "LoadAccessFault" },
  { ExceptionCause::StoreAmoAddressMisaligned, "StoreAmoAddressMisaligned" },
  { ExceptionCause::StoreAmoAccessFault, "StoreAmoAccessFault" },
  { ExceptionCause::EcallFromU, "EcallFromU" },
  { ExceptionCause::EcallFromHS, "EcallFromHS" },
  { ExceptionCause::EcallFromVS, "EcallFromVS" },
  { ExceptionCause::EcallFromM, "EcallFromM" },
  { ExceptionCause::InstructionPageFault, "InstructionPageFault" },
  { ExceptionCause::LoadPageFault, "LoadPageFault" },
  { ExceptionCause::StoreAmoPageFault, "StoreAmoPageFault" },
  { ExceptionCause::GuestInstructionPageFault, "GuestInstructionPageFault" },
  { ExceptionCause::GuestLoadPageFault, "GuestLoadPageFault" },
  { ExceptionCause::VirtualInstruction, "VirtualInstruction" },
  { ExceptionCause::GuestStoreAmoPageFault, "GuestStoreAmoPageFault" },
}};

constexpr std::array<std::pair<InterruptCause, std::string_view>, 10> kInterruptNames = {{
  { InterruptCause::SupervisorSoftware, "SupervisorSoftwareInterrupt" },
  { InterruptCause::VirtualSupervisorSoftware, "VirtualSupervisorSoftwareInterrupt" },
  { InterruptCause::MachineSoftware, "MachineSoftwareInterrupt" },
  { InterruptCause::SupervisorTimer, "SupervisorTimerInterrupt" },
  { InterruptCause::VirtualSupervisorTimer, "VirtualSupervisorTimerInterrupt" },
  { InterruptCause::MachineTimer, "MachineTimerInterrupt" },
  { InterruptCause::SupervisorExternal, "SupervisorExternalInterrupt" },
  { InterruptCause::VirtualSupervisorExternal, "VirtualSupervisorExternalInterrupt" },
  { InterruptCause::MachineExternal, "MachineExternalInterrupt" },
  { InterruptCause::SupervisorGuestExternal, "SupervisorGuestExternalInterrupt" },
}};

}


std::string_view
toString(ExceptionCause c)
{
  for (const auto& [cause, name] : kExceptionNames)
    if (cause == c)
      return name;
  return "UnknownException";
}


std::string_view
toString(InterruptCause c)
{
  for (const auto& [cause, name] : kInterruptNames)
    if (cause == c)
      return name;
  return "UnknownInterrupt";
}


std::string_view
toString(Access acc)
{
  switch (acc)
    {
    case Access::Fetch: return "fetch";
    case Access::Load:  return "load";
    case Access::Store: return "store";
    }
  return "?";
}


std::optional<ExceptionCause>
parseExceptionCause(std::string_view name)
{
  for (const auto& [cause, text] : kExceptionNames)
    if (text == name)
      return cause;
  return std::nullopt;
}


std::optional<InterruptCause>
parseInterruptCause(std::string_view name)
{
  for (const auto& [cause, text] : kInterruptNames)
    if (text == name)
      return cause;
  return std::nullopt;
}


std::string
causeMnemonics()
{
  std::string out;
  for (const auto& entry : kExceptionNames)
    {
      if (not out.empty())
        out += ", ";
      out += entry.second;
    }
  for (const auto& entry : kInterruptNames)
    {
      out += ", ";
      out += entry.second;
    }
  return out;
}

}
