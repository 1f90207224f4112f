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
#include <string>
#include <string_view>

namespace hyp
{

  /// Synchronous exception codes as written to xcause.
  enum class ExceptionCause : uint8_t
    {
      InstructionAddressMisaligned = 0,
      InstructionAccessFault = 1,
      IllegalInstruction = 2,
      Breakpoint = 3,
      LoadAddressMisaligned = 4,
      LoadAccessFault = 5,
      StoreAmoAddressMisaligned = 6,
      StoreAmoAccessFault = 7,
      EcallFromU = 8,
      EcallFromHS = 9,
      EcallFromVS = 10,
      EcallFromM = 11,
      InstructionPageFault = 12,
      LoadPageFault = 13,
      StoreAmoPageFault = 15,
      GuestInstructionPageFault = 20,
      GuestLoadPageFault = 21,
      VirtualInstruction = 22,
      GuestStoreAmoPageFault = 23,
    };

  /// Interrupt codes (xcause with the MSB set).
  enum class InterruptCause : uint8_t
    {
      SupervisorSoftware = 1,
      VirtualSupervisorSoftware = 2,
      MachineSoftware = 3,
      SupervisorTimer = 5,
      VirtualSupervisorTimer = 6,
      MachineTimer = 7,
      SupervisorExternal = 9,
      VirtualSupervisorExternal = 10,
      MachineExternal = 11,
      SupervisorGuestExternal = 12,
    };

  enum class Access : uint8_t { Fetch, Load, Store };

  constexpr unsigned code(ExceptionCause c)
  { return static_cast<unsigned>(c); }

  constexpr unsigned code(InterruptCause c)
  { return static_cast<unsigned>(c); }

  constexpr bool isGuestPageFault(ExceptionCause c)
  {
    return c == ExceptionCause::GuestInstructionPageFault or
      c == ExceptionCause::GuestLoadPageFault or
      c == ExceptionCause::GuestStoreAmoPageFault;
  }

  constexpr ExceptionCause pageFaultFor(Access acc)
  {
    switch (acc)
      {
      case Access::Fetch: return ExceptionCause::InstructionPageFault;
      case Access::Load:  return ExceptionCause::LoadPageFault;
      case Access::Store: return ExceptionCause::StoreAmoPageFault;
      }
    return ExceptionCause::LoadPageFault;
  }

  constexpr ExceptionCause guestPageFaultFor(Access acc)
  {
    switch (acc)
      {
      case Access::Fetch: return ExceptionCause::GuestInstructionPageFault;
      case Access::Load:  return ExceptionCause::GuestLoadPageFault;
      case Access::Store: return ExceptionCause::GuestStoreAmoPageFault;
      }
    return ExceptionCause::GuestLoadPageFault;
  }

  std::string_view toString(ExceptionCause c);
  std::string_view toString(InterruptCause c);
  std::string_view toString(Access acc);

  std::optional<ExceptionCause> parseExceptionCause(std::string_view name);

  /// Interrupt mnemonics carry an "Interrupt" suffix in the DSL, e.g.
  /// "SupervisorTimerInterrupt".
  std::optional<InterruptCause> parseInterruptCause(std::string_view name);

  /// Comma separated list of every exception and interrupt mnemonic.
  std::string causeMnemonics();

}
