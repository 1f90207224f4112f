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
#include <utility>
#include <vector>

#include "hyp/cause.hpp"
#include "hyp/machine_state.hpp"

namespace hyp
{

  /// A raised trap. Construct through exception() or interrupt(); the
  /// gpa payload is present exactly for guest-page faults.
  class Trap
  {
  public:

    /// Throws std::invalid_argument when gpa presence does not match
    /// the cause.
    static Trap exception(ExceptionCause cause, uint64_t tval = 0,
                          std::optional<uint64_t> gpa = std::nullopt);

    static Trap interrupt(InterruptCause cause);

    /// Rebuild from an xcause value. Throws std::invalid_argument if the
    /// code is not a known cause or a guest-page fault lacks its gpa.
    static Trap fromXcause(uint64_t xcause, uint64_t tval = 0,
                           std::optional<uint64_t> gpa = std::nullopt);

    unsigned code() const
    { return code_; }

    bool isInterrupt() const
    { return interrupt_; }

    uint64_t tval() const
    { return tval_; }

    const std::optional<uint64_t>& gpa() const
    { return gpa_; }

    std::optional<ExceptionCause> exceptionCause() const;

    /// Code with the interrupt flag in bit 63.
    uint64_t xcause() const;

    std::string name() const;

  private:

    Trap(unsigned code, bool interrupt, uint64_t tval, std::optional<uint64_t> gpa)
      : code_(code), interrupt_(interrupt), tval_(tval), gpa_(gpa)
    { }

    unsigned code_;
    bool interrupt_;
    uint64_t tval_;
    std::optional<uint64_t> gpa_;
  };

  constexpr uint64_t encodeCause(unsigned code, bool interrupt)
  { return (uint64_t(interrupt) << 63) | code; }

  constexpr std::pair<unsigned, bool> decodeCause(uint64_t xcause)
  { return { unsigned(xcause & ~(uint64_t(1) << 63)), (xcause >> 63) != 0 }; }

  struct DelegationRegs
  {
    uint64_t medeleg = 0;
    uint64_t hedeleg = 0;
    uint64_t mideleg = 0;
    uint64_t hideleg = 0;

    static DelegationRegs capture(const CsrFile& csrs);
  };

  /// Resolve the mode a trap is handled in. Pure function of the origin
  /// mode, the cause and the delegation bitmaps: a clear medeleg bit
  /// keeps the trap in M, a non-virtualized origin stops at HS, and a
  /// virtualized origin reaches VS only when hedeleg also delegates.
  /// Traps from M always stay in M.
  EffectiveMode delegate(PrivilegeState origin, const Trap& trap,
                         const DelegationRegs& deleg);

  /// delegate() on a raw cause code, including reserved codes.
  EffectiveMode delegateCode(PrivilegeState origin, unsigned code, bool interrupt,
                             const DelegationRegs& deleg);

  struct CsrUpdate
  {
    uint16_t address;
    uint64_t value;
  };

  struct TrapOutcome
  {
    PrivilegeState origin;
    EffectiveMode target = EffectiveMode::M;
    PrivilegeState newState;
    std::vector<CsrUpdate> writes;
    uint64_t vector = 0;      // xtvec base of the handler
  };

  /// Perform trap entry: write the target's epc/cause/tval and status
  /// fields and switch the mode. epc is the address of the trapping
  /// access, supplied by the caller since no instructions execute.
  TrapOutcome takeTrap(MachineState& state, const Trap& trap, uint64_t epc);

  /// Execute mret (from M) or sret (from HS or VS). from must equal the
  /// current mode. Throws InvalidTransition from U/VU or on a mismatch,
  /// and ReturnTrapped when TSR or VTSR intercepts the sret.
  PrivilegeState trapReturn(MachineState& state, EffectiveMode from);

  /// Raised by trapReturn when mstatus.TSR or hstatus.VTSR intercepts sret.
  class ReturnTrapped : public std::runtime_error
  {
  public:
    explicit ReturnTrapped(ExceptionCause cause);

    ExceptionCause cause() const
    { return cause_; }

  private:
    ExceptionCause cause_;
  };

}
