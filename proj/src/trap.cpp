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

#include <stdexcept>

#include <fmt/format.h>

#include "hyp/trap.hpp"

namespace hyp
{

namespace
{

bool
isKnownInterrupt(unsigned code)
{
  return parseInterruptCause(toString(InterruptCause(code))).has_value();
}


bool
isKnownException(unsigned code)
{
  return code < 64 and parseExceptionCause(toString(ExceptionCause(code))).has_value();
}


bool
testBit(uint64_t bitmap, unsigned index)
{
  return index < 64 and ((bitmap >> index) & 1) != 0;
}

}


Trap
Trap::exception(ExceptionCause cause, uint64_t tval, std::optional<uint64_t> gpa)
{
  if (isGuestPageFault(cause) != gpa.has_value())
    throw std::invalid_argument(fmt::format("{}: gpa payload {}", toString(cause),
                                            gpa ? "not allowed" : "required"));
  return Trap(hyp::code(cause), false, tval, gpa);
}


Trap
Trap::interrupt(InterruptCause cause)
{
  return Trap(hyp::code(cause), true, 0, std::nullopt);
}


Trap
Trap::fromXcause(uint64_t xcause, uint64_t tval, std::optional<uint64_t> gpa)
{
  auto [c, intr] = decodeCause(xcause);
  if (intr)
    {
      if (not isKnownInterrupt(c) or gpa)
        throw std::invalid_argument(fmt::format("bad interrupt xcause 0x{:x}", xcause));
      return interrupt(InterruptCause(c));
    }
  if (not isKnownException(c))
    throw std::invalid_argument(fmt::format("bad exception xcause 0x{:x}", xcause));
  return exception(ExceptionCause(c), tval, gpa);
}


std::optional<ExceptionCause>
Trap::exceptionCause() const
{
  if (interrupt_)
    return std::nullopt;
  return ExceptionCause(code_);
}


uint64_t
Trap::xcause() const
{
  return encodeCause(code_, interrupt_);
}


std::string
Trap::name() const
{
  if (interrupt_)
    return std::string(toString(InterruptCause(code_)));
  return std::string(toString(ExceptionCause(code_)));
}


DelegationRegs
DelegationRegs::capture(const CsrFile& csrs)
{
  return { csrs.peek(CsrNumber::MEDELEG), csrs.peek(CsrNumber::HEDELEG),
           csrs.peek(CsrNumber::MIDELEG), csrs.peek(CsrNumber::HIDELEG) };
}


EffectiveMode
delegateCode(PrivilegeState origin, unsigned code, bool interrupt, const DelegationRegs& deleg)
{
  uint64_t toHs = interrupt ? deleg.mideleg : deleg.medeleg;
  uint64_t toVs = interrupt ? deleg.hideleg : deleg.hedeleg;

  if (origin.base() == BaseMode::Machine or not testBit(toHs, code))
    return EffectiveMode::M;
  if (not origin.virt())
    return EffectiveMode::HS;
  return testBit(toVs, code) ? EffectiveMode::VS : EffectiveMode::HS;
}


EffectiveMode
delegate(PrivilegeState origin, const Trap& trap, const DelegationRegs& deleg)
{
  return delegateCode(origin, trap.code(), trap.isInterrupt(), deleg);
}


TrapOutcome
takeTrap(MachineState& state, const Trap& trap, uint64_t epc)
{
  auto& csrs = state.csrs;
  TrapOutcome out;
  out.origin = state.mode;
  out.target = delegate(state.mode, trap, DelegationRegs::capture(csrs));

  auto record = [&](CsrNumber n, uint64_t value) {
    out.writes.push_back({ addr(n), csrs.poke(n, value) });
  };

  uint64_t gpaShifted = trap.gpa() ? *trap.gpa() >> 2 : 0;
  bool originVirt = out.origin.virt();
  uint64_t originBase = static_cast<uint64_t>(out.origin.base());

  switch (out.target)
    {
    case EffectiveMode::M:
      {
        record(CsrNumber::MEPC, epc);
        record(CsrNumber::MCAUSE, trap.xcause());
        record(CsrNumber::MTVAL, trap.tval());
        record(CsrNumber::MTVAL2, gpaShifted);
        uint64_t ms = csrs.peek(CsrNumber::MSTATUS);
        ms = (ms & ~status::MPP) | (originBase << status::MPP_SHIFT);
        ms = originVirt ? (ms | status::MPV) : (ms & ~status::MPV);
        record(CsrNumber::MSTATUS, ms);
        out.vector = csrs.peek(CsrNumber::MTVEC) & ~uint64_t(3);
        break;
      }

    case EffectiveMode::HS:
      {
        record(CsrNumber::SEPC, epc);
        record(CsrNumber::SCAUSE, trap.xcause());
        record(CsrNumber::STVAL, trap.tval());
        record(CsrNumber::HTVAL, gpaShifted);
        uint64_t ss = csrs.peek(CsrNumber::SSTATUS);
        ss = out.origin.isUser() ? (ss & ~status::SPP) : (ss | status::SPP);
        record(CsrNumber::SSTATUS, ss);
        uint64_t hs = csrs.peek(CsrNumber::HSTATUS);
        hs = originVirt ? (hs | hstatus::SPV) : (hs & ~hstatus::SPV);
        if (originVirt)
          hs = out.origin.isUser() ? (hs & ~hstatus::SPVP) : (hs | hstatus::SPVP);
        record(CsrNumber::HSTATUS, hs);
        out.vector = csrs.peek(CsrNumber::STVEC) & ~uint64_t(3);
        break;
      }

    case EffectiveMode::VS:
      {
        // VS-level interrupts appear to the guest as their S-level codes.
        uint64_t cause = trap.xcause();
        if (trap.isInterrupt() and (trap.code() == 2 or trap.code() == 6 or trap.code() == 10))
          cause -= 1;
        record(CsrNumber::VSEPC, epc);
        record(CsrNumber::VSCAUSE, cause);
        record(CsrNumber::VSTVAL, trap.tval());
        uint64_t vs = csrs.peek(CsrNumber::VSSTATUS);
        vs = out.origin.isUser() ? (vs & ~status::SPP) : (vs | status::SPP);
        record(CsrNumber::VSSTATUS, vs);
        out.vector = csrs.peek(CsrNumber::VSTVEC) & ~uint64_t(3);
        break;
      }

    default:
      throw std::logic_error("trap delegated to a user mode");
    }

  out.newState = PrivilegeState::fromEffective(out.target);
  state.mode = out.newState;
  return out;
}


ReturnTrapped::ReturnTrapped(ExceptionCause cause)
  : std::runtime_error(fmt::format("sret intercepted: {}", toString(cause))), cause_(cause)
{
}


PrivilegeState
trapReturn(MachineState& state, EffectiveMode from)
{
  auto current = state.mode.effective();
  if (current == EffectiveMode::U or current == EffectiveMode::VU)
    throw InvalidTransition(fmt::format("no trap return from {}", toString(current)));
  if (current != from)
    throw InvalidTransition(fmt::format("trap return from {} while in {}",
                                        toString(from), toString(current)));

  auto& csrs = state.csrs;
  PrivilegeState next;

  switch (from)
    {
    case EffectiveMode::M:
      {
        uint64_t ms = csrs.peek(CsrNumber::MSTATUS);
        auto base = BaseMode((ms & status::MPP) >> status::MPP_SHIFT);
        bool virt = base != BaseMode::Machine and (ms & status::MPV) != 0;
        next = PrivilegeState(base, virt);
        csrs.poke(CsrNumber::MSTATUS, ms & ~status::MPP & ~status::MPV);
        break;
      }

    case EffectiveMode::HS:
      {
        if (csrs.peek(CsrNumber::MSTATUS) & status::TSR)
          throw ReturnTrapped(ExceptionCause::IllegalInstruction);
        uint64_t ss = csrs.peek(CsrNumber::SSTATUS);
        uint64_t hs = csrs.peek(CsrNumber::HSTATUS);
        auto base = (ss & status::SPP) ? BaseMode::Supervisor : BaseMode::User;
        next = PrivilegeState(base, (hs & hstatus::SPV) != 0);
        csrs.poke(CsrNumber::SSTATUS, ss & ~status::SPP);
        csrs.poke(CsrNumber::HSTATUS, hs & ~hstatus::SPV);
        break;
      }

    case EffectiveMode::VS:
      {
        if (csrs.peek(CsrNumber::HSTATUS) & hstatus::VTSR)
          throw ReturnTrapped(ExceptionCause::VirtualInstruction);
        uint64_t vs = csrs.peek(CsrNumber::VSSTATUS);
        auto base = (vs & status::SPP) ? BaseMode::Supervisor : BaseMode::User;
        next = PrivilegeState(base, true);
        csrs.poke(CsrNumber::VSSTATUS, vs & ~status::SPP);
        break;
      }

    default:
      throw InvalidTransition("no trap return from a user mode");
    }

  state.mode = next;
  return next;
}

}
