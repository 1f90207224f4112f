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

#include "hyp/machine.hpp"

namespace hyp
{

std::optional<ExceptionCause>
fenceFault(const MachineState& state, FenceKind kind)
{
  bool sfence = kind == FenceKind::SfenceVma;
  switch (state.mode.effective())
    {
    case EffectiveMode::M:
      return std::nullopt;
    case EffectiveMode::HS:
      if (sfence and (state.csrs.peek(CsrNumber::MSTATUS) & status::TVM))
        return ExceptionCause::IllegalInstruction;
      return std::nullopt;
    case EffectiveMode::VS:
      if (not sfence or (state.csrs.peek(CsrNumber::HSTATUS) & hstatus::VTVM))
        return ExceptionCause::VirtualInstruction;
      return std::nullopt;
    case EffectiveMode::U:
      return ExceptionCause::IllegalInstruction;
    case EffectiveMode::VU:
      return ExceptionCause::VirtualInstruction;
    }
  return std::nullopt;
}


Translation
Machine::translate(uint64_t va, Access access)
{
  return hyp::translate(memory, CsrSnapshot::capture(state), va, access,
                        tlbEnabled_ ? &tlb : nullptr);
}


Translation
Machine::walk(uint64_t va, Access access) const
{
  return hyp::translate(memory, CsrSnapshot::capture(state), va, access, nullptr);
}


size_t
Machine::fence(FenceKind kind, std::optional<uint64_t> address, std::optional<uint64_t> id)
{
  if (kind == FenceKind::SfenceVma and state.mode.virt())
    kind = FenceKind::HfenceVvma;

  std::optional<FenceId> fid;
  if (id)
    fid = FenceId{ kind == FenceKind::HfenceGvma ? FenceId::Space::Vmid : FenceId::Space::Asid, *id };

  uint16_t vmid = atp::vmid(state.csrs.peek(CsrNumber::HGATP));
  return tlb.fence(kind, address, fid, vmid);
}

}
