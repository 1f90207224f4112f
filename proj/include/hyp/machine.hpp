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

#include <cstddef>
#include <optional>

#include "hyp/machine_state.hpp"
#include "hyp/phys_mem.hpp"
#include "hyp/ptw.hpp"
#include "hyp/tlb.hpp"

namespace hyp
{

  struct MachineConfig
  {
    size_t tlbCapacity = Tlb::kDefaultCapacity;
    bool tlbEnabled = true;
  };

  /// Cause raised by executing a fence in the current mode, if any.
  std::optional<ExceptionCause> fenceFault(const MachineState& state, FenceKind kind);

  /// A hart with its memory and TLB. Owned by one thread at a time.
  class Machine
  {
  public:

    explicit Machine(const MachineConfig& config = {})
      : tlb(config.tlbEnabled ? config.tlbCapacity : 0), tlbEnabled_(config.tlbEnabled)
    { }

    /// Translate in the current mode, through the TLB when enabled.
    Translation translate(uint64_t va, Access access);

    /// Translate without touching the TLB.
    Translation walk(uint64_t va, Access access) const;

    /// Apply a fence. sfence.vma executed with V=1 acts as hfence.vvma.
    size_t fence(FenceKind kind, std::optional<uint64_t> address, std::optional<uint64_t> id);

    bool tlbEnabled() const
    { return tlbEnabled_; }

    MachineState state;
    SparseMemory memory;
    Tlb tlb;

  private:

    bool tlbEnabled_;
  };

}
