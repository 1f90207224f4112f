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
#include <string_view>
#include <vector>

#include "hyp/cause.hpp"
#include "hyp/machine_state.hpp"
#include "hyp/paging.hpp"
#include "hyp/phys_mem.hpp"
#include "hyp/tlb.hpp"
#include "hyp/trap.hpp"

namespace hyp
{

  /// Which table a walk step read: single-stage (V=0), VS-stage or G-stage.
  enum class WalkStage : uint8_t { S, VS, G };

  std::string_view toString(WalkStage stage);

  /// One physical read performed by the walker.
  struct WalkStep
  {
    WalkStage stage = WalkStage::S;
    unsigned level = 0;
    uint64_t pa = 0;
    uint64_t value = 0;

    friend bool operator==(const WalkStep&, const WalkStep&) = default;
  };

  /// Page or guest-page fault produced by translation.
  struct Fault
  {
    ExceptionCause cause = ExceptionCause::LoadPageFault;
    uint64_t tval = 0;
    std::optional<uint64_t> gpa;    // guest-page faults only

    Trap toTrap() const
    { return Trap::exception(cause, tval, gpa); }
  };

  struct WalkResult
  {
    PhysAddr pa;
    PageSize size = PageSize::Size4K;
    Perms perms;
    bool global = false;
    std::vector<WalkStep> accesses;
    std::optional<Fault> fault;

    bool ok() const
    { return not fault.has_value(); }
  };

  struct Stage1Context
  {
    bool user = false;
    bool sum = false;
    bool mxr = false;
  };

  /// Single-stage Sv39 walk rooted at atp.PPN. The caller handles Bare.
  /// Faults carry the page-fault cause of the access with tval = va.
  WalkResult walkStage1(const SparseMemory& mem, uint64_t atp, VirtAddr va,
                        Access access, const Stage1Context& ctx);

  struct GStageOptions
  {
    /// Page-table read on behalf of a VS-stage walk: checked as a load,
    /// but faults report the guest-page-fault cause of the original access.
    bool implicit = false;
    bool mxr = false;
  };

  /// Sv39x4 G-stage walk with a 16 KiB root. Every leaf must be a user
  /// page. Faults carry the guest-page-fault cause, tval = gpa and the
  /// gpa payload.
  WalkResult walkGStage(const SparseMemory& mem, uint64_t hgatp, GuestPhysAddr gpa,
                        Access access, const GStageOptions& opts = {});

  struct TlbEvent
  {
    enum class Type : uint8_t { Hit, Miss, Insert };

    Type type = Type::Miss;
    TlbKind kind = TlbKind::Stage1;
    uint64_t address = 0;
  };

  /// Outcome of a full translation in the current mode.
  struct Translation
  {
    PhysAddr pa;
    PageSize size = PageSize::Size4K;
    Perms perms;
    std::optional<uint64_t> gpa;    // intermediate address when V=1
    std::vector<WalkStep> accesses;
    std::optional<Fault> fault;
    bool tlbHit = false;
    std::vector<TlbEvent> tlbEvents;

    bool ok() const
    { return not fault.has_value(); }
  };

  /// Translate va for an access in snap.mode. V=0 uses satp; V=1 walks the
  /// VS stage through vsatp with every VS-stage PTE address and the final
  /// guest-physical address passed through the G stage. When a TLB is
  /// given it is consulted first and filled with successful results.
  Translation translate(const SparseMemory& mem, const CsrSnapshot& snap,
                        uint64_t va, Access access, Tlb* tlb = nullptr);

}
