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
#include <deque>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "hyp/paging.hpp"

namespace hyp
{

  /// What a cached translation maps.
  ///   Stage1   - VA->PA with V=0, or GVA->GPA(=HPA) with V=1 and G-stage Bare.
  ///   GStage   - GPA->HPA.
  ///   Combined - GVA->HPA through both stages.
  enum class TlbKind : uint8_t { Stage1, GStage, Combined };

  std::string_view toString(TlbKind kind);

  struct TlbEntry
  {
    TlbKind kind = TlbKind::Stage1;
    uint64_t vpn = 0;          // input page number (addr >> 12), size aligned
    uint16_t asid = 0;
    uint16_t vmid = 0;
    bool virt = false;
    PageSize size = PageSize::Size4K;
    Perms perms;               // for Combined: conjunction of both stages
    uint64_t ppn = 0;          // output page number, size aligned
    bool global = false;

    bool contains(uint64_t address) const
    { return (address >> pageShift(size)) == (vpn >> (pageShift(size) - 12)); }

    uint64_t translate(uint64_t address) const
    { return (ppn << 12) | (address & (pageBytes(size) - 1)); }

    /// Entries with equal tags replace each other.
    bool sameTag(const TlbEntry& o) const
    {
      return kind == o.kind and vpn == o.vpn and size == o.size and asid == o.asid and
        vmid == o.vmid and virt == o.virt;
    }
  };

  struct TlbKey
  {
    TlbKind kind = TlbKind::Stage1;
    uint64_t address = 0;
    uint16_t asid = 0;
    uint16_t vmid = 0;
    bool virt = false;
    PermCheck check;
  };

  enum class FenceKind : uint8_t { SfenceVma, HfenceVvma, HfenceGvma };

  std::string_view toString(FenceKind kind);
  std::optional<FenceKind> parseFenceKind(std::string_view text);

  /// Fence operand naming an address space: an ASID for sfence.vma and
  /// hfence.vvma, a VMID for hfence.gvma.
  struct FenceId
  {
    enum class Space : uint8_t { Asid, Vmid };

    Space space = Space::Asid;
    uint64_t value = 0;
  };

  class InvalidFence : public std::invalid_argument
  {
  public:
    using std::invalid_argument::invalid_argument;
  };

  /// Fully associative translation cache with FIFO replacement.
  class Tlb
  {
  public:

    static constexpr size_t kDefaultCapacity = 16;

    explicit Tlb(size_t capacity = kDefaultCapacity)
      : capacity_(capacity)
    { }

    /// An entry that covers the address, carries the key's ids and
    /// admits the access. A permission mismatch is reported as a miss.
    std::optional<TlbEntry> lookup(const TlbKey& key) const;

    /// Add an entry, replacing one with the same tag or evicting the
    /// oldest when full. No-op when capacity is zero.
    void insert(const TlbEntry& entry);

    /// Invalidate matching entries and return how many were removed.
    /// An absent address or id is a wildcard. currentVmid scopes
    /// hfence.vvma to the running guest. Throws InvalidFence when the id
    /// space does not fit the fence kind or the id is out of range.
    size_t fence(FenceKind kind, std::optional<uint64_t> address,
                 std::optional<FenceId> id, uint16_t currentVmid);

    /// Whether a fence with these operands removes the entry.
    static bool fenceMatches(const TlbEntry& entry, FenceKind kind,
                             std::optional<uint64_t> address,
                             std::optional<FenceId> id, uint16_t currentVmid);

    void clear()
    { entries_.clear(); }

    const std::deque<TlbEntry>& entries() const
    { return entries_; }

    size_t size() const
    { return entries_.size(); }

    size_t capacity() const
    { return capacity_; }

  private:

    size_t capacity_;
    std::deque<TlbEntry> entries_;
  };

}
