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

#include "hyp/cause.hpp"

namespace hyp
{

  enum class PageSize : uint8_t { Size4K = 0, Size2M = 1, Size1G = 2 };

  /// log2 of the page size in bytes.
  constexpr unsigned pageShift(PageSize size)
  { return 12 + 9 * static_cast<unsigned>(size); }

  constexpr uint64_t pageBytes(PageSize size)
  { return uint64_t(1) << pageShift(size); }

  /// Page size of a leaf found at the given walk level (0, 1 or 2).
  constexpr PageSize pageSizeAtLevel(unsigned level)
  { return PageSize(level); }

  constexpr PageSize smaller(PageSize a, PageSize b)
  { return a < b ? a : b; }

  std::string_view toString(PageSize size);
  std::optional<PageSize> parsePageSize(std::string_view text);

  /// Page-table entry bit positions.
  namespace pte
  {
    constexpr uint64_t V = 1 << 0;
    constexpr uint64_t R = 1 << 1;
    constexpr uint64_t W = 1 << 2;
    constexpr uint64_t X = 1 << 3;
    constexpr uint64_t U = 1 << 4;
    constexpr uint64_t G = 1 << 5;
    constexpr uint64_t A = 1 << 6;
    constexpr uint64_t D = 1 << 7;
    constexpr unsigned PPN_SHIFT = 10;
    constexpr uint64_t PPN_MASK = (uint64_t(1) << 44) - 1;
    constexpr unsigned RESERVED_SHIFT = 54;
  }

  /// 64-bit Sv39 page-table entry.
  struct Pte
  {
    uint64_t raw = 0;

    bool v() const { return raw & pte::V; }
    bool r() const { return raw & pte::R; }
    bool w() const { return raw & pte::W; }
    bool x() const { return raw & pte::X; }
    bool u() const { return raw & pte::U; }
    bool g() const { return raw & pte::G; }
    bool a() const { return raw & pte::A; }
    bool d() const { return raw & pte::D; }

    uint64_t ppn() const
    { return (raw >> pte::PPN_SHIFT) & pte::PPN_MASK; }

    /// Bits 63:54; must be zero without Svnapot/Svpbmt.
    uint64_t reserved() const
    { return raw >> pte::RESERVED_SHIFT; }

    bool isLeaf() const
    { return r() or w() or x(); }

    static Pte make(uint64_t ppn, uint64_t flags)
    { return Pte{ ((ppn & pte::PPN_MASK) << pte::PPN_SHIFT) | (flags & 0x3ff) }; }
  };

  /// Sv39 virtual address.
  struct VirtAddr
  {
    uint64_t raw = 0;

    unsigned vpn(unsigned level) const
    { return unsigned(raw >> (12 + 9 * level)) & 0x1ff; }

    uint64_t offset() const
    { return raw & 0xfff; }

    /// Bits 63:39 replicate bit 38.
    bool canonical() const
    {
      auto upper = int64_t(raw) >> 38;
      return upper == 0 or upper == -1;
    }
  };

  /// Sv39x4 guest-physical address: 41 bits, 11-bit root index.
  struct GuestPhysAddr
  {
    uint64_t raw = 0;

    static constexpr unsigned kBits = 41;

    unsigned index(unsigned level) const
    {
      uint64_t mask = level == 2 ? 0x7ff : 0x1ff;
      return unsigned(raw >> (12 + 9 * level)) & mask;
    }

    bool valid() const
    { return (raw >> kBits) == 0; }
  };

  struct PhysAddr
  {
    uint64_t raw = 0;

    static constexpr unsigned kBits = 56;

    bool valid() const
    { return (raw >> kBits) == 0; }

    friend bool operator==(PhysAddr, PhysAddr) = default;
  };

  /// Leaf permission bits, plus D which gates stores because the
  /// hardware never sets it.
  struct Perms
  {
    bool r = false;
    bool w = false;
    bool x = false;
    bool u = false;
    bool d = false;

    static Perms fromPte(Pte p)
    { return { p.r(), p.w(), p.x(), p.u(), p.d() }; }

    Perms operator&(const Perms& o) const
    { return { r and o.r, w and o.w, x and o.x, u and o.u, d and o.d }; }

    friend bool operator==(const Perms&, const Perms&) = default;
  };

  /// Context an access is checked under. G-stage checks use user=true.
  struct PermCheck
  {
    Access access = Access::Load;
    bool user = false;
    bool sum = false;
    bool mxr = false;
  };

  /// Whether a leaf with these permissions admits the access.
  bool permits(const Perms& perms, const PermCheck& check);

}
