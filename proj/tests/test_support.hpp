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
#include <functional>
#include <stdexcept>

#include "hyp/phys_mem.hpp"

namespace hyp::test
{

  // PTE bits spelled out locally so tests do not lean on the library's
  // constants.
  constexpr uint64_t kV = 1, kR = 2, kW = 4, kX = 8, kU = 16, kG = 32, kA = 64, kD = 128;

  constexpr uint64_t pteOf(uint64_t pa, uint64_t flags)
  { return ((pa >> 12) << 10) | flags; }

  constexpr uint64_t kModeSv39 = uint64_t(8) << 60;

  constexpr uint64_t atpOf(uint64_t root, uint64_t id = 0)
  { return kModeSv39 | (id << 44) | (root >> 12); }

  /// Hand-built page tables for tests. Tables are allocated upward from
  /// a host pool; guest tables are placed by the caller.
  class Tables
  {
  public:

    using ToHost = std::function<uint64_t(uint64_t)>;

    explicit Tables(SparseMemory& mem, uint64_t pool = 0x8000'0000)
      : mem_(mem), next_(pool)
    { }

    uint64_t alloc(uint64_t bytes = 0x1000)
    {
      uint64_t base = (next_ + bytes - 1) & ~(bytes - 1);
      next_ = base + bytes;
      mem_.backRange(base, bytes);
      return base;
    }

    void set(uint64_t pa, uint64_t value)
    {
      if (mem_.write64(pa, value) != MemError::None)
        throw std::runtime_error("test table write to unbacked memory");
    }

    uint64_t get(uint64_t pa) const
    {
      uint64_t v = 0;
      mem_.read64(pa, v);
      return v;
    }

    /// Map input -> output with a leaf at leafLevel. rootIndexBits is 9
    /// for Sv39 and 11 for the Sv39x4 root. Intermediate tables come from
    /// alloc (host) unless allocTable is given; table addresses go
    /// through toHost before being read or written.
    void map(uint64_t root, uint64_t input, unsigned leafLevel, uint64_t output, uint64_t flags,
             unsigned rootIndexBits = 9, ToHost toHost = {},
             std::function<uint64_t()> allocTable = {})
    {
      if (not toHost)
        toHost = [](uint64_t a) { return a; };
      if (not allocTable)
        allocTable = [this]() { return alloc(); };
      uint64_t table = root;
      for (unsigned level = 2; level > leafLevel; --level)
        {
          uint64_t slot = toHost(table) + index(input, level, rootIndexBits) * 8;
          uint64_t e = get(slot);
          if (not (e & kV))
            {
              uint64_t next = allocTable();
              set(slot, pteOf(next, kV));
              table = next;
            }
          else
            table = ((e >> 10) & ((uint64_t(1) << 44) - 1)) << 12;
        }
      set(toHost(table) + index(input, leafLevel, rootIndexBits) * 8, pteOf(output, flags));
    }

    static uint64_t index(uint64_t input, unsigned level, unsigned rootIndexBits)
    {
      unsigned bits = level == 2 ? rootIndexBits : 9;
      return (input >> (12 + 9 * level)) & ((uint64_t(1) << bits) - 1);
    }

  private:

    SparseMemory& mem_;
    uint64_t next_;
  };

}
