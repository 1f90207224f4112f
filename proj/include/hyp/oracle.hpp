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

// Reference models for differential testing. Nothing here calls into the
// walker, the TLB or the trap engine; only plain data types (memory
// image, CSR snapshot, cause codes) are shared.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyp/cause.hpp"
#include "hyp/machine_state.hpp"
#include "hyp/phys_mem.hpp"
#include "hyp/ptw.hpp"

namespace hyp::oracle
{

  struct OracleFault
  {
    ExceptionCause cause = ExceptionCause::LoadPageFault;
    uint64_t tval = 0;
    std::optional<uint64_t> gpa;
  };

  struct OracleRead
  {
    uint64_t pa = 0;
    uint64_t value = 0;
  };

  struct OracleResult
  {
    std::optional<uint64_t> pa;
    unsigned pageShift = 12;
    std::optional<OracleFault> fault;
    std::vector<OracleRead> reads;
  };

  /// Recursive, TLB-free re-walk of the address translation for va.
  OracleResult oracleTranslate(const SparseMemory& mem, const CsrSnapshot& csrs,
                               uint64_t va, Access access);

  struct DelegationRow
  {
    EffectiveMode origin = EffectiveMode::M;
    unsigned cause = 0;
    bool medelegBit = false;
    bool hedelegBit = false;
    EffectiveMode target = EffectiveMode::M;
  };

  /// Every (origin mode, exception code 0..23, medeleg bit, hedeleg bit)
  /// combination with its handling mode: 5 x 24 x 4 rows.
  std::vector<DelegationRow> oracleDelegationTable();

  /// Number of physical reads a translation performed.
  size_t countAccesses(const Translation& t);
  size_t countAccesses(const OracleResult& r);

  struct OracleReport
  {
    bool agree = true;
    std::string expected;
    std::string actual;
    std::string coordinates;
  };

  /// Compare a translation against the oracle on success/fault, pa or
  /// fault cause/tval/gpa, and optionally the exact list of reads.
  OracleReport compare(const Translation& actual, const OracleResult& expected,
                       bool compareReads, std::string coordinates = {});

  /// A randomized translation setup: memory image, CSRs and probe list.
  struct FuzzImage
  {
    uint64_t seed = 0;
    SparseMemory mem;
    CsrSnapshot csrs;
    std::vector<std::pair<uint64_t, Access>> probes;
    size_t pteCount = 0;
    size_t corruptedPtes = 0;
  };

  /// Build page tables for a random mode and stage configuration with
  /// mixed page sizes, then corrupt each written PTE with probability
  /// faultRate. Deterministic in seed.
  FuzzImage generateImage(uint64_t seed, size_t probeCount = 64, double faultRate = 0.2);

}
