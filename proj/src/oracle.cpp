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

// Written against the privileged architecture text directly, as a
// recursive definition. Deliberately shares no code with ptw.cpp.

#include <algorithm>

#include <fmt/format.h>

#include "hyp/oracle.hpp"

namespace hyp::oracle
{

namespace
{

constexpr uint64_t kPpnBits = 44;

uint64_t
field(uint64_t value, unsigned lo, unsigned width)
{
  return (value >> lo) & ((uint64_t(1) << width) - 1);
}


// Walk environment shared by the recursive steps.
struct Env
{
  const SparseMemory& mem;
  const CsrSnapshot& csrs;
  uint64_t va;
  Access access;
  bool twoStage;
  std::vector<OracleRead>& reads;
  std::optional<OracleFault> fault;
};


struct Leaf
{
  uint64_t out = 0;
  unsigned shift = 12;
};


bool
leafAllows(uint64_t e, Access acc, bool user, bool sum, bool mxr)
{
  bool R = field(e, 1, 1), W = field(e, 2, 1), X = field(e, 3, 1);
  bool U = field(e, 4, 1), D = field(e, 7, 1);

  if (user)
    {
      if (not U)
        return false;
    }
  else if (U)
    {
      if (acc == Access::Fetch)
        return false;
      if (not sum)
        return false;
    }

  if (acc == Access::Fetch)
    return X;
  if (acc == Access::Load)
    return R or (mxr and X);
  return W and D;
}


// Checks shared by both stages for the entry read at `level`. Returns
// 0 = bad entry, 1 = pointer to next level, 2 = leaf.
int
classify(uint64_t e, unsigned level)
{
  bool V = field(e, 0, 1), R = field(e, 1, 1), W = field(e, 2, 1), X = field(e, 3, 1);
  if (not V or field(e, 54, 10) != 0 or (W and not R))
    return 0;
  if (not R and not X)
    return level == 0 ? 0 : 1;
  return 2;
}


// G stage, recursively from `level`. A false return means fault.
bool
gLevel(Env& env, uint64_t gpa, bool implicit, unsigned level, uint64_t table, Leaf& leaf)
{
  unsigned indexBits = level == 2 ? 11 : 9;
  uint64_t slot = table + 8 * field(gpa, 12 + 9 * level, indexBits);
  uint64_t e = 0;
  if (env.mem.read64(slot, e) != MemError::None)
    return false;
  env.reads.push_back({ slot, e });

  int kind = classify(e, level);
  if (kind == 0)
    return false;
  uint64_t ppn = field(e, 10, kPpnBits);
  if (kind == 1)
    return gLevel(env, gpa, implicit, level - 1, ppn << 12, leaf);

  bool mxr = field(env.csrs.mstatus, 19, 1);
  Access acc = implicit ? Access::Load : env.access;
  if (not field(e, 6, 1) or not leafAllows(e, acc, true, false, mxr))
    return false;
  if (level > 0 and field(ppn, 0, 9 * level) != 0)
    return false;

  leaf.shift = 12 + 9 * level;
  leaf.out = (ppn << 12) + field(gpa, 0, leaf.shift);
  return true;
}


// GPA -> HPA, recording a guest-page fault in env on failure.
bool
gTranslate(Env& env, uint64_t gpa, bool implicit, Leaf& leaf)
{
  if (not env.twoStage or field(env.csrs.hgatp, 60, 4) == 0)
    {
      leaf.out = gpa;
      leaf.shift = 64;
      return true;
    }

  bool ok = (gpa >> 41) == 0 and
    gLevel(env, gpa, implicit, 2, field(env.csrs.hgatp, 0, kPpnBits) << 12, leaf);
  if (not ok)
    env.fault = OracleFault{ guestPageFaultFor(env.access), env.va, gpa };
  return ok;
}


// First stage (S or VS), recursively from `level`. Table addresses are
// guest-physical when two-stage.
bool
firstLevel(Env& env, uint64_t rootOrTable, unsigned level, Leaf& leaf)
{
  auto pageFault = [&]() {
    env.fault = OracleFault{ pageFaultFor(env.access), env.va, std::nullopt };
    return false;
  };

  uint64_t slotGpa = rootOrTable + 8 * field(env.va, 12 + 9 * level, 9);
  Leaf where;
  if (not gTranslate(env, slotGpa, true, where))
    return false;

  uint64_t e = 0;
  if (env.mem.read64(where.out, e) != MemError::None)
    return pageFault();
  env.reads.push_back({ where.out, e });

  int kind = classify(e, level);
  if (kind == 0)
    return pageFault();
  uint64_t ppn = field(e, 10, kPpnBits);
  if (kind == 1)
    return firstLevel(env, ppn << 12, level - 1, leaf);

  const auto& c = env.csrs;
  bool user = c.mode.base() == BaseMode::User;
  bool sum, mxr;
  if (env.twoStage)
    {
      sum = field(c.vsstatus, 18, 1);
      mxr = field(c.vsstatus, 19, 1) or field(c.mstatus, 19, 1);
    }
  else
    {
      sum = field(c.mstatus, 18, 1);
      mxr = field(c.mstatus, 19, 1);
    }

  if (not field(e, 6, 1) or not leafAllows(e, env.access, user, sum, mxr))
    return pageFault();
  if (level > 0 and field(ppn, 0, 9 * level) != 0)
    return pageFault();

  leaf.shift = 12 + 9 * level;
  leaf.out = (ppn << 12) + field(env.va, 0, leaf.shift);
  return true;
}


std::string
describe(const std::optional<uint64_t>& pa, const std::optional<OracleFault>& f)
{
  if (f)
    return fmt::format("fault {} tval=0x{:x} gpa={}", toString(f->cause), f->tval,
                       f->gpa ? fmt::format("0x{:x}", *f->gpa) : "-");
  return fmt::format("pa=0x{:x}", pa.value_or(0));
}

}


OracleResult
oracleTranslate(const SparseMemory& mem, const CsrSnapshot& csrs, uint64_t va, Access access)
{
  OracleResult result;
  Env env{ mem, csrs, va, access, csrs.mode.virt(), result.reads, std::nullopt };

  if (csrs.mode.base() == BaseMode::Machine)
    {
      result.pa = va;
      return result;
    }

  uint64_t firstAtp = env.twoStage ? csrs.vsatp : csrs.satp;
  bool firstOn = field(firstAtp, 60, 4) == 8;

  Leaf first;
  if (firstOn)
    {
      int64_t upper = int64_t(va) >> 38;
      if (upper != 0 and upper != -1)
        {
          result.fault = OracleFault{ pageFaultFor(access), va, std::nullopt };
          return result;
        }
      if (not firstLevel(env, field(firstAtp, 0, kPpnBits) << 12, 2, first))
        {
          result.fault = env.fault;
          return result;
        }
    }
  else
    {
      first.out = va;
      first.shift = 64;
    }

  Leaf second;
  if (not gTranslate(env, first.out, false, second))
    {
      result.fault = env.fault;
      return result;
    }

  result.pa = second.out;
  result.pageShift = std::min({ first.shift, second.shift, 30u });
  if (not firstOn and second.shift == 64)
    result.pageShift = 12;
  return result;
}


std::vector<DelegationRow>
oracleDelegationTable()
{
  // Candidate handlers from least to most privileged. A trap goes to the
  // first candidate it is delegated to whose privilege is not below the
  // origin's.
  auto rank = [](EffectiveMode m) {
    switch (m)
      {
      case EffectiveMode::M:  return 3;
      case EffectiveMode::HS: return 2;
      case EffectiveMode::VS: return 1;
      default:                return 0;
      }
  };

  std::vector<DelegationRow> rows;
  for (auto origin : { EffectiveMode::M, EffectiveMode::HS, EffectiveMode::U,
                       EffectiveMode::VS, EffectiveMode::VU })
    for (unsigned cause = 0; cause < 24; ++cause)
      for (int m = 0; m < 2; ++m)
        for (int h = 0; h < 2; ++h)
          {
            bool virtualOrigin = origin == EffectiveMode::VS or origin == EffectiveMode::VU;
            std::pair<EffectiveMode, bool> candidates[] = {
              { EffectiveMode::VS, virtualOrigin and m and h },
              { EffectiveMode::HS, bool(m) },
              { EffectiveMode::M, true },
            };
            EffectiveMode target = EffectiveMode::M;
            for (auto [handler, delegated] : candidates)
              if (delegated and rank(handler) >= rank(origin))
                {
                  target = handler;
                  break;
                }
            rows.push_back({ origin, cause, bool(m), bool(h), target });
          }
  return rows;
}


size_t
countAccesses(const Translation& t)
{
  return t.accesses.size();
}


size_t
countAccesses(const OracleResult& r)
{
  return r.reads.size();
}


OracleReport
compare(const Translation& actual, const OracleResult& expected, bool compareReads,
        std::string coordinates)
{
  OracleReport report;
  report.coordinates = std::move(coordinates);

  std::optional<OracleFault> actualFault;
  if (actual.fault)
    actualFault = OracleFault{ actual.fault->cause, actual.fault->tval, actual.fault->gpa };
  std::optional<uint64_t> actualPa;
  if (actual.ok())
    actualPa = actual.pa.raw;

  bool same = actualFault.has_value() == expected.fault.has_value();
  if (same and actualFault)
    same = actualFault->cause == expected.fault->cause and
      actualFault->tval == expected.fault->tval and actualFault->gpa == expected.fault->gpa;
  if (same and not actualFault)
    same = actualPa == expected.pa;

  if (same and compareReads)
    {
      same = actual.accesses.size() == expected.reads.size();
      for (size_t i = 0; same and i < expected.reads.size(); ++i)
        same = actual.accesses[i].pa == expected.reads[i].pa and
          actual.accesses[i].value == expected.reads[i].value;
    }

  report.agree = same;
  if (not same)
    {
      report.expected = describe(expected.pa, expected.fault);
      for (const auto& r : expected.reads)
        report.expected += fmt::format(" [0x{:x}]=0x{:x}", r.pa, r.value);
      report.actual = describe(actualPa, actualFault);
      for (const auto& s : actual.accesses)
        report.actual += fmt::format(" [0x{:x}]=0x{:x}", s.pa, s.value);
    }
  return report;
}

}
