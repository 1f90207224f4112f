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

#include <gtest/gtest.h>

#include "hyp/differential.hpp"
#include "hyp/oracle.hpp"
#include "test_support.hpp"

namespace hyp
{
namespace
{

using namespace hyp::test;

TEST(Oracle, BareIsIdentity)
{
  SparseMemory mem;
  CsrSnapshot snap;
  snap.mode = PrivilegeState::fromEffective(EffectiveMode::VU);
  auto o = oracle::oracleTranslate(mem, snap, 0x1234'5000, Access::Load);
  ASSERT_TRUE(o.pa);
  EXPECT_EQ(*o.pa, 0x1234'5000u);
  EXPECT_TRUE(o.reads.empty());
  EXPECT_TRUE(oracle::compare(translate(mem, snap, 0x1234'5000, Access::Load), o, true).agree);
}

TEST(Oracle, ReservedBitsFaultOnBothSides)
{
  for (unsigned bit = 54; bit < 64; ++bit)
    {
      SparseMemory mem;
      Tables t(mem);
      uint64_t root = t.alloc();
      t.map(root, 0x1000, 0, 0x9000'0000, kV | kR | kW | kA | kD | (uint64_t(1) << bit));
      CsrSnapshot snap;
      snap.mode = PrivilegeState::fromEffective(EffectiveMode::HS);
      snap.satp = atpOf(root);
      auto o = oracle::oracleTranslate(mem, snap, 0x1000, Access::Store);
      auto w = translate(mem, snap, 0x1000, Access::Store);
      ASSERT_TRUE(o.fault);
      ASSERT_FALSE(w.ok());
      EXPECT_EQ(o.fault->cause, ExceptionCause::StoreAmoPageFault);
      EXPECT_EQ(w.fault->cause, o.fault->cause);
    }
}

TEST(Oracle, CompareReportsDifferences)
{
  SparseMemory mem;
  CsrSnapshot snap;
  snap.mode = PrivilegeState::fromEffective(EffectiveMode::HS);
  auto o = oracle::oracleTranslate(mem, snap, 0x1000, Access::Load);
  auto t = translate(mem, snap, 0x1000, Access::Load);
  t.pa.raw ^= 0x1000;
  auto r = oracle::compare(t, o, false, "here");
  EXPECT_FALSE(r.agree);
  EXPECT_EQ(r.coordinates, "here");
  EXPECT_NE(r.expected, r.actual);
}

TEST(Oracle, DelegationTableShape)
{
  auto rows = oracle::oracleDelegationTable();
  EXPECT_EQ(rows.size(), 5u * 24u * 4u);
  for (const auto& r : rows)
    if (r.origin == EffectiveMode::VU and r.medelegBit and r.hedelegBit)
      EXPECT_EQ(r.target, EffectiveMode::VS) << r.cause;
}

TEST(Oracle, CountAccesses)
{
  oracle::OracleResult r;
  r.reads.resize(15);
  EXPECT_EQ(oracle::countAccesses(r), 15u);
  Translation t;
  EXPECT_EQ(oracle::countAccesses(t), 0u);
}

TEST(Fuzz, ImagesAreDeterministicPerSeed)
{
  for (uint64_t seed : { 1u, 2u, 99u })
    {
      auto a = oracle::generateImage(seed);
      auto b = oracle::generateImage(seed);
      EXPECT_EQ(a.probes, b.probes);
      EXPECT_EQ(a.csrs.satp, b.csrs.satp);
      EXPECT_EQ(a.csrs.vsatp, b.csrs.vsatp);
      EXPECT_EQ(a.csrs.hgatp, b.csrs.hgatp);
      EXPECT_EQ(a.csrs.mode, b.csrs.mode);
      EXPECT_EQ(a.pteCount, b.pteCount);
      EXPECT_EQ(a.mem.frameCount(), b.mem.frameCount());
    }
  EXPECT_NE(oracle::generateImage(1).probes, oracle::generateImage(2).probes);
}

TEST(Fuzz, CorruptionRateRoughlyHonoured)
{
  size_t ptes = 0, corrupted = 0;
  for (uint64_t seed = 1; seed <= 200; ++seed)
    {
      auto img = oracle::generateImage(seed, 8, 0.2);
      ptes += img.pteCount;
      corrupted += img.corruptedPtes;
    }
  ASSERT_GT(ptes, 1000u);
  double rate = double(corrupted) / double(ptes);
  EXPECT_GT(rate, 0.15);
  EXPECT_LT(rate, 0.25);
}

TEST(Fuzz, WalkerAgreesWithOracleOnRandomImages)
{
  auto off = diffSeeds(1000, 100, 0);
  auto on = diffSeeds(1000, 100, Tlb::kDefaultCapacity);
  EXPECT_EQ(off.disagreements, 0u);
  EXPECT_EQ(on.disagreements, 0u);
  for (const auto& s : off.samples)
    ADD_FAILURE() << s.coordinates << ": " << s.expected << " vs " << s.actual;
  EXPECT_LE(off.maxAccesses, 15u);
  EXPECT_GT(off.faults, 0u);
  EXPECT_LT(off.faults, off.probes);
}

}
}
