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

#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "hyp/csr.hpp"

namespace hyp
{
namespace
{

constexpr EffectiveMode kAllModes[] = { EffectiveMode::M, EffectiveMode::HS, EffectiveMode::VS,
                                        EffectiveMode::U, EffectiveMode::VU };

const char* const kCsrNames[] = {
  "sstatus", "stvec", "sepc", "scause", "stval", "satp",
  "vsstatus", "vstvec", "vsepc", "vscause", "vstval", "vsatp",
  "mstatus", "medeleg", "mideleg", "mtvec", "mepc", "mcause", "mtval", "mtinst", "mtval2",
  "hstatus", "hedeleg", "hideleg", "hgeie", "htval", "hgatp", "hgeip",
};

// Outcome of touching a CSR of a given privilege level (address bits
// 9:8) from each mode, one row per mode in kAllModes order.
enum class Access : uint8_t { Ok, Illegal, Virtual };
constexpr Access kLevelTable[5][4] = {
  //          U-level          S-level          H-level          M-level
  /* M  */ { Access::Ok,      Access::Ok,      Access::Ok,      Access::Ok },
  /* HS */ { Access::Ok,      Access::Ok,      Access::Ok,      Access::Illegal },
  /* VS */ { Access::Ok,      Access::Ok,      Access::Virtual, Access::Illegal },
  /* U  */ { Access::Ok,      Access::Illegal, Access::Illegal, Access::Illegal },
  /* VU */ { Access::Ok,      Access::Virtual, Access::Virtual, Access::Illegal },
};

std::optional<ExceptionCause>
expectedCause(size_t modeRow, uint16_t address, bool write, bool implemented, bool tvm, bool vtvm)
{
  if (not implemented)
    return ExceptionCause::IllegalInstruction;
  if (write and (address >> 10) == 3)
    return ExceptionCause::IllegalInstruction;
  auto mode = kAllModes[modeRow];
  if (mode == EffectiveMode::HS and tvm and (address == 0x180 or address == 0x680))
    return ExceptionCause::IllegalInstruction;
  switch (kLevelTable[modeRow][(address >> 8) & 3])
    {
    case Access::Ok:
      break;
    case Access::Illegal:
      return ExceptionCause::IllegalInstruction;
    case Access::Virtual:
      return ExceptionCause::VirtualInstruction;
    }
  if (mode == EffectiveMode::VS and vtvm and address == 0x180)
    return ExceptionCause::VirtualInstruction;
  return std::nullopt;
}

uint16_t
csr(const char* name)
{
  auto a = csrAddressOf(name);
  EXPECT_TRUE(a) << name;
  return a.value_or(0);
}

TEST(CsrFile, ImplementedSetMatchesNameTable)
{
  CsrFile f;
  std::set<uint16_t> expected;
  for (auto name : kCsrNames)
    expected.insert(csr(name));
  auto got = f.implementedAddresses();
  EXPECT_EQ(std::set<uint16_t>(got.begin(), got.end()), expected);
  for (auto name : kCsrNames)
    EXPECT_EQ(csrNameOf(csr(name)), name);
  EXPECT_FALSE(csrAddressOf("cycle"));
}

// Every (mode, address, read/write, TVM, VTVM) combination over the
// whole 12-bit space against the level table above.
TEST(CsrFile, PrivilegeMatrix)
{
  for (int tvm = 0; tvm < 2; ++tvm)
    for (int vtvm = 0; vtvm < 2; ++vtvm)
      {
        CsrFile f;
        f.poke(CsrNumber::MSTATUS, tvm ? status::TVM : 0);
        f.poke(CsrNumber::HSTATUS, vtvm ? hstatus::VTVM : 0);
        for (size_t row = 0; row < 5; ++row)
          {
            auto mode = PrivilegeState::fromEffective(kAllModes[row]);
            for (unsigned a = 0; a < CsrFile::kAddressSpace; ++a)
              for (bool write : { false, true })
                {
                  auto want = expectedCause(row, a, write, f.isImplemented(a), tvm, vtvm);
                  ASSERT_EQ(f.checkAccess(mode, a, write), want)
                    << toString(kAllModes[row]) << " 0x" << std::hex << a << " write=" << write
                    << " tvm=" << tvm << " vtvm=" << vtvm;
                }
          }
      }
}

TEST(CsrFile, GuestAccessToHypervisorCsrsIsVirtualInstruction)
{
  CsrFile f;
  for (auto mode : { EffectiveMode::VS, EffectiveMode::VU })
    for (auto name : { "hstatus", "hedeleg", "hideleg", "htval", "hgatp", "vsatp", "vsstatus" })
      {
        try
          {
            f.read(PrivilegeState::fromEffective(mode), csr(name));
            ADD_FAILURE() << name << " readable from " << toString(mode);
          }
        catch (const IllegalCsr& e)
          {
            EXPECT_EQ(e.cause(), ExceptionCause::VirtualInstruction) << name;
            EXPECT_EQ(e.address(), csr(name));
          }
      }
}

TEST(CsrFile, ReadAfterWrite)
{
  CsrFile f;
  auto hs = PrivilegeState::fromEffective(EffectiveMode::HS);
  auto m = PrivilegeState::fromEffective(EffectiveMode::M);
  uint64_t satp = atp::make(atp::MODE_SV39, 5, 0x80123);
  EXPECT_EQ(f.write(hs, csr("satp"), satp), satp);
  EXPECT_EQ(f.read(hs, csr("satp")), satp);
  f.write(m, csr("mcause"), 13);
  EXPECT_EQ(f.read(m, csr("mcause")), 13u);
}

TEST(CsrFile, VirtualSupervisorSeesVsRegisters)
{
  CsrFile f;
  auto hs = PrivilegeState::fromEffective(EffectiveMode::HS);
  auto vs = PrivilegeState::fromEffective(EffectiveMode::VS);
  uint64_t host = atp::make(atp::MODE_SV39, 1, 0x1000);
  uint64_t guest = atp::make(atp::MODE_SV39, 2, 0x2000);
  f.write(hs, csr("satp"), host);
  f.write(hs, csr("vsatp"), guest);
  EXPECT_EQ(f.read(vs, csr("satp")), guest);

  uint64_t other = atp::make(atp::MODE_SV39, 3, 0x3000);
  f.write(vs, csr("satp"), other);
  EXPECT_EQ(f.peek(CsrNumber::VSATP), other);
  EXPECT_EQ(f.peek(CsrNumber::SATP), host);
}

// With V=1 every S-level CSR that has a VS counterpart resolves to it;
// the mapping is injective and leaves everything else alone.
TEST(CsrFile, AliasingIsABijection)
{
  CsrFile f;
  auto vs = PrivilegeState::fromEffective(EffectiveMode::VS);
  auto hs = PrivilegeState::fromEffective(EffectiveMode::HS);
  std::set<uint16_t> images;
  size_t aliased = 0;
  for (auto a : f.implementedAddresses())
    {
      EXPECT_EQ(f.resolve(hs, a), a);
      auto r = f.resolve(vs, a);
      if (((a >> 8) & 3) == 1 and (a >> 10) == 0)
        {
          EXPECT_EQ(r, a + 0x100) << std::hex << a;
          ++aliased;
        }
      else
        EXPECT_EQ(r, a);
      images.insert(r);
    }
  EXPECT_EQ(aliased, 6u);
  EXPECT_EQ(images.size(), f.implementedAddresses().size() - aliased);
}

TEST(CsrFile, AliasedPairsRoundTripRandomValues)
{
  std::mt19937_64 rng(0x5eed);
  auto vs = PrivilegeState::fromEffective(EffectiveMode::VS);
  auto hs = PrivilegeState::fromEffective(EffectiveMode::HS);
  const std::pair<const char*, const char*> pairs[] = {
    { "sstatus", "vsstatus" }, { "stvec", "vstvec" }, { "sepc", "vsepc" },
    { "scause", "vscause" }, { "stval", "vstval" }, { "satp", "vsatp" },
  };
  for (auto [s, v] : pairs)
    {
      CsrFile f;
      uint64_t hostSide = f.write(hs, csr(s), 0x1234'5678'0000);
      uint64_t mstatus = f.peek(CsrNumber::MSTATUS);
      for (int i = 0; i < 1000; ++i)
        {
          uint64_t value = rng();
          uint64_t stored = f.write(vs, csr(s), value);
          ASSERT_EQ(f.read(vs, csr(s)), stored) << s;
          ASSERT_EQ(f.read(hs, csr(v)), stored) << v;
          ASSERT_EQ(f.read(hs, csr(s)), hostSide) << s << " leaked into the host copy";
          ASSERT_EQ(f.peek(CsrNumber::MSTATUS), mstatus);

          uint64_t back = f.write(hs, csr(v), rng());
          ASSERT_EQ(f.read(vs, csr(s)), back);
        }
    }
}

TEST(CsrFile, SstatusIsAViewOfMstatus)
{
  CsrFile f;
  auto hs = PrivilegeState::fromEffective(EffectiveMode::HS);
  f.poke(CsrNumber::MSTATUS, status::TSR | (uint64_t(3) << status::MPP_SHIFT));
  f.write(hs, csr("sstatus"), status::SUM | status::SPP | status::TSR);
  uint64_t ms = f.peek(CsrNumber::MSTATUS);
  EXPECT_TRUE(ms & status::SUM);
  EXPECT_TRUE(ms & status::SPP);
  EXPECT_TRUE(ms & status::TSR);     // not writable through sstatus, kept
  EXPECT_EQ(f.read(hs, csr("sstatus")) & status::MPP, 0u);
  EXPECT_EQ(f.read(hs, csr("sstatus")) & status::TSR, 0u);
}

TEST(CsrFile, WarlWritesAreStable)
{
  std::mt19937_64 rng(42);
  CsrFile f;
  for (auto a : f.implementedAddresses())
    for (int i = 0; i < 200; ++i)
      {
        uint64_t got = f.poke(a, rng());
        ASSERT_EQ(got, f.peek(a));
        ASSERT_EQ(f.poke(a, got), got) << "re-writing the read value changed 0x" << std::hex << a;
      }
}

TEST(CsrFile, ReadOnlyBitsNeverChange)
{
  std::mt19937_64 rng(7);
  CsrFile f;
  for (auto a : f.implementedAddresses())
    {
      uint64_t fixed = f.peek(a) & ~f.writeMask(a);
      for (int i = 0; i < 100; ++i)
        {
          f.poke(a, rng());
          ASSERT_EQ(f.peek(a) & ~f.writeMask(a), fixed) << std::hex << a;
        }
    }
}

TEST(CsrFile, AtpModeLegalizationAllSixteenEncodings)
{
  for (auto reg : { CsrNumber::SATP, CsrNumber::VSATP, CsrNumber::HGATP })
    for (uint64_t mode = 0; mode < 16; ++mode)
      {
        CsrFile f;
        uint64_t before = f.peek(reg);
        uint64_t value = (mode << atp::MODE_SHIFT) | 0x1234;
        uint64_t after = f.poke(reg, value);
        uint64_t got = atp::mode(after);
        EXPECT_TRUE(got == atp::MODE_BARE or got == atp::MODE_SV39) << mode;
        if (mode == atp::MODE_BARE or mode == atp::MODE_SV39)
          EXPECT_EQ(got, mode);
        else
          EXPECT_EQ(after, before) << "unsupported mode " << mode << " must be ignored";
      }
}

TEST(CsrFile, UnsupportedModeKeepsPreviousTranslation)
{
  CsrFile f;
  uint64_t good = atp::make(atp::MODE_SV39, 3, 0x80000);
  f.poke(CsrNumber::SATP, good);
  f.poke(CsrNumber::SATP, (uint64_t(9) << atp::MODE_SHIFT) | 0x55);
  EXPECT_EQ(f.peek(CsrNumber::SATP), good);

  auto hs = PrivilegeState::fromEffective(EffectiveMode::HS);
  f.write(hs, csr("hgatp"), uint64_t(10) << atp::MODE_SHIFT);
  EXPECT_EQ(atp::mode(f.read(hs, csr("hgatp"))), atp::MODE_BARE);
}

TEST(CsrFile, IdFieldsNarrowed)
{
  CsrFile f;
  uint64_t wide = (atp::MODE_SV39 << atp::MODE_SHIFT) | (uint64_t(0xffff) << atp::ID_SHIFT);
  EXPECT_EQ(atp::asid(f.poke(CsrNumber::SATP, wide)), (1u << atp::ASID_BITS) - 1);
  EXPECT_EQ((f.peek(CsrNumber::SATP) >> atp::ID_SHIFT) & 0xffff, (1u << atp::ASID_BITS) - 1);
  uint64_t g = f.poke(CsrNumber::HGATP, wide | 0x3);
  EXPECT_EQ((g >> atp::ID_SHIFT) & 0x3fff, (1u << atp::VMID_BITS) - 1);
  EXPECT_EQ(g & 3, 0u) << "Sv39x4 root must be 16 KiB aligned";
}

TEST(CsrFile, MppReservedEncodingKeepsOldValue)
{
  CsrFile f;
  f.poke(CsrNumber::MSTATUS, uint64_t(1) << status::MPP_SHIFT);
  f.poke(CsrNumber::MSTATUS, uint64_t(2) << status::MPP_SHIFT);
  EXPECT_EQ((f.peek(CsrNumber::MSTATUS) & status::MPP) >> status::MPP_SHIFT, 1u);
}

TEST(CsrFile, DelegationMasks)
{
  CsrFile f;
  uint64_t me = f.poke(CsrNumber::MEDELEG, ~uint64_t(0));
  EXPECT_FALSE(me & (uint64_t(1) << 11)) << "ecall from M is never delegated";
  for (unsigned c : { 0u, 8u, 9u, 10u, 12u, 13u, 15u, 20u, 21u, 22u, 23u })
    EXPECT_TRUE(me & (uint64_t(1) << c)) << c;

  uint64_t he = f.poke(CsrNumber::HEDELEG, ~uint64_t(0));
  for (unsigned c : { 9u, 10u, 11u, 20u, 21u, 22u, 23u })
    EXPECT_FALSE(he & (uint64_t(1) << c)) << c;
  for (unsigned c : { 0u, 2u, 8u, 12u, 13u, 15u })
    EXPECT_TRUE(he & (uint64_t(1) << c)) << c;

  uint64_t hi = f.poke(CsrNumber::HIDELEG, ~uint64_t(0));
  EXPECT_EQ(hi, (uint64_t(1) << 2) | (uint64_t(1) << 6) | (uint64_t(1) << 10));
}

TEST(CsrFile, HstatusVsxlFixed)
{
  CsrFile f;
  EXPECT_EQ((f.peek(CsrNumber::HSTATUS) & hstatus::VSXL) >> hstatus::VSXL_SHIFT, 2u);
  f.poke(CsrNumber::HSTATUS, 0);
  EXPECT_EQ((f.peek(CsrNumber::HSTATUS) & hstatus::VSXL) >> hstatus::VSXL_SHIFT, 2u);
}

TEST(CsrFile, ReadOnlyAddressRejectsWrites)
{
  CsrFile f;
  auto m = PrivilegeState::fromEffective(EffectiveMode::M);
  EXPECT_NO_THROW(f.read(m, csr("hgeip")));
  EXPECT_THROW(f.write(m, csr("hgeip"), 1), IllegalCsr);
}

TEST(CsrFile, UnimplementedAddressIsIllegalEverywhere)
{
  CsrFile f;
  for (auto mode : kAllModes)
    {
      auto s = PrivilegeState::fromEffective(mode);
      EXPECT_THROW(f.read(s, 0x7c0), IllegalCsr);
      EXPECT_THROW(f.write(s, 0x7c0, 0), IllegalCsr);
    }
}

}
}
