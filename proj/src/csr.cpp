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

#include <string>
#include <utility>

#include <fmt/format.h>

#include "hyp/csr.hpp"

namespace hyp
{

namespace
{

constexpr std::pair<CsrNumber, std::string_view> kNames[] = {
  { CsrNumber::SSTATUS, "sstatus" },   { CsrNumber::STVEC, "stvec" },
  { CsrNumber::SEPC, "sepc" },         { CsrNumber::SCAUSE, "scause" },
  { CsrNumber::STVAL, "stval" },       { CsrNumber::SATP, "satp" },
  { CsrNumber::VSSTATUS, "vsstatus" }, { CsrNumber::VSTVEC, "vstvec" },
  { CsrNumber::VSEPC, "vsepc" },       { CsrNumber::VSCAUSE, "vscause" },
  { CsrNumber::VSTVAL, "vstval" },     { CsrNumber::VSATP, "vsatp" },
  { CsrNumber::MSTATUS, "mstatus" },   { CsrNumber::MEDELEG, "medeleg" },
  { CsrNumber::MIDELEG, "mideleg" },   { CsrNumber::MTVEC, "mtvec" },
  { CsrNumber::MEPC, "mepc" },         { CsrNumber::MCAUSE, "mcause" },
  { CsrNumber::MTVAL, "mtval" },       { CsrNumber::MTINST, "mtinst" },
  { CsrNumber::MTVAL2, "mtval2" },     { CsrNumber::HSTATUS, "hstatus" },
  { CsrNumber::HEDELEG, "hedeleg" },   { CsrNumber::HIDELEG, "hideleg" },
  { CsrNumber::HGEIE, "hgeie" },       { CsrNumber::HTVAL, "htval" },
  { CsrNumber::HGATP, "hgatp" },       { CsrNumber::HGEIP, "hgeip" },
};

constexpr uint64_t bit(unsigned n)
{ return uint64_t(1) << n; }

constexpr uint64_t kAll = ~uint64_t(0);

constexpr uint64_t kMstatusMask = status::SPP | status::MPP | status::SUM | status::MXR |
  status::TVM | status::TSR | status::MPV;

constexpr uint64_t kSstatusMask = status::SPP | status::SUM | status::MXR;

// Bit 11 (ecall from M) and the reserved codes 14, 16-19 are read-only zero.
constexpr uint64_t kMedelegMask = 0x7ff | bit(12) | bit(13) | bit(15) |
  bit(20) | bit(21) | bit(22) | bit(23);

// Only causes a guest may handle itself: no ecalls from HS/VS/M, no
// guest-page faults, no virtual-instruction faults.
constexpr uint64_t kHedelegMask = 0x1ff | bit(12) | bit(13) | bit(15);

constexpr uint64_t kMidelegMask = bit(1) | bit(2) | bit(5) | bit(6) | bit(9) |
  bit(10) | bit(12);

constexpr uint64_t kHidelegMask = bit(2) | bit(6) | bit(10);

constexpr uint64_t kHstatusWriteMask = hstatus::SPV | hstatus::SPVP | hstatus::HU |
  hstatus::VTVM | hstatus::VTW | hstatus::VTSR;

constexpr uint64_t kHstatusReadMask = kHstatusWriteMask | hstatus::VSXL;

// Bits 59:53 of satp hold ASID bits beyond the implemented width.
constexpr uint64_t kAsidOverflow = ((uint64_t(1) << 16) - 1) << (atp::ID_SHIFT + atp::ASID_BITS)
  & ~(uint64_t(0xf) << atp::MODE_SHIFT);

// Bits 59:51 of hgatp: reserved bits and VMID bits beyond the implemented width.
constexpr uint64_t kVmidOverflow = (uint64_t(0x1ff) << (atp::ID_SHIFT + atp::VMID_BITS));


uint64_t
legalizeMstatus(uint64_t oldValue, uint64_t value)
{
  // MPP=2 is not a mode.
  if (((value & status::MPP) >> status::MPP_SHIFT) == 2)
    value = (value & ~status::MPP) | (oldValue & status::MPP);
  return value;
}


uint64_t
legalizeHstatus(uint64_t, uint64_t value)
{
  return (value & ~hstatus::VSXL) | (uint64_t(2) << hstatus::VSXL_SHIFT);
}


uint64_t
legalizeSatp(uint64_t oldValue, uint64_t value)
{
  auto mode = atp::mode(value);
  if (mode != atp::MODE_BARE and mode != atp::MODE_SV39)
    return oldValue;
  return value & ~kAsidOverflow;
}


uint64_t
legalizeHgatp(uint64_t oldValue, uint64_t value)
{
  auto mode = atp::mode(value);
  if (mode != atp::MODE_BARE and mode != atp::MODE_SV39)
    return oldValue;
  // Sv39x4 root is 16 KiB aligned.
  return value & ~kVmidOverflow & ~uint64_t(3);
}

}


IllegalCsr::IllegalCsr(uint16_t address, ExceptionCause cause)
  : std::runtime_error(fmt::format("{} accessing csr 0x{:03x}", toString(cause), address)),
    address_(address), cause_(cause)
{
}


std::optional<uint16_t>
csrAddressOf(std::string_view name)
{
  for (const auto& [number, text] : kNames)
    if (text == name)
      return addr(number);
  return std::nullopt;
}


std::string_view
csrNameOf(uint16_t address)
{
  for (const auto& [number, text] : kNames)
    if (addr(number) == address)
      return text;
  return "unknown";
}


CsrFile::CsrFile()
{
  defineView(CsrNumber::SSTATUS, CsrNumber::MSTATUS, kSstatusMask);
  define(CsrNumber::STVEC, kAll, ~uint64_t(2));
  define(CsrNumber::SEPC, kAll, ~uint64_t(1));
  define(CsrNumber::SCAUSE, kAll, kAll);
  define(CsrNumber::STVAL, kAll, kAll);
  define(CsrNumber::SATP, kAll, kAll, legalizeSatp);

  define(CsrNumber::VSSTATUS, kSstatusMask, kSstatusMask);
  define(CsrNumber::VSTVEC, kAll, ~uint64_t(2));
  define(CsrNumber::VSEPC, kAll, ~uint64_t(1));
  define(CsrNumber::VSCAUSE, kAll, kAll);
  define(CsrNumber::VSTVAL, kAll, kAll);
  define(CsrNumber::VSATP, kAll, kAll, legalizeSatp);

  define(CsrNumber::MSTATUS, kMstatusMask, kMstatusMask, legalizeMstatus);
  define(CsrNumber::MEDELEG, kMedelegMask, kMedelegMask);
  define(CsrNumber::MIDELEG, kMidelegMask, kMidelegMask);
  define(CsrNumber::MTVEC, kAll, ~uint64_t(2));
  define(CsrNumber::MEPC, kAll, ~uint64_t(1));
  define(CsrNumber::MCAUSE, kAll, kAll);
  define(CsrNumber::MTVAL, kAll, kAll);
  define(CsrNumber::MTINST, 0, 0);
  define(CsrNumber::MTVAL2, kAll, kAll);

  define(CsrNumber::HSTATUS, kHstatusReadMask, kHstatusWriteMask, legalizeHstatus);
  define(CsrNumber::HEDELEG, kHedelegMask, kHedelegMask);
  define(CsrNumber::HIDELEG, kHidelegMask, kHidelegMask);
  define(CsrNumber::HGEIE, 0, 0);
  define(CsrNumber::HTVAL, kAll, kAll);
  define(CsrNumber::HGATP, kAll, kAll, legalizeHgatp);
  define(CsrNumber::HGEIP, 0, 0);

  storage_[addr(CsrNumber::HSTATUS)] = legalizeHstatus(0, 0);
}


void
CsrFile::define(CsrNumber n, uint64_t readMask, uint64_t writeMask, Legalizer legalizer)
{
  auto a = addr(n);
  descriptors_[a] = Descriptor{ readMask, writeMask, legalizer, a };
}


void
CsrFile::defineView(CsrNumber n, CsrNumber backing, uint64_t mask)
{
  descriptors_[addr(n)] = Descriptor{ mask, mask, nullptr, addr(backing) };
}


uint16_t
CsrFile::resolve(PrivilegeState mode, uint16_t address) const
{
  // With V=1 the supervisor CSRs name their vs-prefixed counterparts,
  // which sit exactly 0x100 higher.
  if (mode.virt() and (address >> 8) == 1 and isImplemented(address + 0x100))
    return address + 0x100;
  return address;
}


std::optional<ExceptionCause>
CsrFile::checkAccess(PrivilegeState mode, uint16_t address, bool isWrite) const
{
  constexpr auto illegal = ExceptionCause::IllegalInstruction;
  constexpr auto virtualInst = ExceptionCause::VirtualInstruction;

  if (not isImplemented(address))
    return illegal;

  unsigned level = (address >> 8) & 3;
  bool readOnly = ((address >> 10) & 3) == 3;
  if (isWrite and readOnly)
    return illegal;

  auto tvm = (peek(CsrNumber::MSTATUS) & status::TVM) != 0;
  auto vtvm = (peek(CsrNumber::HSTATUS) & hstatus::VTVM) != 0;
  bool isSatp = address == addr(CsrNumber::SATP);

  switch (mode.effective())
    {
    case EffectiveMode::M:
      return std::nullopt;

    case EffectiveMode::HS:
      if (level == 3)
        return illegal;
      if (tvm and (isSatp or address == addr(CsrNumber::HGATP)))
        return illegal;
      return std::nullopt;

    case EffectiveMode::U:
      return level == 0 ? std::nullopt : std::optional(illegal);

    case EffectiveMode::VS:
      if (level == 3)
        return illegal;
      if (level == 2)
        return virtualInst;
      if (vtvm and isSatp)
        return virtualInst;
      return std::nullopt;

    case EffectiveMode::VU:
      if (level == 3)
        return illegal;
      if (level == 1 or level == 2)
        return virtualInst;
      return std::nullopt;
    }
  return illegal;
}


uint64_t
CsrFile::read(PrivilegeState mode, uint16_t address) const
{
  if (auto cause = checkAccess(mode, address, false))
    throw IllegalCsr(address, *cause);
  return peek(resolve(mode, address));
}


uint64_t
CsrFile::write(PrivilegeState mode, uint16_t address, uint64_t value)
{
  if (auto cause = checkAccess(mode, address, true))
    throw IllegalCsr(address, *cause);
  return poke(resolve(mode, address), value);
}


uint64_t
CsrFile::peek(uint16_t address) const
{
  if (not isImplemented(address))
    return 0;
  const auto& desc = *descriptors_[address];
  return storage_[desc.storage] & desc.readMask;
}


uint64_t
CsrFile::poke(uint16_t address, uint64_t value)
{
  if (not isImplemented(address))
    return 0;
  const auto& desc = *descriptors_[address];
  uint64_t old = storage_[desc.storage];
  uint64_t merged = (value & desc.writeMask) | (old & ~desc.writeMask);
  storage_[desc.storage] = legalize(desc.storage, old, merged);
  return peek(address);
}


uint64_t
CsrFile::legalize(uint16_t address, uint64_t oldValue, uint64_t value) const
{
  if (not isImplemented(address))
    return value;
  const auto& desc = *descriptors_[address];
  const auto& backing = *descriptors_[desc.storage];
  return backing.legalizer ? backing.legalizer(oldValue, value) : value;
}


uint64_t
CsrFile::writeMask(uint16_t address) const
{
  return isImplemented(address) ? descriptors_[address]->writeMask : 0;
}


std::vector<uint16_t>
CsrFile::implementedAddresses() const
{
  std::vector<uint16_t> out;
  for (unsigned a = 0; a < kAddressSpace; ++a)
    if (descriptors_[a])
      out.push_back(uint16_t(a));
  return out;
}

}
