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

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "hyp/cause.hpp"
#include "hyp/privilege.hpp"

namespace hyp
{

  /// Addresses of the implemented CSRs.
  enum class CsrNumber : uint16_t
    {
      SSTATUS = 0x100,
      STVEC = 0x105,
      SEPC = 0x141,
      SCAUSE = 0x142,
      STVAL = 0x143,
      SATP = 0x180,

      VSSTATUS = 0x200,
      VSTVEC = 0x205,
      VSEPC = 0x241,
      VSCAUSE = 0x242,
      VSTVAL = 0x243,
      VSATP = 0x280,

      MSTATUS = 0x300,
      MEDELEG = 0x302,
      MIDELEG = 0x303,
      MTVEC = 0x305,
      MEPC = 0x341,
      MCAUSE = 0x342,
      MTVAL = 0x343,
      MTINST = 0x34A,
      MTVAL2 = 0x34B,

      HSTATUS = 0x600,
      HEDELEG = 0x602,
      HIDELEG = 0x603,
      HGEIE = 0x607,
      HTVAL = 0x643,
      HGATP = 0x680,
      HGEIP = 0xE12,
    };

  constexpr uint16_t addr(CsrNumber n)
  { return static_cast<uint16_t>(n); }

  /// mstatus / sstatus / vsstatus fields.
  namespace status
  {
    constexpr uint64_t SPP = uint64_t(1) << 8;
    constexpr unsigned MPP_SHIFT = 11;
    constexpr uint64_t MPP = uint64_t(3) << MPP_SHIFT;
    constexpr uint64_t SUM = uint64_t(1) << 18;
    constexpr uint64_t MXR = uint64_t(1) << 19;
    constexpr uint64_t TVM = uint64_t(1) << 20;
    constexpr uint64_t TSR = uint64_t(1) << 22;
    constexpr uint64_t MPV = uint64_t(1) << 39;
  }

  namespace hstatus
  {
    constexpr uint64_t SPV = uint64_t(1) << 7;
    constexpr uint64_t SPVP = uint64_t(1) << 8;
    constexpr uint64_t HU = uint64_t(1) << 9;
    constexpr uint64_t VGEIN = uint64_t(0x3f) << 12;
    constexpr uint64_t VTVM = uint64_t(1) << 20;
    constexpr uint64_t VTW = uint64_t(1) << 21;
    constexpr uint64_t VTSR = uint64_t(1) << 22;
    constexpr unsigned VSXL_SHIFT = 32;
    constexpr uint64_t VSXL = uint64_t(3) << VSXL_SHIFT;
  }

  /// satp / vsatp / hgatp layout. ASID and VMID are narrower than the
  /// architectural fields; upper bits read as zero.
  namespace atp
  {
    constexpr unsigned MODE_SHIFT = 60;
    constexpr uint64_t MODE_BARE = 0;
    constexpr uint64_t MODE_SV39 = 8;      // Sv39x4 when in hgatp
    constexpr unsigned ID_SHIFT = 44;
    constexpr unsigned ASID_BITS = 9;
    constexpr unsigned VMID_BITS = 7;
    constexpr uint64_t PPN_MASK = (uint64_t(1) << 44) - 1;

    constexpr uint64_t mode(uint64_t v)
    { return v >> MODE_SHIFT; }

    constexpr uint64_t ppn(uint64_t v)
    { return v & PPN_MASK; }

    constexpr uint16_t asid(uint64_t v)
    { return uint16_t((v >> ID_SHIFT) & ((1u << ASID_BITS) - 1)); }

    constexpr uint16_t vmid(uint64_t v)
    { return uint16_t((v >> ID_SHIFT) & ((1u << VMID_BITS) - 1)); }

    constexpr uint64_t make(uint64_t mode, uint64_t id, uint64_t ppn)
    { return (mode << MODE_SHIFT) | (id << ID_SHIFT) | (ppn & PPN_MASK); }
  }

  /// Access to a CSR that the current mode may not perform. The cause
  /// is IllegalInstruction or VirtualInstruction.
  class IllegalCsr : public std::runtime_error
  {
  public:
    IllegalCsr(uint16_t address, ExceptionCause cause);

    uint16_t address() const
    { return address_; }

    ExceptionCause cause() const
    { return cause_; }

  private:
    uint16_t address_;
    ExceptionCause cause_;
  };

  std::optional<uint16_t> csrAddressOf(std::string_view name);
  std::string_view csrNameOf(uint16_t address);

  /// The 4096-entry CSR address space of one hart.
  ///
  /// Each implemented address has a descriptor with read and write masks
  /// and an optional legalization function applied after masking. A
  /// descriptor may be a view of another register (sstatus over
  /// mstatus), in which case storage lives at the backing address.
  class CsrFile
  {
  public:

    static constexpr unsigned kAddressSpace = 4096;

    using Legalizer = uint64_t (*)(uint64_t oldValue, uint64_t newValue);

    CsrFile();

    /// Read under the privilege and aliasing rules of the given mode.
    /// Throws IllegalCsr.
    uint64_t read(PrivilegeState mode, uint16_t address) const;

    /// Write under the privilege and aliasing rules of the given mode and
    /// return the value that now reads back. Throws IllegalCsr.
    uint64_t write(PrivilegeState mode, uint16_t address, uint64_t value);

    /// Return the cause an access would raise, if any.
    std::optional<ExceptionCause>
    checkAccess(PrivilegeState mode, uint16_t address, bool isWrite) const;

    /// Address actually targeted once V=1 aliasing is applied.
    uint16_t resolve(PrivilegeState mode, uint16_t address) const;

    /// Raw accessors with masks and legalization but no privilege checks
    /// or aliasing. Used by the trap engine and scenario helpers.
    uint64_t peek(uint16_t address) const;
    uint64_t poke(uint16_t address, uint64_t value);

    uint64_t peek(CsrNumber n) const
    { return peek(addr(n)); }

    uint64_t poke(CsrNumber n, uint64_t value)
    { return poke(addr(n), value); }

    bool isImplemented(uint16_t address) const
    { return address < kAddressSpace and descriptors_[address].has_value(); }

    std::vector<uint16_t> implementedAddresses() const;

    /// Apply the legalization function of a register. Exposed for
    /// property tests.
    uint64_t legalize(uint16_t address, uint64_t oldValue, uint64_t value) const;

    uint64_t writeMask(uint16_t address) const;

  private:

    struct Descriptor
    {
      uint64_t readMask = ~uint64_t(0);
      uint64_t writeMask = ~uint64_t(0);
      Legalizer legalizer = nullptr;
      uint16_t storage = 0;
    };

    void define(CsrNumber n, uint64_t readMask, uint64_t writeMask,
                Legalizer legalizer = nullptr);
    void defineView(CsrNumber n, CsrNumber backing, uint64_t mask);

    std::array<std::optional<Descriptor>, kAddressSpace> descriptors_;
    std::array<uint64_t, kAddressSpace> storage_{};
  };

}
