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

// Line-based scenario language driving the machine model:
//
//   # comment
//   mode <M|HS|U|VS|VU>
//   csr read <name> [pc=X]
//   csr write <name> <X> [pc=X]
//   mem back pa=X len=X | mem write64 pa=X value=X | mem read64 pa=X
//   pool [host=X] [guest=X]
//   map <stage1|gstage> va=X pa=X size=<4K|2M|1G> perms=<rwxug->
//       [asid=N] [vmid=N] [root=<satp|vsatp>] [ad=<ad|a|d|none>]
//   access <load|store|fetch> va=X [bytes=<1|2|4|8>] [pc=X]
//   trap inject cause=<Name> [tval=X] [gpa=X] [epc=X]
//   trap return <M|HS|VS>
//   ecall [pc=X]
//   fence <sfence.vma|hfence.vvma|hfence.gvma> [addr=X] [id=N]
//   expect ok [pa=X] [value=X] [mode=<mode>] [count=N]
//   expect trap cause=<Name> [handled_in=<M|HS|VS>] [tval=X] [htval=X]
//   expect walk accesses=N
//   expect tlb <hit|miss>
//
// X is 0x-prefixed hex; N is decimal or 0x-prefixed hex. Every expect
// binds to the closest preceding non-expect directive, which must be one
// of csr, access, trap, ecall, mem read64 or fence.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hyp/cause.hpp"
#include "hyp/paging.hpp"
#include "hyp/privilege.hpp"
#include "hyp/tlb.hpp"

namespace hyp::scenario
{

  class ParseError : public std::runtime_error
  {
  public:
    ParseError(int line, const std::string& message);

    int line() const
    { return line_; }

    const std::string& message() const
    { return message_; }

  private:
    int line_;
    std::string message_;
  };

  struct ModeDirective
  {
    EffectiveMode mode = EffectiveMode::M;
    bool operator==(const ModeDirective&) const = default;
  };

  struct CsrDirective
  {
    bool write = false;
    std::string name;
    uint64_t value = 0;
    std::optional<uint64_t> pc;
    bool operator==(const CsrDirective&) const = default;
  };

  struct MemDirective
  {
    enum class Op : uint8_t { Back, Write64, Read64 };
    Op op = Op::Back;
    uint64_t pa = 0;
    uint64_t operand = 0;     // len for back, value for write64
    bool operator==(const MemDirective&) const = default;
  };

  struct PoolDirective
  {
    std::optional<uint64_t> host;
    std::optional<uint64_t> guest;
    bool operator==(const PoolDirective&) const = default;
  };

  struct MapDirective
  {
    bool gstage = false;
    uint64_t va = 0;
    uint64_t pa = 0;
    PageSize size = PageSize::Size4K;
    std::string perms;        // normalized subset of "rwxug"
    std::optional<uint64_t> asid;
    std::optional<uint64_t> vmid;
    std::optional<std::string> root;
    std::string ad = "ad";
    bool operator==(const MapDirective&) const = default;
  };

  struct AccessDirective
  {
    Access access = Access::Load;
    uint64_t va = 0;
    std::optional<uint64_t> bytes;    // width; enables the alignment check
    std::optional<uint64_t> pc;
    bool operator==(const AccessDirective&) const = default;
  };

  struct TrapInjectDirective
  {
    std::string cause;
    bool interrupt = false;
    unsigned code = 0;
    uint64_t tval = 0;
    std::optional<uint64_t> gpa;
    std::optional<uint64_t> epc;
    bool operator==(const TrapInjectDirective&) const = default;
  };

  struct TrapReturnDirective
  {
    EffectiveMode from = EffectiveMode::M;
    bool operator==(const TrapReturnDirective&) const = default;
  };

  struct EcallDirective
  {
    std::optional<uint64_t> pc;
    bool operator==(const EcallDirective&) const = default;
  };

  struct FenceDirective
  {
    FenceKind kind = FenceKind::SfenceVma;
    std::optional<uint64_t> addr;
    std::optional<uint64_t> id;
    bool operator==(const FenceDirective&) const = default;
  };

  struct ExpectOk
  {
    std::optional<uint64_t> pa;
    std::optional<uint64_t> value;
    std::optional<EffectiveMode> mode;
    std::optional<uint64_t> count;
    bool operator==(const ExpectOk&) const = default;
  };

  struct ExpectTrap
  {
    std::string cause;
    bool interrupt = false;
    unsigned code = 0;
    std::optional<EffectiveMode> handledIn;
    std::optional<uint64_t> tval;
    std::optional<uint64_t> htval;
    bool operator==(const ExpectTrap&) const = default;
  };

  struct ExpectWalk
  {
    uint64_t accesses = 0;
    bool operator==(const ExpectWalk&) const = default;
  };

  struct ExpectTlb
  {
    bool hit = false;
    bool operator==(const ExpectTlb&) const = default;
  };

  using DirectiveBody = std::variant<ModeDirective, CsrDirective, MemDirective, PoolDirective,
                                     MapDirective, AccessDirective, TrapInjectDirective,
                                     TrapReturnDirective, EcallDirective, FenceDirective,
                                     ExpectOk, ExpectTrap, ExpectWalk, ExpectTlb>;

  struct Directive
  {
    int line = 0;
    DirectiveBody body;

    bool isExpect() const;
  };

  struct Scenario
  {
    std::string name;
    std::vector<Directive> directives;
  };

  /// Parse scenario text. Throws ParseError with a 1-based line number.
  Scenario parse(std::string_view text, std::string name = {});

  /// Canonical text form; parse(serialize(s)) has the same directives.
  std::string serialize(const Scenario& scenario);

  /// Directive bodies equal, line numbers ignored.
  bool sameDirectives(const Scenario& a, const Scenario& b);

}
