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

#include "hyp/csr.hpp"
#include "hyp/privilege.hpp"

namespace hyp
{

  /// Architectural state of one hart: current mode and CSR file.
  struct MachineState
  {
    PrivilegeState mode;
    CsrFile csrs;
  };

  /// The CSR values address translation consumes, captured at one
  /// instant. Both the walker and the reference oracle take this.
  struct CsrSnapshot
  {
    PrivilegeState mode;
    uint64_t satp = 0;
    uint64_t vsatp = 0;
    uint64_t hgatp = 0;
    uint64_t mstatus = 0;
    uint64_t vsstatus = 0;

    static CsrSnapshot capture(const MachineState& state);
  };

}
