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

#include "hyp/machine_state.hpp"

namespace hyp
{

CsrSnapshot
CsrSnapshot::capture(const MachineState& state)
{
  const auto& csrs = state.csrs;
  CsrSnapshot snap;
  snap.mode = state.mode;
  snap.satp = csrs.peek(CsrNumber::SATP);
  snap.vsatp = csrs.peek(CsrNumber::VSATP);
  snap.hgatp = csrs.peek(CsrNumber::HGATP);
  snap.mstatus = csrs.peek(CsrNumber::MSTATUS);
  snap.vsstatus = csrs.peek(CsrNumber::VSSTATUS);
  return snap;
}

}
