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

#include <fmt/format.h>

#include "hyp/csr.hpp"
#include "hyp/tlb.hpp"

namespace hyp
{

namespace
{

bool
idsMatch(const TlbEntry& e, const TlbKey& key)
{
  switch (e.kind)
    {
    case TlbKind::Stage1:
      if (e.virt != key.virt)
        return false;
      if (e.virt and e.vmid != key.vmid)
        return false;
      return e.global or e.asid == key.asid;
    case TlbKind::GStage:
      return e.vmid == key.vmid;
    case TlbKind::Combined:
      return e.vmid == key.vmid and (e.global or e.asid == key.asid);
    }
  return false;
}


bool
asidFilter(const TlbEntry& e, const std::optional<FenceId>& id)
{
  // Global mappings survive ASID-specific fences.
  return not id or (not e.global and e.asid == id->value);
}

}


std::string_view
toString(TlbKind kind)
{
  switch (kind)
    {
    case TlbKind::Stage1:   return "Stage1";
    case TlbKind::GStage:   return "GStage";
    case TlbKind::Combined: return "Combined";
    }
  return "?";
}


std::string_view
toString(FenceKind kind)
{
  switch (kind)
    {
    case FenceKind::SfenceVma:  return "sfence.vma";
    case FenceKind::HfenceVvma: return "hfence.vvma";
    case FenceKind::HfenceGvma: return "hfence.gvma";
    }
  return "?";
}


std::optional<FenceKind>
parseFenceKind(std::string_view text)
{
  for (auto kind : { FenceKind::SfenceVma, FenceKind::HfenceVvma, FenceKind::HfenceGvma })
    if (toString(kind) == text)
      return kind;
  return std::nullopt;
}


std::optional<TlbEntry>
Tlb::lookup(const TlbKey& key) const
{
  for (const auto& e : entries_)
    {
      if (e.kind != key.kind or not e.contains(key.address) or not idsMatch(e, key))
        continue;
      if (not permits(e.perms, key.check))
        return std::nullopt;
      return e;
    }
  return std::nullopt;
}


void
Tlb::insert(const TlbEntry& entry)
{
  if (capacity_ == 0)
    return;
  std::erase_if(entries_, [&](const TlbEntry& e) { return e.sameTag(entry); });
  while (entries_.size() >= capacity_)
    entries_.pop_front();
  entries_.push_back(entry);
}


bool
Tlb::fenceMatches(const TlbEntry& e, FenceKind kind, std::optional<uint64_t> address,
                  std::optional<FenceId> id, uint16_t currentVmid)
{
  switch (kind)
    {
    case FenceKind::SfenceVma:
      return e.kind == TlbKind::Stage1 and not e.virt and
        (not address or e.contains(*address)) and asidFilter(e, id);

    case FenceKind::HfenceVvma:
      {
        bool guestStage1 = (e.kind == TlbKind::Stage1 and e.virt) or e.kind == TlbKind::Combined;
        return guestStage1 and e.vmid == currentVmid and
          (not address or e.contains(*address)) and asidFilter(e, id);
      }

    case FenceKind::HfenceGvma:
      if (id and e.vmid != id->value)
        return false;
      if (e.kind == TlbKind::GStage)
        return not address or e.contains(*address);
      // A combined entry may depend on the G-stage mapping of any of its
      // page-table pages, so an address-filtered fence drops all of them.
      return e.kind == TlbKind::Combined;
    }
  return false;
}


size_t
Tlb::fence(FenceKind kind, std::optional<uint64_t> address, std::optional<FenceId> id,
           uint16_t currentVmid)
{
  if (id)
    {
      bool wantVmid = kind == FenceKind::HfenceGvma;
      bool isVmid = id->space == FenceId::Space::Vmid;
      if (wantVmid != isVmid)
        throw InvalidFence(fmt::format("{} takes {}", toString(kind), wantVmid ? "a vmid" : "an asid"));
      unsigned bits = isVmid ? atp::VMID_BITS : atp::ASID_BITS;
      if (id->value >> bits)
        throw InvalidFence(fmt::format("{} 0x{:x} exceeds {} bits",
                                       isVmid ? "vmid" : "asid", id->value, bits));
    }

  return std::erase_if(entries_, [&](const TlbEntry& e) {
    return fenceMatches(e, kind, address, id, currentVmid);
  });
}

}
