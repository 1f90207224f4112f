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

#include "hyp/csr.hpp"
#include "hyp/ptw.hpp"

namespace hyp
{

namespace
{

// Table geometry of one stage: Sv39 or Sv39x4 (wider root index).
struct Geometry
{
  unsigned rootIndexBits;
  WalkStage stage;

  uint64_t index(uint64_t input, unsigned level) const
  {
    unsigned bits = level == 2 ? rootIndexBits : 9;
    return (input >> (12 + 9 * level)) & ((uint64_t(1) << bits) - 1);
  }
};


// The common three-level walk. tableToHost turns the address of a PTE
// into the physical address to read (identity outside nested walks) and
// returns false after setting out.fault itself.
template <typename TableToHost>
void
walkTables(const SparseMemory& mem, uint64_t rootPpn, uint64_t input, const Geometry& geo,
           const PermCheck& check, const Fault& faultTemplate, TableToHost&& tableToHost,
           WalkResult& out)
{
  uint64_t table = rootPpn << 12;

  for (int level = 2; level >= 0; --level)
    {
      uint64_t pteAddr = table + 8 * geo.index(input, level);
      uint64_t hostAddr = 0;
      if (not tableToHost(pteAddr, hostAddr))
        return;

      Pte entry;
      if (mem.read64(hostAddr, entry.raw) != MemError::None)
        {
          out.fault = faultTemplate;
          return;
        }
      out.accesses.push_back({ geo.stage, unsigned(level), hostAddr, entry.raw });

      if (not entry.v() or (entry.w() and not entry.r()) or entry.reserved() != 0)
        {
          out.fault = faultTemplate;
          return;
        }

      if (not entry.isLeaf())
        {
          if (level == 0)
            {
              out.fault = faultTemplate;
              return;
            }
          table = entry.ppn() << 12;
          continue;
        }

      auto perms = Perms::fromPte(entry);
      uint64_t alignMask = (uint64_t(1) << (9 * level)) - 1;
      // Hardware never sets A or D: a clear A always faults and a clear
      // D faults stores (through permits).
      if (not entry.a() or not permits(perms, check) or (entry.ppn() & alignMask) != 0)
        {
          out.fault = faultTemplate;
          return;
        }

      out.size = pageSizeAtLevel(level);
      out.perms = perms;
      out.global = entry.g();
      out.pa.raw = (entry.ppn() << 12) | (input & (pageBytes(out.size) - 1));
      return;
    }
}


constexpr Geometry kSv39{ 9, WalkStage::S };
constexpr Geometry kSv39Vs{ 9, WalkStage::VS };
constexpr Geometry kSv39x4{ 11, WalkStage::G };

auto identity = [](uint64_t addr, uint64_t& host) { host = addr; return true; };

}


std::string_view
toString(WalkStage stage)
{
  switch (stage)
    {
    case WalkStage::S:  return "S";
    case WalkStage::VS: return "VS";
    case WalkStage::G:  return "G";
    }
  return "?";
}


WalkResult
walkStage1(const SparseMemory& mem, uint64_t atpValue, VirtAddr va, Access access,
           const Stage1Context& ctx)
{
  WalkResult out;
  Fault fault{ pageFaultFor(access), va.raw, std::nullopt };
  if (not va.canonical())
    {
      out.fault = fault;
      return out;
    }
  PermCheck check{ access, ctx.user, ctx.sum, ctx.mxr };
  walkTables(mem, atp::ppn(atpValue), va.raw, kSv39, check, fault, identity, out);
  return out;
}


WalkResult
walkGStage(const SparseMemory& mem, uint64_t hgatp, GuestPhysAddr gpa, Access access,
           const GStageOptions& opts)
{
  WalkResult out;
  Fault fault{ guestPageFaultFor(access), gpa.raw, gpa.raw };
  if (not gpa.valid())
    {
      out.fault = fault;
      return out;
    }
  PermCheck check{ opts.implicit ? Access::Load : access, true, false, opts.mxr };
  walkTables(mem, atp::ppn(hgatp), gpa.raw, kSv39x4, check, fault, identity, out);
  return out;
}


namespace
{

// State of one translate() call.
class Translator
{
public:

  Translator(const SparseMemory& mem, const CsrSnapshot& snap, uint64_t va, Access access,
             Tlb* tlb, Translation& out)
    : mem_(mem), snap_(snap), va_(va), access_(access), tlb_(tlb), out_(out)
  {
    vmid_ = atp::vmid(snap.hgatp);
    gMxr_ = (snap.mstatus & status::MXR) != 0;
  }

  void run();

private:

  void identityResult(uint64_t pa)
  {
    out_.pa.raw = pa;
    out_.size = PageSize::Size4K;
    out_.perms = Perms{ true, true, true, true, true };
  }

  std::optional<TlbEntry> lookup(const TlbKey& key)
  {
    if (not tlb_)
      return std::nullopt;
    auto hit = tlb_->lookup(key);
    out_.tlbEvents.push_back({ hit ? TlbEvent::Type::Hit : TlbEvent::Type::Miss, key.kind,
                               key.address });
    return hit;
  }

  void insert(const TlbEntry& entry)
  {
    if (not tlb_)
      return;
    tlb_->insert(entry);
    out_.tlbEvents.push_back({ TlbEvent::Type::Insert, entry.kind, entry.vpn << 12 });
  }

  static TlbEntry makeEntry(TlbKind kind, uint64_t input, uint64_t output, PageSize size)
  {
    TlbEntry e;
    e.kind = kind;
    e.size = size;
    uint64_t align = ~(pageBytes(size) - 1);
    e.vpn = (input & align) >> 12;
    e.ppn = (output & align) >> 12;
    return e;
  }

  /// GPA -> HPA through the G stage, consulting the TLB. On failure sets
  /// out_.fault to a guest-page fault with tval = the original va.
  bool gTranslate(uint64_t gpa, bool implicit, uint64_t& hpa, PageSize& size, Perms& perms);

  void runSingleStage(uint64_t atpValue, bool virt, const Stage1Context& ctx);
  void runNested(const Stage1Context& ctx);

  const SparseMemory& mem_;
  const CsrSnapshot& snap_;
  uint64_t va_;
  Access access_;
  Tlb* tlb_;
  Translation& out_;
  uint16_t vmid_ = 0;
  bool gMxr_ = false;
};


bool
Translator::gTranslate(uint64_t gpa, bool implicit, uint64_t& hpa, PageSize& size, Perms& perms)
{
  PermCheck check{ implicit ? Access::Load : access_, true, false, gMxr_ };
  TlbKey key{ TlbKind::GStage, gpa, 0, vmid_, true, check };
  if (GuestPhysAddr{ gpa }.valid())
    if (auto hit = lookup(key))
      {
        hpa = hit->translate(gpa);
        size = hit->size;
        perms = hit->perms;
        return true;
      }

  auto walk = walkGStage(mem_, snap_.hgatp, GuestPhysAddr{ gpa }, access_,
                         GStageOptions{ implicit, gMxr_ });
  out_.accesses.insert(out_.accesses.end(), walk.accesses.begin(), walk.accesses.end());
  if (not walk.ok())
    {
      out_.fault = Fault{ walk.fault->cause, va_, gpa };
      return false;
    }

  auto entry = makeEntry(TlbKind::GStage, gpa, walk.pa.raw, walk.size);
  entry.vmid = vmid_;
  entry.virt = true;
  entry.perms = walk.perms;
  insert(entry);

  hpa = walk.pa.raw;
  size = walk.size;
  perms = walk.perms;
  return true;
}


void
Translator::runSingleStage(uint64_t atpValue, bool virt, const Stage1Context& ctx)
{
  PermCheck check{ access_, ctx.user, ctx.sum, ctx.mxr };
  uint16_t asid = atp::asid(atpValue);
  TlbKey key{ TlbKind::Stage1, va_, asid, uint16_t(virt ? vmid_ : 0), virt, check };
  if (VirtAddr{ va_ }.canonical())
    if (auto hit = lookup(key))
      {
        out_.tlbHit = true;
        out_.pa.raw = hit->translate(va_);
        out_.size = hit->size;
        out_.perms = hit->perms;
        if (virt)
          out_.gpa = out_.pa.raw;
        return;
      }

  auto walk = walkStage1(mem_, atpValue, VirtAddr{ va_ }, access_, ctx);
  if (virt)
    for (auto& step : walk.accesses)
      step.stage = WalkStage::VS;
  out_.accesses = walk.accesses;
  if (not walk.ok())
    {
      out_.fault = walk.fault;
      return;
    }

  out_.pa = walk.pa;
  out_.size = walk.size;
  out_.perms = walk.perms;
  if (virt)
    out_.gpa = walk.pa.raw;

  auto entry = makeEntry(TlbKind::Stage1, va_, walk.pa.raw, walk.size);
  entry.asid = asid;
  entry.virt = virt;
  entry.vmid = virt ? vmid_ : 0;
  entry.perms = walk.perms;
  entry.global = walk.global;
  insert(entry);
}


void
Translator::runNested(const Stage1Context& ctx)
{
  uint16_t asid = atp::asid(snap_.vsatp);
  // Combined entries hold the conjunction of both stages, so only the
  // MXR that applies to both (mstatus) may be used when checking them.
  PermCheck combinedCheck{ access_, ctx.user, ctx.sum, gMxr_ };
  TlbKey key{ TlbKind::Combined, va_, asid, vmid_, true, combinedCheck };
  if (VirtAddr{ va_ }.canonical())
    if (auto hit = lookup(key))
      {
        out_.tlbHit = true;
        out_.pa.raw = hit->translate(va_);
        out_.size = hit->size;
        out_.perms = hit->perms;
        return;
      }

  WalkResult vs;
  Fault vsFault{ pageFaultFor(access_), va_, std::nullopt };
  if (not VirtAddr{ va_ }.canonical())
    {
      out_.fault = vsFault;
      return;
    }

  bool gFailed = false;
  auto tableToHost = [&](uint64_t pteGpa, uint64_t& hpa) {
    // G-stage reads for this PTE come before the PTE read itself.
    out_.accesses.insert(out_.accesses.end(), vs.accesses.begin(), vs.accesses.end());
    vs.accesses.clear();
    PageSize size;
    Perms perms;
    if (gTranslate(pteGpa, true, hpa, size, perms))
      return true;
    gFailed = true;
    return false;
  };

  PermCheck vsCheck{ access_, ctx.user, ctx.sum, ctx.mxr };
  walkTables(mem_, atp::ppn(snap_.vsatp), va_, kSv39Vs, vsCheck, vsFault, tableToHost, vs);
  out_.accesses.insert(out_.accesses.end(), vs.accesses.begin(), vs.accesses.end());
  if (gFailed)
    return;
  if (not vs.ok())
    {
      out_.fault = vs.fault;
      return;
    }

  uint64_t gpa = vs.pa.raw;
  out_.gpa = gpa;
  uint64_t hpa = 0;
  PageSize gSize;
  Perms gPerms;
  if (not gTranslate(gpa, false, hpa, gSize, gPerms))
    return;

  out_.pa.raw = hpa;
  out_.size = smaller(vs.size, gSize);
  out_.perms = vs.perms & gPerms;

  auto entry = makeEntry(TlbKind::Combined, va_, hpa, out_.size);
  entry.asid = asid;
  entry.vmid = vmid_;
  entry.virt = true;
  entry.perms = out_.perms;
  entry.global = vs.global;
  insert(entry);
}


void
Translator::run()
{
  const auto& mode = snap_.mode;
  if (mode.base() == BaseMode::Machine)
    {
      identityResult(va_);
      return;
    }

  bool user = mode.isUser();
  if (not mode.virt())
    {
      if (atp::mode(snap_.satp) != atp::MODE_SV39)
        {
          identityResult(va_);
          return;
        }
      Stage1Context ctx{ user, (snap_.mstatus & status::SUM) != 0,
                         (snap_.mstatus & status::MXR) != 0 };
      runSingleStage(snap_.satp, false, ctx);
      return;
    }

  Stage1Context vsCtx{ user, (snap_.vsstatus & status::SUM) != 0,
                       ((snap_.vsstatus | snap_.mstatus) & status::MXR) != 0 };
  bool vsOn = atp::mode(snap_.vsatp) == atp::MODE_SV39;
  bool gOn = atp::mode(snap_.hgatp) == atp::MODE_SV39;

  if (not vsOn and not gOn)
    {
      identityResult(va_);
      out_.gpa = va_;
    }
  else if (not gOn)
    runSingleStage(snap_.vsatp, true, vsCtx);
  else if (not vsOn)
    {
      out_.gpa = va_;
      uint64_t hpa = 0;
      PageSize size;
      Perms perms;
      auto before = out_.tlbEvents.size();
      if (gTranslate(va_, false, hpa, size, perms))
        {
          out_.pa.raw = hpa;
          out_.size = size;
          out_.perms = perms;
          out_.tlbHit = out_.tlbEvents.size() > before and
            out_.tlbEvents[before].type == TlbEvent::Type::Hit;
        }
    }
  else
    runNested(vsCtx);
}

}


Translation
translate(const SparseMemory& mem, const CsrSnapshot& snap, uint64_t va, Access access, Tlb* tlb)
{
  Translation out;
  Translator(mem, snap, va, access, tlb, out).run();
  return out;
}

}
