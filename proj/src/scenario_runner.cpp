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

#include <array>
#include <functional>
#include <random>

#include <fmt/format.h>

#include "hyp/oracle.hpp"
#include "hyp/runner.hpp"

namespace hyp::scenario
{

using json = nlohmann::ordered_json;

void
TraceLog::record(const std::string& scenario, int line, const std::string& kind, json fields)
{
  json rec;
  rec["seq"] = seq_++;
  rec["scenario"] = scenario;
  rec["line"] = line;
  rec["kind"] = kind;
  for (auto& [key, value] : fields.items())
    rec[key] = value;
  records_.push_back(std::move(rec));
}


std::string
TraceLog::jsonLines() const
{
  std::string out;
  for (const auto& rec : records_)
    {
      out += rec.dump();
      out += '\n';
    }
  return out;
}


namespace
{

constexpr uint64_t kPage = 4096;
constexpr uint64_t kDefaultHostPool = 0x9000'0000;
constexpr uint64_t kDefaultGuestPool = 0x0100'0000;
constexpr unsigned kNeighbourProbes = 4;

std::string
hex(uint64_t v)
{
  return fmt::format("0x{:x}", v);
}


struct TrapInfo
{
  unsigned code = 0;
  bool interrupt = false;
  std::string name;
  EffectiveMode target = EffectiveMode::M;
  uint64_t tval = 0;
  uint64_t htval = 0;
};


// What a directive produced, for the expectations that follow it.
struct Outcome
{
  bool failed = false;
  std::string error;
  std::optional<TrapInfo> trap;
  std::optional<uint64_t> pa;
  std::optional<uint64_t> value;
  std::optional<uint64_t> count;
  std::optional<size_t> accesses;
  std::optional<bool> tlbHit;
  EffectiveMode mode = EffectiveMode::M;
};


ExceptionCause
accessFaultFor(Access access)
{
  switch (access)
    {
    case Access::Fetch: return ExceptionCause::InstructionAccessFault;
    case Access::Load:  return ExceptionCause::LoadAccessFault;
    case Access::Store: return ExceptionCause::StoreAmoAccessFault;
    }
  return ExceptionCause::LoadAccessFault;
}


ExceptionCause
misalignedFor(Access access)
{
  switch (access)
    {
    case Access::Fetch: return ExceptionCause::InstructionAddressMisaligned;
    case Access::Load:  return ExceptionCause::LoadAddressMisaligned;
    case Access::Store: return ExceptionCause::StoreAmoAddressMisaligned;
    }
  return ExceptionCause::LoadAddressMisaligned;
}


ExceptionCause
ecallFrom(EffectiveMode mode)
{
  switch (mode)
    {
    case EffectiveMode::M:  return ExceptionCause::EcallFromM;
    case EffectiveMode::HS: return ExceptionCause::EcallFromHS;
    case EffectiveMode::VS: return ExceptionCause::EcallFromVS;
    case EffectiveMode::U:
    case EffectiveMode::VU: return ExceptionCause::EcallFromU;
    }
  return ExceptionCause::EcallFromU;
}


std::string_view
eventName(TlbEvent::Type type)
{
  switch (type)
    {
    case TlbEvent::Type::Hit:    return "tlb-hit";
    case TlbEvent::Type::Miss:   return "tlb-miss";
    case TlbEvent::Type::Insert: return "tlb-insert";
    }
  return "tlb-miss";
}


uint64_t
leafFlags(const MapDirective& d)
{
  uint64_t flags = pte::V;
  for (char c : d.perms)
    switch (c)
      {
      case 'r': flags |= pte::R; break;
      case 'w': flags |= pte::W; break;
      case 'x': flags |= pte::X; break;
      case 'u': flags |= pte::U; break;
      case 'g': flags |= pte::G; break;
      }
  if (d.ad == "ad" or d.ad == "a")
    flags |= pte::A;
  if (d.ad == "ad" or d.ad == "d")
    flags |= pte::D;
  return flags;
}


unsigned
leafLevel(PageSize size)
{
  switch (size)
    {
    case PageSize::Size4K: return 0;
    case PageSize::Size2M: return 1;
    case PageSize::Size1G: return 2;
    }
  return 0;
}


class Runner
{
public:

  Runner(const Scenario& scenario, const RunOptions& options, TraceLog& trace)
    : scenario_(scenario), options_(options), trace_(trace), machine_(options.machine),
      rng_(options.seed)
  {
    result_.name = scenario.name;
  }

  RunResult run();

private:

  using Builder = std::function<uint64_t()>;
  using ToHost = std::function<uint64_t(uint64_t)>;
  using Index = std::function<unsigned(uint64_t, unsigned)>;

  void emit(const std::string& kind, json fields = json::object())
  { trace_.record(scenario_.name, line_, kind, std::move(fields)); }

  void fail(const std::string& message)
  { result_.failures.push_back({ line_, message }); }

  void execute(const DirectiveBody& body);
  void check(const DirectiveBody& expect);

  void raise(const Trap& trap, uint64_t epc);
  void modeChanged(PrivilegeState before);
  void traceCsrChanges(const std::array<uint64_t, 3>& before);
  std::array<uint64_t, 3> statusRegs() const;

  void doCsr(const CsrDirective& d);
  void doMem(const MemDirective& d);
  void doMap(const MapDirective& d);
  void doAccess(const AccessDirective& d);
  void doTrapReturn(const TrapReturnDirective& d);
  void doFence(const FenceDirective& d);
  void oracleCheck(uint64_t va, Access access);

  uint64_t allocHost(uint64_t bytes);
  uint64_t allocGuestTable();
  uint64_t guestToHost(uint64_t gpa);
  void zero(uint64_t pa, uint64_t bytes);
  void setAtp(CsrNumber reg, uint64_t value);
  void mapStage1(const MapDirective& d);
  void mapGStage(const MapDirective& d);
  void buildLeaf(uint64_t root, uint64_t input, unsigned level, uint64_t leaf,
                 const Index& index, const ToHost& toHost, const Builder& alloc);

  void checkOk(const ExpectOk& e);
  void checkTrap(const ExpectTrap& e);

  const Scenario& scenario_;
  const RunOptions& options_;
  TraceLog& trace_;
  Machine machine_;
  std::mt19937_64 rng_;
  RunResult result_;
  Outcome outcome_;
  int line_ = 0;
  uint64_t hostPool_ = kDefaultHostPool;
  uint64_t guestPool_ = kDefaultGuestPool;
};


RunResult
Runner::run()
{
  for (const auto& d : scenario_.directives)
    {
      line_ = d.line;
      if (d.isExpect())
        {
          ++result_.expectations;
          check(d.body);
          continue;
        }

      outcome_ = Outcome{};
      try
        {
          execute(d.body);
        }
      catch (const std::exception& e)
        {
          outcome_.failed = true;
          outcome_.error = e.what();
          fail(e.what());
        }
      outcome_.mode = machine_.state.mode.effective();
    }
  result_.passed = result_.failures.empty();
  return result_;
}


void
Runner::execute(const DirectiveBody& body)
{
  auto& state = machine_.state;

  if (auto d = std::get_if<ModeDirective>(&body))
    {
      auto before = state.mode;
      state.mode = PrivilegeState::fromEffective(d->mode);
      modeChanged(before);
    }
  else if (auto d = std::get_if<CsrDirective>(&body))
    doCsr(*d);
  else if (auto d = std::get_if<MemDirective>(&body))
    doMem(*d);
  else if (auto d = std::get_if<PoolDirective>(&body))
    {
      if (d->host)
        hostPool_ = *d->host;
      if (d->guest)
        guestPool_ = *d->guest;
    }
  else if (auto d = std::get_if<MapDirective>(&body))
    doMap(*d);
  else if (auto d = std::get_if<AccessDirective>(&body))
    doAccess(*d);
  else if (auto d = std::get_if<TrapInjectDirective>(&body))
    {
      auto trap = d->interrupt ? Trap::interrupt(InterruptCause(d->code))
                               : Trap::exception(ExceptionCause(d->code), d->tval, d->gpa);
      raise(trap, d->epc.value_or(0));
    }
  else if (auto d = std::get_if<TrapReturnDirective>(&body))
    doTrapReturn(*d);
  else if (auto d = std::get_if<EcallDirective>(&body))
    raise(Trap::exception(ecallFrom(state.mode.effective())), d->pc.value_or(0));
  else if (auto d = std::get_if<FenceDirective>(&body))
    doFence(*d);
}


std::array<uint64_t, 3>
Runner::statusRegs() const
{
  const auto& csrs = machine_.state.csrs;
  return { csrs.peek(CsrNumber::MSTATUS), csrs.peek(CsrNumber::HSTATUS),
           csrs.peek(CsrNumber::VSSTATUS) };
}


void
Runner::traceCsrChanges(const std::array<uint64_t, 3>& before)
{
  static constexpr std::array regs{ CsrNumber::MSTATUS, CsrNumber::HSTATUS, CsrNumber::VSSTATUS };
  auto after = statusRegs();
  for (size_t i = 0; i < regs.size(); ++i)
    if (after[i] != before[i])
      emit("csr-write", { { "csr", csrNameOf(addr(regs[i])) }, { "address", hex(addr(regs[i])) },
                          { "value", hex(after[i]) } });
}


void
Runner::modeChanged(PrivilegeState before)
{
  auto now = machine_.state.mode;
  if (now != before)
    emit("mode-change", { { "from", toString(before.effective()) },
                          { "to", toString(now.effective()) } });
}


void
Runner::raise(const Trap& trap, uint64_t epc)
{
  json raised{ { "cause", trap.name() }, { "code", trap.code() },
               { "interrupt", trap.isInterrupt() }, { "tval", hex(trap.tval()) } };
  if (trap.gpa())
    raised["gpa"] = hex(*trap.gpa());
  emit("trap-raised", std::move(raised));

  auto before = machine_.state.mode;
  auto out = takeTrap(machine_.state, trap, epc);
  emit("trap-delegated", { { "cause", trap.name() }, { "origin", toString(out.origin.effective()) },
                           { "target", toString(out.target) } });
  for (const auto& w : out.writes)
    emit("csr-write", { { "csr", csrNameOf(w.address) }, { "address", hex(w.address) },
                        { "value", hex(w.value) } });
  modeChanged(before);

  outcome_.trap = TrapInfo{ trap.code(), trap.isInterrupt(), trap.name(), out.target, trap.tval(),
                            trap.gpa() ? *trap.gpa() >> 2 : 0 };
}


void
Runner::doCsr(const CsrDirective& d)
{
  auto& state = machine_.state;
  uint16_t address = *csrAddressOf(d.name);
  try
    {
      if (d.write)
        {
          uint64_t value = state.csrs.write(state.mode, address, d.value);
          uint16_t target = state.csrs.resolve(state.mode, address);
          emit("csr-write", { { "csr", csrNameOf(target) }, { "address", hex(target) },
                              { "value", hex(value) } });
          outcome_.value = value;
        }
      else
        outcome_.value = state.csrs.read(state.mode, address);
    }
  catch (const IllegalCsr& e)
    {
      raise(Trap::exception(e.cause()), d.pc.value_or(0));
    }
}


void
Runner::doMem(const MemDirective& d)
{
  auto& mem = machine_.memory;
  switch (d.op)
    {
    case MemDirective::Op::Back:
      mem.backRange(d.pa, d.operand);
      return;
    case MemDirective::Op::Write64:
      if (auto err = mem.write64(d.pa, d.operand); err != MemError::None)
        throw std::runtime_error(fmt::format("mem write64 at {}: {}", hex(d.pa), toString(err)));
      return;
    case MemDirective::Op::Read64:
      {
        uint64_t value = 0;
        if (auto err = mem.read64(d.pa, value); err != MemError::None)
          throw std::runtime_error(fmt::format("mem read64 at {}: {}", hex(d.pa), toString(err)));
        outcome_.value = value;
        return;
      }
    }
}


void
Runner::zero(uint64_t pa, uint64_t bytes)
{
  for (uint64_t off = 0; off < bytes; off += 8)
    machine_.memory.write64(pa + off, 0);
}


uint64_t
Runner::allocHost(uint64_t bytes)
{
  uint64_t base = (hostPool_ + bytes - 1) & ~(bytes - 1);
  hostPool_ = base + bytes;
  machine_.memory.backRange(base, bytes);
  zero(base, bytes);
  return base;
}


uint64_t
Runner::guestToHost(uint64_t gpa)
{
  auto& state = machine_.state;
  uint64_t hgatp = state.csrs.peek(CsrNumber::HGATP);
  if (atp::mode(hgatp) != atp::MODE_SV39)
    {
      machine_.memory.backRange(gpa & ~(kPage - 1), kPage);
      return gpa;
    }

  auto walk = walkGStage(machine_.memory, hgatp, GuestPhysAddr{ gpa }, Access::Load);
  if (walk.ok())
    {
      machine_.memory.backRange(walk.pa.raw & ~(kPage - 1), kPage);
      return walk.pa.raw;
    }

  // Table page with no G-stage mapping yet: give it a fresh host frame.
  uint64_t host = allocHost(kPage);
  MapDirective g;
  g.gstage = true;
  g.va = gpa & ~(kPage - 1);
  g.pa = host;
  g.perms = "rwu";
  mapGStage(g);
  return host | (gpa & (kPage - 1));
}


uint64_t
Runner::allocGuestTable()
{
  uint64_t gpa = (guestPool_ + kPage - 1) & ~(kPage - 1);
  guestPool_ = gpa + kPage;
  zero(guestToHost(gpa), kPage);
  return gpa;
}


void
Runner::setAtp(CsrNumber reg, uint64_t value)
{
  uint64_t v = machine_.state.csrs.poke(reg, value);
  emit("csr-write", { { "csr", csrNameOf(addr(reg)) }, { "address", hex(addr(reg)) },
                      { "value", hex(v) } });
}


void
Runner::buildLeaf(uint64_t root, uint64_t input, unsigned level, uint64_t leaf,
                  const Index& index, const ToHost& toHost, const Builder& alloc)
{
  auto& mem = machine_.memory;
  uint64_t table = root;
  for (unsigned l = 2; l > level; --l)
    {
      uint64_t slot = toHost(table + index(input, l) * 8);
      uint64_t raw = 0;
      mem.read64(slot, raw);
      Pte p{ raw };
      if (not p.v())
        {
          uint64_t next = alloc();
          // alloc may have rewritten tables; the slot address is stable.
          mem.write64(slot, Pte::make(next >> 12, pte::V).raw);
          table = next;
        }
      else if (p.isLeaf())
        throw std::runtime_error(fmt::format("mapping of {} overlaps an existing level-{} leaf",
                                             hex(input), l));
      else
        table = p.ppn() << 12;
    }
  mem.write64(toHost(table + index(input, level) * 8), leaf);
}


void
Runner::mapStage1(const MapDirective& d)
{
  auto& csrs = machine_.state.csrs;
  bool guest = d.root ? *d.root == "vsatp" : machine_.state.mode.virt();
  auto reg = guest ? CsrNumber::VSATP : CsrNumber::SATP;

  if (not VirtAddr{ d.va }.canonical())
    throw std::runtime_error(fmt::format("map va {} is not canonical", hex(d.va)));

  ToHost toHost = [&](uint64_t a) { return guest ? guestToHost(a) : a; };
  Builder alloc = [&]() { return guest ? allocGuestTable() : allocHost(kPage); };

  uint64_t atpValue = csrs.peek(reg);
  if (atp::mode(atpValue) != atp::MODE_SV39)
    {
      uint64_t root = alloc();
      setAtp(reg, atp::make(atp::MODE_SV39, d.asid.value_or(0), root >> 12));
      atpValue = csrs.peek(reg);
    }

  Index index = [](uint64_t va, unsigned l) { return VirtAddr{ va }.vpn(l); };
  buildLeaf(atp::ppn(atpValue) << 12, d.va, leafLevel(d.size),
            Pte::make(d.pa >> 12, leafFlags(d)).raw, index, toHost, alloc);
}


void
Runner::mapGStage(const MapDirective& d)
{
  auto& csrs = machine_.state.csrs;
  if (not GuestPhysAddr{ d.va }.valid())
    throw std::runtime_error(fmt::format("map gpa {} exceeds 41 bits", hex(d.va)));

  uint64_t hgatp = csrs.peek(CsrNumber::HGATP);
  if (atp::mode(hgatp) != atp::MODE_SV39)
    {
      uint64_t root = allocHost(4 * kPage);
      setAtp(CsrNumber::HGATP, atp::make(atp::MODE_SV39, d.vmid.value_or(0), root >> 12));
      hgatp = csrs.peek(CsrNumber::HGATP);
    }

  ToHost toHost = [](uint64_t a) { return a; };
  Builder alloc = [&]() { return allocHost(kPage); };
  Index index = [](uint64_t gpa, unsigned l) { return GuestPhysAddr{ gpa }.index(l); };
  buildLeaf(atp::ppn(hgatp) << 12, d.va, leafLevel(d.size),
            Pte::make(d.pa >> 12, leafFlags(d)).raw, index, toHost, alloc);
}


void
Runner::doMap(const MapDirective& d)
{
  uint64_t align = pageBytes(d.size) - 1;
  if ((d.va & align) or (d.pa & align))
    throw std::runtime_error(fmt::format("map {} -> {} is not {} aligned", hex(d.va), hex(d.pa),
                                         toString(d.size)));
  if (d.gstage)
    mapGStage(d);
  else
    mapStage1(d);
}


void
Runner::oracleCheck(uint64_t va, Access access)
{
  std::vector<std::pair<uint64_t, Access>> probes{ { va, access } };
  std::uniform_int_distribution<int64_t> delta(-0x4000, 0x4000);
  std::uniform_int_distribution<int> kind(0, 2);
  for (unsigned i = 0; i < kNeighbourProbes; ++i)
    probes.emplace_back(va + uint64_t(delta(rng_)), Access(kind(rng_)));

  auto snap = CsrSnapshot::capture(machine_.state);
  for (auto [pva, pacc] : probes)
    {
      auto actual = machine_.walk(pva, pacc);
      auto expected = oracle::oracleTranslate(machine_.memory, snap, pva, pacc);
      auto coords = fmt::format("{} va={} mode={}", toString(pacc), hex(pva),
                                toString(snap.mode));
      auto report = oracle::compare(actual, expected, true, coords);
      if (not report.agree)
        fail(fmt::format("oracle disagreement for {}: expected {}, walker gave {}",
                         report.coordinates, report.expected, report.actual));
    }
}


void
Runner::doAccess(const AccessDirective& d)
{
  uint64_t epc = d.pc.value_or(d.access == Access::Fetch ? d.va : 0);
  if (d.bytes and (d.va % *d.bytes) != 0)
    {
      raise(Trap::exception(misalignedFor(d.access), d.va), epc);
      return;
    }

  auto t = machine_.translate(d.va, d.access);
  for (const auto& ev : t.tlbEvents)
    emit(std::string(eventName(ev.type)), { { "tlb", toString(ev.kind) },
                                            { "address", hex(ev.address) } });
  for (const auto& step : t.accesses)
    emit("walk-step", { { "stage", toString(step.stage) }, { "level", step.level },
                        { "pa", hex(step.pa) }, { "value", hex(step.value) } });
  outcome_.accesses = t.accesses.size();
  outcome_.tlbHit = t.tlbHit;

  if (options_.oracleCheck)
    oracleCheck(d.va, d.access);

  if (not t.ok())
    {
      raise(t.fault->toTrap(), epc);
      return;
    }

  uint64_t value = 0;
  if (machine_.memory.read64(t.pa.raw & ~uint64_t(7), value) != MemError::None)
    {
      raise(Trap::exception(accessFaultFor(d.access), d.va), epc);
      return;
    }
  outcome_.pa = t.pa.raw;
  if (d.access != Access::Load)
    return;
  if (d.bytes and *d.bytes < 8)
    {
      unsigned shift = 8 * unsigned(t.pa.raw & 7);
      value = (value >> shift) & ((uint64_t(1) << (8 * *d.bytes)) - 1);
    }
  outcome_.value = value;
}


void
Runner::doTrapReturn(const TrapReturnDirective& d)
{
  auto before = machine_.state.mode;
  auto regs = statusRegs();
  try
    {
      trapReturn(machine_.state, d.from);
    }
  catch (const ReturnTrapped& e)
    {
      raise(Trap::exception(e.cause()), 0);
      return;
    }
  traceCsrChanges(regs);
  modeChanged(before);
}


void
Runner::doFence(const FenceDirective& d)
{
  if (auto cause = fenceFault(machine_.state, d.kind))
    {
      raise(Trap::exception(*cause), 0);
      return;
    }
  size_t removed = machine_.fence(d.kind, d.addr, d.id);
  json fields{ { "fence", toString(d.kind) } };
  if (d.addr)
    fields["addr"] = hex(*d.addr);
  if (d.id)
    fields["id"] = *d.id;
  fields["removed"] = removed;
  emit("tlb-flush", std::move(fields));
  outcome_.count = removed;
}


void
Runner::check(const DirectiveBody& expect)
{
  if (outcome_.failed)
    {
      fail(fmt::format("cannot check expectation: directive failed ({})", outcome_.error));
      return;
    }

  if (auto e = std::get_if<ExpectOk>(&expect))
    checkOk(*e);
  else if (auto e = std::get_if<ExpectTrap>(&expect))
    checkTrap(*e);
  else if (auto e = std::get_if<ExpectWalk>(&expect))
    {
      if (not outcome_.accesses)
        fail("expect walk needs an access directive");
      else if (*outcome_.accesses != e->accesses)
        fail(fmt::format("expected {} walk accesses, got {}", e->accesses, *outcome_.accesses));
    }
  else if (auto e = std::get_if<ExpectTlb>(&expect))
    {
      if (not outcome_.tlbHit)
        fail("expect tlb needs an access directive");
      else if (*outcome_.tlbHit != e->hit)
        fail(fmt::format("expected tlb {}, got tlb {}", e->hit ? "hit" : "miss",
                         *outcome_.tlbHit ? "hit" : "miss"));
    }
}


void
Runner::checkOk(const ExpectOk& e)
{
  if (outcome_.trap)
    {
      fail(fmt::format("expected ok, got trap {} handled in {}", outcome_.trap->name,
                       toString(outcome_.trap->target)));
      return;
    }
  auto field = [&](std::string_view what, const std::optional<uint64_t>& want,
                   const std::optional<uint64_t>& got) {
    if (not want)
      return;
    if (not got)
      fail(fmt::format("expected {}={} but the directive produced no {}", what, hex(*want), what));
    else if (*got != *want)
      fail(fmt::format("expected {}={}, got {}", what, hex(*want), hex(*got)));
  };
  field("pa", e.pa, outcome_.pa);
  field("value", e.value, outcome_.value);
  if (e.count)
    {
      if (not outcome_.count)
        fail("expect ok count= needs a fence directive");
      else if (*outcome_.count != *e.count)
        fail(fmt::format("expected count={}, got {}", *e.count, *outcome_.count));
    }
  if (e.mode and *e.mode != outcome_.mode)
    fail(fmt::format("expected mode={}, got {}", toString(*e.mode), toString(outcome_.mode)));
}


void
Runner::checkTrap(const ExpectTrap& e)
{
  if (not outcome_.trap)
    {
      fail(fmt::format("expected trap {}, got ok", e.cause));
      return;
    }
  const auto& t = *outcome_.trap;
  if (t.code != e.code or t.interrupt != e.interrupt)
    fail(fmt::format("expected trap {}, got {}", e.cause, t.name));
  if (e.handledIn and *e.handledIn != t.target)
    fail(fmt::format("expected {} handled in {}, got {}", e.cause, toString(*e.handledIn),
                     toString(t.target)));
  if (e.tval and *e.tval != t.tval)
    fail(fmt::format("expected tval={}, got {}", hex(*e.tval), hex(t.tval)));
  if (e.htval and *e.htval != t.htval)
    fail(fmt::format("expected htval={}, got {}", hex(*e.htval), hex(t.htval)));
}

}


RunResult
run(const Scenario& scenario, const RunOptions& options, TraceLog& trace)
{
  return Runner(scenario, options, trace).run();
}

}
