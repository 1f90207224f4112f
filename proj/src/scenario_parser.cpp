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

#include <charconv>
#include <map>
#include <set>

#include <fmt/format.h>

#include "hyp/csr.hpp"
#include "hyp/scenario.hpp"

namespace hyp::scenario
{

namespace
{

std::vector<std::string_view>
tokenize(std::string_view line)
{
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size())
    {
      while (i < line.size() and (line[i] == ' ' or line[i] == '\t' or line[i] == '\r'))
        ++i;
      size_t start = i;
      while (i < line.size() and line[i] != ' ' and line[i] != '\t' and line[i] != '\r')
        ++i;
      if (i > start)
        out.push_back(line.substr(start, i - start));
    }
  return out;
}


// Positional words plus key=value operands of one line.
class Operands
{
public:

  Operands(int line, const std::vector<std::string_view>& tokens, size_t firstOperand)
    : line_(line)
  {
    for (size_t i = firstOperand; i < tokens.size(); ++i)
      {
        auto tok = tokens[i];
        auto eq = tok.find('=');
        if (eq == std::string_view::npos)
          {
            positional_.push_back(tok);
            continue;
          }
        auto key = tok.substr(0, eq);
        if (keyed_.contains(key))
          throw ParseError(line_, fmt::format("duplicate operand '{}'", key));
        keyed_[key] = tok.substr(eq + 1);
      }
  }

  void allow(std::initializer_list<std::string_view> keys, size_t maxPositional) const
  {
    std::set<std::string_view> allowed(keys);
    for (const auto& [key, value] : keyed_)
      if (not allowed.contains(key))
        throw ParseError(line_, fmt::format("unknown operand '{}'", key));
    if (positional_.size() > maxPositional)
      throw ParseError(line_, fmt::format("unexpected operand '{}'", positional_[maxPositional]));
  }

  std::string_view positional(size_t i, std::string_view what) const
  {
    if (i >= positional_.size())
      throw ParseError(line_, fmt::format("missing {}", what));
    return positional_[i];
  }

  size_t positionalCount() const
  { return positional_.size(); }

  std::optional<std::string_view> text(std::string_view key) const
  {
    auto it = keyed_.find(key);
    if (it == keyed_.end())
      return std::nullopt;
    return it->second;
  }

  std::optional<uint64_t> hex(std::string_view key) const
  {
    auto t = text(key);
    if (not t)
      return std::nullopt;
    return parseHex(*t, key);
  }

  uint64_t requireHex(std::string_view key) const
  {
    auto v = hex(key);
    if (not v)
      throw ParseError(line_, fmt::format("missing operand '{}='", key));
    return *v;
  }

  std::optional<uint64_t> number(std::string_view key) const
  {
    auto t = text(key);
    if (not t)
      return std::nullopt;
    if (t->starts_with("0x"))
      return parseHex(*t, key);
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
    if (ec != std::errc() or ptr != t->data() + t->size())
      throw ParseError(line_, fmt::format("malformed number '{}' for '{}'", *t, key));
    return v;
  }

  uint64_t parseHex(std::string_view t, std::string_view what) const
  {
    if (not t.starts_with("0x") or t.size() == 2)
      throw ParseError(line_, fmt::format("malformed hex '{}' for '{}'", t, what));
    uint64_t v = 0;
    auto body = t.substr(2);
    std::string digits;
    for (char c : body)
      if (c != '_')
        digits += c;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, 16);
    if (ec != std::errc() or ptr != digits.data() + digits.size())
      throw ParseError(line_, fmt::format("malformed hex '{}' for '{}'", t, what));
    return v;
  }

private:

  int line_;
  std::vector<std::string_view> positional_;
  std::map<std::string_view, std::string_view, std::less<>> keyed_;
};


EffectiveMode
requireMode(int line, std::string_view text)
{
  auto mode = parseEffectiveMode(text);
  if (not mode)
    throw ParseError(line, fmt::format("unknown mode '{}' (expected M, HS, VS, U or VU)", text));
  return *mode;
}


struct CauseRef
{
  bool interrupt;
  unsigned code;
};


CauseRef
requireCause(int line, std::string_view name)
{
  if (auto e = parseExceptionCause(name))
    return { false, code(*e) };
  if (auto i = parseInterruptCause(name))
    return { true, code(*i) };
  throw ParseError(line, fmt::format("unknown cause '{}'; valid causes: {}", name, causeMnemonics()));
}


std::string
normalizePerms(int line, std::string_view text)
{
  std::string out;
  for (char c : text)
    if (c != '-' and std::string_view("rwxug").find(c) == std::string_view::npos)
      throw ParseError(line, fmt::format("bad permission letter '{}' in '{}'", c, text));
  for (char c : std::string_view("rwxug"))
    if (text.find(c) != std::string_view::npos)
      out += c;
  return out;
}


DirectiveBody
parseExpect(int line, const Operands& ops)
{
  auto what = ops.positional(0, "expectation kind");
  if (what == "ok")
    {
      ops.allow({ "pa", "value", "mode", "count" }, 1);
      ExpectOk e;
      e.pa = ops.hex("pa");
      e.value = ops.hex("value");
      e.count = ops.number("count");
      if (auto m = ops.text("mode"))
        e.mode = requireMode(line, *m);
      return e;
    }
  if (what == "trap")
    {
      ops.allow({ "cause", "handled_in", "tval", "htval" }, 1);
      auto name = ops.text("cause");
      if (not name)
        throw ParseError(line, "expect trap needs cause=");
      ExpectTrap e;
      auto ref = requireCause(line, *name);
      e.cause = std::string(*name);
      e.interrupt = ref.interrupt;
      e.code = ref.code;
      if (auto h = ops.text("handled_in"))
        {
          e.handledIn = requireMode(line, *h);
          if (*e.handledIn == EffectiveMode::U or *e.handledIn == EffectiveMode::VU)
            throw ParseError(line, "traps are never handled in U or VU");
        }
      e.tval = ops.hex("tval");
      e.htval = ops.hex("htval");
      return e;
    }
  if (what == "walk")
    {
      ops.allow({ "accesses" }, 1);
      auto n = ops.number("accesses");
      if (not n)
        throw ParseError(line, "expect walk needs accesses=");
      return ExpectWalk{ *n };
    }
  if (what == "tlb")
    {
      ops.allow({}, 2);
      auto hm = ops.positional(1, "hit or miss");
      if (hm != "hit" and hm != "miss")
        throw ParseError(line, fmt::format("expect tlb takes hit or miss, not '{}'", hm));
      return ExpectTlb{ hm == "hit" };
    }
  throw ParseError(line, fmt::format("unknown expectation '{}' (expected ok, trap, walk or tlb)", what));
}


DirectiveBody
parseLine(int line, const std::vector<std::string_view>& tokens)
{
  auto verb = tokens[0];
  Operands ops(line, tokens, 1);

  if (verb == "mode")
    {
      ops.allow({}, 1);
      return ModeDirective{ requireMode(line, ops.positional(0, "mode")) };
    }

  if (verb == "csr")
    {
      auto op = ops.positional(0, "read or write");
      CsrDirective d;
      d.name = std::string(ops.positional(1, "csr name"));
      if (not csrAddressOf(d.name))
        throw ParseError(line, fmt::format("unknown csr '{}'", d.name));
      d.pc = ops.hex("pc");
      if (op == "read")
        ops.allow({ "pc" }, 2);
      else if (op == "write")
        {
          ops.allow({ "pc" }, 3);
          d.write = true;
          d.value = ops.parseHex(ops.positional(2, "csr value"), "csr value");
        }
      else
        throw ParseError(line, fmt::format("csr takes read or write, not '{}'", op));
      return d;
    }

  if (verb == "mem")
    {
      auto op = ops.positional(0, "back, write64 or read64");
      MemDirective d;
      if (op == "back")
        {
          ops.allow({ "pa", "len" }, 1);
          d.op = MemDirective::Op::Back;
          d.operand = ops.requireHex("len");
        }
      else if (op == "write64")
        {
          ops.allow({ "pa", "value" }, 1);
          d.op = MemDirective::Op::Write64;
          d.operand = ops.requireHex("value");
        }
      else if (op == "read64")
        {
          ops.allow({ "pa" }, 1);
          d.op = MemDirective::Op::Read64;
        }
      else
        throw ParseError(line, fmt::format("mem takes back, write64 or read64, not '{}'", op));
      d.pa = ops.requireHex("pa");
      return d;
    }

  if (verb == "pool")
    {
      ops.allow({ "host", "guest" }, 0);
      return PoolDirective{ ops.hex("host"), ops.hex("guest") };
    }

  if (verb == "map")
    {
      ops.allow({ "va", "pa", "size", "perms", "asid", "vmid", "root", "ad" }, 1);
      auto stage = ops.positional(0, "stage1 or gstage");
      if (stage != "stage1" and stage != "gstage")
        throw ParseError(line, fmt::format("map takes stage1 or gstage, not '{}'", stage));
      MapDirective d;
      d.gstage = stage == "gstage";
      d.va = ops.requireHex("va");
      d.pa = ops.requireHex("pa");
      auto size = ops.text("size");
      if (not size or not parsePageSize(*size))
        throw ParseError(line, "map needs size=4K, 2M or 1G");
      d.size = *parsePageSize(*size);
      auto perms = ops.text("perms");
      if (not perms)
        throw ParseError(line, "map needs perms=");
      d.perms = normalizePerms(line, *perms);
      d.asid = ops.number("asid");
      d.vmid = ops.number("vmid");
      if (d.gstage and d.asid)
        throw ParseError(line, "asid= does not apply to a gstage mapping");
      if (not d.gstage and d.vmid)
        throw ParseError(line, "vmid= does not apply to a stage1 mapping");
      if (auto root = ops.text("root"))
        {
          if (d.gstage or (*root != "satp" and *root != "vsatp"))
            throw ParseError(line, "root= is satp or vsatp, for stage1 only");
          d.root = std::string(*root);
        }
      if (auto ad = ops.text("ad"))
        {
          if (*ad != "ad" and *ad != "a" and *ad != "d" and *ad != "none")
            throw ParseError(line, "ad= is one of ad, a, d, none");
          d.ad = std::string(*ad);
        }
      return d;
    }

  if (verb == "access")
    {
      ops.allow({ "va", "bytes", "pc" }, 1);
      auto kind = ops.positional(0, "load, store or fetch");
      AccessDirective d;
      if (kind == "load")
        d.access = Access::Load;
      else if (kind == "store")
        d.access = Access::Store;
      else if (kind == "fetch")
        d.access = Access::Fetch;
      else
        throw ParseError(line, fmt::format("access takes load, store or fetch, not '{}'", kind));
      d.va = ops.requireHex("va");
      d.bytes = ops.number("bytes");
      if (d.bytes and *d.bytes != 1 and *d.bytes != 2 and *d.bytes != 4 and *d.bytes != 8)
        throw ParseError(line, fmt::format("bytes={} is not 1, 2, 4 or 8", *d.bytes));
      d.pc = ops.hex("pc");
      return d;
    }

  if (verb == "trap")
    {
      auto op = ops.positional(0, "inject or return");
      if (op == "return")
        {
          ops.allow({}, 2);
          auto from = requireMode(line, ops.positional(1, "mode to return from"));
          if (from != EffectiveMode::M and from != EffectiveMode::HS and from != EffectiveMode::VS)
            throw ParseError(line, "trap return is from M, HS or VS");
          return TrapReturnDirective{ from };
        }
      if (op != "inject")
        throw ParseError(line, fmt::format("trap takes inject or return, not '{}'", op));
      ops.allow({ "cause", "tval", "gpa", "epc" }, 1);
      auto name = ops.text("cause");
      if (not name)
        throw ParseError(line, "trap inject needs cause=");
      auto ref = requireCause(line, *name);
      TrapInjectDirective d;
      d.cause = std::string(*name);
      d.interrupt = ref.interrupt;
      d.code = ref.code;
      d.tval = ops.hex("tval").value_or(0);
      d.gpa = ops.hex("gpa");
      d.epc = ops.hex("epc");
      bool guest = not d.interrupt and isGuestPageFault(ExceptionCause(d.code));
      if (guest and not d.gpa)
        throw ParseError(line, fmt::format("{} needs gpa=", d.cause));
      if (not guest and d.gpa)
        throw ParseError(line, fmt::format("gpa= only pairs with guest-page faults, not {}", d.cause));
      return d;
    }

  if (verb == "ecall")
    {
      ops.allow({ "pc" }, 0);
      return EcallDirective{ ops.hex("pc") };
    }

  if (verb == "fence")
    {
      ops.allow({ "addr", "id" }, 1);
      auto name = ops.positional(0, "fence kind");
      auto kind = parseFenceKind(name);
      if (not kind)
        throw ParseError(line, fmt::format("unknown fence '{}' (expected sfence.vma, hfence.vvma "
                                           "or hfence.gvma)", name));
      FenceDirective d{ *kind, ops.hex("addr"), ops.number("id") };
      unsigned bits = *kind == FenceKind::HfenceGvma ? atp::VMID_BITS : atp::ASID_BITS;
      if (d.id and (*d.id >> bits))
        throw ParseError(line, fmt::format("id=0x{:x} does not fit the {}-bit {} of {}", *d.id, bits,
                                           bits == atp::VMID_BITS ? "vmid" : "asid", name));
      return d;
    }

  if (verb == "expect")
    return parseExpect(line, ops);

  throw ParseError(line, fmt::format("unknown directive '{}'", verb));
}


bool
isExpectable(const DirectiveBody& body)
{
  if (auto mem = std::get_if<MemDirective>(&body))
    return mem->op == MemDirective::Op::Read64;
  return std::holds_alternative<CsrDirective>(body) or
    std::holds_alternative<AccessDirective>(body) or
    std::holds_alternative<TrapInjectDirective>(body) or
    std::holds_alternative<TrapReturnDirective>(body) or
    std::holds_alternative<EcallDirective>(body) or
    std::holds_alternative<FenceDirective>(body);
}


std::string
hex(uint64_t v)
{
  return fmt::format("0x{:x}", v);
}


std::string
optHex(std::string_view key, const std::optional<uint64_t>& v)
{
  return v ? fmt::format(" {}={}", key, hex(*v)) : std::string();
}

}


ParseError::ParseError(int line, const std::string& message)
  : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line), message_(message)
{
}


bool
Directive::isExpect() const
{
  return std::holds_alternative<ExpectOk>(body) or std::holds_alternative<ExpectTrap>(body) or
    std::holds_alternative<ExpectWalk>(body) or std::holds_alternative<ExpectTlb>(body);
}


Scenario
parse(std::string_view text, std::string name)
{
  Scenario scenario;
  scenario.name = std::move(name);

  std::optional<size_t> anchor;
  int lineNo = 0;
  size_t pos = 0;
  while (pos <= text.size())
    {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos)
        end = text.size();
      auto line = text.substr(pos, end - pos);
      pos = end + 1;
      ++lineNo;

      if (auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      auto tokens = tokenize(line);
      if (tokens.empty())
        continue;

      Directive d{ lineNo, parseLine(lineNo, tokens) };
      if (d.isExpect())
        {
          if (not anchor or not isExpectable(scenario.directives[*anchor].body))
            throw ParseError(lineNo, "expect must follow a csr, access, trap, ecall, "
                             "mem read64 or fence directive");
        }
      else
        anchor = scenario.directives.size();
      scenario.directives.push_back(std::move(d));
    }
  return scenario;
}


std::string
serialize(const Scenario& scenario)
{
  std::string out;
  for (const auto& d : scenario.directives)
    {
      std::visit([&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ModeDirective>)
          out += fmt::format("mode {}", toString(b.mode));
        else if constexpr (std::is_same_v<T, CsrDirective>)
          out += (b.write ? fmt::format("csr write {} {}", b.name, hex(b.value))
                          : fmt::format("csr read {}", b.name)) + optHex("pc", b.pc);
        else if constexpr (std::is_same_v<T, MemDirective>)
          {
            if (b.op == MemDirective::Op::Back)
              out += fmt::format("mem back pa={} len={}", hex(b.pa), hex(b.operand));
            else if (b.op == MemDirective::Op::Write64)
              out += fmt::format("mem write64 pa={} value={}", hex(b.pa), hex(b.operand));
            else
              out += fmt::format("mem read64 pa={}", hex(b.pa));
          }
        else if constexpr (std::is_same_v<T, PoolDirective>)
          out += "pool" + optHex("host", b.host) + optHex("guest", b.guest);
        else if constexpr (std::is_same_v<T, MapDirective>)
          {
            out += fmt::format("map {} va={} pa={} size={} perms={}", b.gstage ? "gstage" : "stage1",
                               hex(b.va), hex(b.pa), toString(b.size),
                               b.perms.empty() ? "-" : b.perms);
            out += optHex("asid", b.asid) + optHex("vmid", b.vmid);
            if (b.root)
              out += " root=" + *b.root;
            if (b.ad != "ad")
              out += " ad=" + b.ad;
          }
        else if constexpr (std::is_same_v<T, AccessDirective>)
          {
            out += fmt::format("access {} va={}", toString(b.access), hex(b.va));
            if (b.bytes)
              out += fmt::format(" bytes={}", *b.bytes);
            out += optHex("pc", b.pc);
          }
        else if constexpr (std::is_same_v<T, TrapInjectDirective>)
          out += fmt::format("trap inject cause={} tval={}", b.cause, hex(b.tval)) +
            optHex("gpa", b.gpa) + optHex("epc", b.epc);
        else if constexpr (std::is_same_v<T, TrapReturnDirective>)
          out += fmt::format("trap return {}", toString(b.from));
        else if constexpr (std::is_same_v<T, EcallDirective>)
          out += "ecall" + optHex("pc", b.pc);
        else if constexpr (std::is_same_v<T, FenceDirective>)
          out += fmt::format("fence {}", toString(b.kind)) + optHex("addr", b.addr) + optHex("id", b.id);
        else if constexpr (std::is_same_v<T, ExpectOk>)
          {
            out += "expect ok" + optHex("pa", b.pa) + optHex("value", b.value);
            if (b.mode)
              out += fmt::format(" mode={}", toString(*b.mode));
            if (b.count)
              out += fmt::format(" count={}", *b.count);
          }
        else if constexpr (std::is_same_v<T, ExpectTrap>)
          {
            out += fmt::format("expect trap cause={}", b.cause);
            if (b.handledIn)
              out += fmt::format(" handled_in={}", toString(*b.handledIn));
            out += optHex("tval", b.tval) + optHex("htval", b.htval);
          }
        else if constexpr (std::is_same_v<T, ExpectWalk>)
          out += fmt::format("expect walk accesses={}", b.accesses);
        else if constexpr (std::is_same_v<T, ExpectTlb>)
          out += fmt::format("expect tlb {}", b.hit ? "hit" : "miss");
      }, d.body);
      out += '\n';
    }
  return out;
}


bool
sameDirectives(const Scenario& a, const Scenario& b)
{
  if (a.directives.size() != b.directives.size())
    return false;
  for (size_t i = 0; i < a.directives.size(); ++i)
    if (a.directives[i].body != b.directives[i].body)
      return false;
  return true;
}

}
