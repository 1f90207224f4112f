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

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "hyp/scenario.hpp"

namespace hyp::scenario
{
namespace
{

std::string
slurp(const std::filesystem::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int
errorLine(std::string_view text)
{
  try
    {
      parse(text);
    }
  catch (const ParseError& e)
    {
      return e.line();
    }
  return 0;
}

TEST(Parser, ModeLine)
{
  auto s = parse("mode VS\n");
  ASSERT_EQ(s.directives.size(), 1u);
  auto* m = std::get_if<ModeDirective>(&s.directives[0].body);
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->mode, EffectiveMode::VS);
  EXPECT_EQ(s.directives[0].line, 1);
}

TEST(Parser, AccessWithWidth)
{
  auto s = parse("access load va=0x1000 bytes=8");
  ASSERT_EQ(s.directives.size(), 1u);
  auto* a = std::get_if<AccessDirective>(&s.directives[0].body);
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->access, Access::Load);
  EXPECT_EQ(a->va, 0x1000u);
  EXPECT_EQ(a->bytes, 8u);
  EXPECT_FALSE(a->pc);
}

TEST(Parser, CommentsAndBlankLines)
{
  auto s = parse("# header\n\n  mode HS   # trailing\n\naccess fetch va=0x2000\nexpect ok\n");
  ASSERT_EQ(s.directives.size(), 3u);
  EXPECT_EQ(s.directives[0].line, 3);
  EXPECT_EQ(s.directives[1].line, 5);
  EXPECT_TRUE(s.directives[2].isExpect());
}

TEST(Parser, MapNormalizesPerms)
{
  auto s = parse("map stage1 va=0x1000 pa=0x2000 size=4K perms=gux-wr asid=3");
  auto& m = std::get<MapDirective>(s.directives[0].body);
  EXPECT_EQ(m.perms, "rwxug");
  EXPECT_EQ(m.asid, 3u);
  EXPECT_EQ(m.ad, "ad");
  EXPECT_FALSE(m.gstage);
}

TEST(Parser, TrapInjectResolvesCause)
{
  auto s = parse("trap inject cause=GuestLoadPageFault tval=0x10 gpa=0x8000\n"
                 "expect trap cause=GuestLoadPageFault handled_in=HS htval=0x2000\n"
                 "trap inject cause=SupervisorTimerInterrupt\n");
  auto& t = std::get<TrapInjectDirective>(s.directives[0].body);
  EXPECT_EQ(t.code, 21u);
  EXPECT_FALSE(t.interrupt);
  EXPECT_EQ(t.gpa, 0x8000u);
  auto& e = std::get<ExpectTrap>(s.directives[1].body);
  EXPECT_EQ(e.handledIn, EffectiveMode::HS);
  EXPECT_EQ(e.htval, 0x2000u);
  auto& i = std::get<TrapInjectDirective>(s.directives[2].body);
  EXPECT_TRUE(i.interrupt);
  EXPECT_EQ(i.code, 5u);
}

TEST(Parser, UnknownCauseListsValidOnes)
{
  try
    {
      parse("mode HS\ntrap inject cause=BogusCause\n");
      FAIL() << "no error";
    }
  catch (const ParseError& e)
    {
      EXPECT_EQ(e.line(), 2);
      std::string msg = e.what();
      EXPECT_NE(msg.find("line 2"), std::string::npos);
      EXPECT_NE(msg.find("BogusCause"), std::string::npos);
      EXPECT_NE(msg.find("valid causes:"), std::string::npos);
      EXPECT_NE(msg.find("GuestStoreAmoPageFault"), std::string::npos);
      EXPECT_NE(msg.find("MachineTimerInterrupt"), std::string::npos);
    }
}

TEST(Parser, ErrorsCarryLineNumbers)
{
  EXPECT_EQ(errorLine("frobnicate"), 1);
  EXPECT_EQ(errorLine("mode HS\nmode XS"), 2);
  EXPECT_EQ(errorLine("\n\naccess load va=0xZZ"), 3);
  EXPECT_EQ(errorLine("access load"), 1);
  EXPECT_EQ(errorLine("access load va=0x10 bytes=3"), 1);
  EXPECT_EQ(errorLine("access load va=0x10 color=red"), 1);
  EXPECT_EQ(errorLine("access load va=0x10 va=0x20"), 1);
  EXPECT_EQ(errorLine("csr read nosuchcsr"), 1);
  EXPECT_EQ(errorLine("mode HS\nexpect ok"), 2);
  EXPECT_EQ(errorLine("expect ok"), 1);
  EXPECT_EQ(errorLine("access load va=0x0\nexpect trap"), 2);
  EXPECT_EQ(errorLine("access load va=0x0\nexpect trap cause=LoadPageFault handled_in=VU"), 2);
  EXPECT_EQ(errorLine("access load va=0x0\nexpect tlb maybe"), 2);
  EXPECT_EQ(errorLine("trap inject cause=GuestLoadPageFault"), 1);
  EXPECT_EQ(errorLine("trap inject cause=LoadPageFault gpa=0x10"), 1);
  EXPECT_EQ(errorLine("trap return U"), 1);
  EXPECT_EQ(errorLine("map gstage va=0x0 pa=0x0 size=4K perms=rwu asid=1"), 1);
  EXPECT_EQ(errorLine("map stage1 va=0x0 pa=0x0 size=4K perms=rw vmid=1"), 1);
  EXPECT_EQ(errorLine("map gstage va=0x0 pa=0x0 size=4K perms=rwu root=satp"), 1);
  EXPECT_EQ(errorLine("map stage1 va=0x0 pa=0x0 size=8K perms=rw"), 1);
  EXPECT_EQ(errorLine("map stage1 va=0x0 pa=0x0 size=4K perms=rwz"), 1);
  EXPECT_EQ(errorLine("map stage1 va=0x0 pa=0x0 size=4K perms=rw ad=x"), 1);
  EXPECT_EQ(errorLine("fence sfence.vma id=0x200"), 1);
  EXPECT_EQ(errorLine("fence hfence.gvma id=0x80"), 1);
  EXPECT_EQ(errorLine("fence hfence.gvma id=0x7f"), 0);
  EXPECT_EQ(errorLine("fence mfence"), 1);
  EXPECT_EQ(errorLine("mem write64 pa=0x0 value=12"), 1);
}

TEST(Parser, ExpectAnchors)
{
  EXPECT_EQ(errorLine("mem back pa=0x0 len=0x1000\nexpect ok"), 2);
  EXPECT_EQ(errorLine("mem read64 pa=0x0\nexpect ok value=0x0"), 0);
  EXPECT_EQ(errorLine("fence sfence.vma\nexpect ok count=3"), 0);
  EXPECT_EQ(errorLine("ecall\nexpect trap cause=EcallFromM\nexpect ok mode=M"), 0);
  EXPECT_EQ(errorLine("pool host=0x1000\nexpect ok"), 2);
}

TEST(Parser, CorpusRoundTrips)
{
  std::filesystem::path dir = HYP_SCENARIO_DIR;
  size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    {
      if (entry.path().extension() != ".scn")
        continue;
      ++files;
      auto text = slurp(entry.path());
      auto a = parse(text, entry.path().stem().string());
      auto canon = serialize(a);
      auto b = parse(canon);
      EXPECT_TRUE(sameDirectives(a, b)) << entry.path();
      EXPECT_EQ(serialize(b), canon) << entry.path();
    }
  EXPECT_GE(files, 20u);
}

// Random but well-formed scenario text. Every line is valid on its own
// and expects only follow anchors.
class TextGen
{
public:

  explicit TextGen(uint64_t seed) : rng_(seed) { }

  std::string scenario(size_t lines)
  {
    std::string out;
    bool anchored = false;
    for (size_t i = 0; i < lines; ++i)
      {
        if (anchored and pick(3) == 0)
          {
            out += expect() + "\n";
            continue;
          }
        auto [line, anchor] = statement();
        out += line + "\n";
        anchored = anchor;
        if (pick(5) == 0)
          out += "# noise\n\n";
      }
    return out;
  }

private:

  size_t pick(size_t n)
  { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

  std::string hex()
  { return fmt::format("0x{:x}", rng_() >> pick(64)); }

  template <size_t N>
  const char* any(const char* const (&xs)[N])
  { return xs[pick(N)]; }

  std::string opt(const char* key)
  { return pick(2) ? fmt::format(" {}={}", key, hex()) : std::string(); }

  std::pair<std::string, bool> statement()
  {
    static const char* const modes[] = { "M", "HS", "U", "VS", "VU" };
    static const char* const csrs[] = { "satp", "vsatp", "hgatp", "mstatus", "hedeleg",
                                        "medeleg", "sepc", "vstvec", "htval", "mtval2" };
    static const char* const kinds[] = { "load", "store", "fetch" };
    static const char* const sizes[] = { "4K", "2M", "1G" };
    static const char* const perms[] = { "r", "rw", "rwx", "x", "rwu", "xug", "-", "wr" };
    static const char* const ads[] = { "ad", "a", "d", "none" };
    static const char* const causes[] = { "LoadPageFault", "EcallFromU", "Breakpoint",
                                          "IllegalInstruction", "VirtualInstruction",
                                          "SupervisorTimerInterrupt",
                                          "VirtualSupervisorExternalInterrupt" };
    static const char* const gcauses[] = { "GuestLoadPageFault", "GuestStoreAmoPageFault",
                                           "GuestInstructionPageFault" };
    static const char* const fences[] = { "sfence.vma", "hfence.vvma", "hfence.gvma" };
    static const char* const rets[] = { "M", "HS", "VS" };

    switch (pick(11))
      {
      case 0: return { fmt::format("mode {}", any(modes)), false };
      case 1: return { fmt::format("csr read {}{}", any(csrs), opt("pc")), true };
      case 2: return { fmt::format("csr write {} {}{}", any(csrs), hex(), opt("pc")), true };
      case 3:
        switch (pick(3))
          {
          case 0: return { fmt::format("mem back pa={} len={}", hex(), hex()), false };
          case 1: return { fmt::format("mem write64 pa={} value={}", hex(), hex()), false };
          default: return { fmt::format("mem read64 pa={}", hex()), true };
          }
      case 4:
        {
          bool g = pick(2);
          std::string s = fmt::format("map {} va={} pa={} size={} perms={}", g ? "gstage" : "stage1",
                                      hex(), hex(), any(sizes), any(perms));
          if (pick(2))
            s += fmt::format(" {}={}", g ? "vmid" : "asid", pick(128));
          if (not g and pick(2))
            s += pick(2) ? " root=satp" : " root=vsatp";
          if (pick(2))
            s += fmt::format(" ad={}", any(ads));
          return { s, false };
        }
      case 5:
        {
          std::string s = fmt::format("access {} va={}", any(kinds), hex());
          if (pick(2))
            s += fmt::format(" bytes={}", 1 << pick(4));
          return { s + opt("pc"), true };
        }
      case 6:
        if (pick(2))
          return { fmt::format("trap inject cause={} gpa={}{}{}", any(gcauses), hex(), opt("tval"),
                               opt("epc")), true };
        return { fmt::format("trap inject cause={}{}{}", any(causes), opt("tval"), opt("epc")), true };
      case 7: return { fmt::format("trap return {}", any(rets)), true };
      case 8: return { fmt::format("ecall{}", opt("pc")), true };
      case 9:
        {
          std::string s = fmt::format("fence {}{}", any(fences), opt("addr"));
          if (pick(2))
            s += fmt::format(" id={}", pick(128));
          return { s, true };
        }
      default:
        return { fmt::format("pool{}{}", opt("host"), opt("guest")), false };
      }
  }

  std::string expect()
  {
    static const char* const modes[] = { "M", "HS", "U", "VS", "VU" };
    static const char* const handlers[] = { "M", "HS", "VS" };
    switch (pick(4))
      {
      case 0:
        {
          std::string s = "expect ok" + opt("pa") + opt("value");
          if (pick(2))
            s += fmt::format(" mode={}", any(modes));
          if (pick(2))
            s += fmt::format(" count={}", pick(100));
          return s;
        }
      case 1:
        {
          std::string s = "expect trap cause=StoreAmoPageFault";
          if (pick(2))
            s += fmt::format(" handled_in={}", any(handlers));
          return s + opt("tval") + opt("htval");
        }
      case 2: return fmt::format("expect walk accesses={}", pick(16));
      default: return pick(2) ? "expect tlb hit" : "expect tlb miss";
      }
  }

  std::mt19937_64 rng_;
};

TEST(Parser, RandomScenariosRoundTrip)
{
  for (uint64_t seed = 1; seed <= 300; ++seed)
    {
      TextGen gen(seed);
      auto text = gen.scenario(1 + seed % 40);
      Scenario a;
      ASSERT_NO_THROW(a = parse(text)) << text;
      auto canon = serialize(a);
      auto b = parse(canon);
      ASSERT_TRUE(sameDirectives(a, b)) << text << "----\n" << canon;
      ASSERT_EQ(serialize(b), canon);
    }
}

}
}
