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

#include <map>
#include <random>

#include "hyp/csr.hpp"
#include "hyp/oracle.hpp"

namespace hyp::oracle
{

namespace
{

constexpr uint64_t kHostPool = 0x8000'0000;
constexpr uint64_t kGuestTablePool = 0x4000'0000;
constexpr unsigned kGuestTablePages = 24;

constexpr uint64_t kV = 1, kR = 2, kW = 4, kX = 8, kU = 16, kG = 32, kA = 64, kD = 128;


// Builds page tables directly in memory. Table pages of the first stage
// may live at guest-physical addresses; `locate` maps them to host.
class ImageBuilder
{
public:

  ImageBuilder(FuzzImage& image, std::mt19937_64& rng)
    : image_(image), rng_(rng)
  { }

  uint64_t allocHost(uint64_t bytes)
  {
    uint64_t base = (hostNext_ + bytes - 1) / bytes * bytes;
    hostNext_ = base + bytes;
    image_.mem.backRange(base, bytes);
    return base;
  }

  uint64_t allocGuestTable()
  {
    if (guestNext_ >= kGuestTablePages)
      return 0;
    return kGuestTablePool + 0x1000 * guestNext_++;
  }

  // Host location of a guest table page; identity when the G stage is off.
  uint64_t locate(uint64_t gpa) const
  {
    auto it = guestPages_.find(gpa & ~uint64_t(0xfff));
    if (it == guestPages_.end())
      return gpa;
    return it->second | (gpa & 0xfff);
  }

  void bindGuestPage(uint64_t gpa, uint64_t hpa)
  { guestPages_[gpa] = hpa; }

  void writePte(uint64_t hostSlot, uint64_t value)
  {
    image_.mem.write64(hostSlot, value);
    written_.push_back(hostSlot);
  }

  uint64_t readPte(uint64_t hostSlot) const
  {
    uint64_t v = 0;
    image_.mem.read64(hostSlot, v);
    return v;
  }

  /// Install a leaf for `input` at `leafLevel`, allocating intermediate
  /// tables. Returns false when an existing leaf is in the way.
  /// rootIndexBits is 11 for the G stage. guestTables selects the
  /// first-stage-with-G allocator.
  bool map(uint64_t root, unsigned rootIndexBits, uint64_t input, unsigned leafLevel,
           uint64_t leafPte, bool guestTables)
  {
    uint64_t table = root;
    for (unsigned level = 2; ; --level)
      {
        unsigned bits = level == 2 ? rootIndexBits : 9;
        uint64_t idx = (input >> (12 + 9 * level)) & ((uint64_t(1) << bits) - 1);
        uint64_t slot = locate(table + 8 * idx);
        if (level == leafLevel)
          {
            uint64_t old = readPte(slot);
            if (old & kV)
              return false;
            writePte(slot, leafPte);
            return true;
          }
        uint64_t e = readPte(slot);
        if (e & kV)
          {
            if (e & (kR | kW | kX))
              return false;
            table = ((e >> 10) & ((uint64_t(1) << 44) - 1)) << 12;
            continue;
          }
        uint64_t next = guestTables ? allocGuestTable() : allocHost(0x1000);
        if (next == 0)
          return false;
        writePte(slot, ((next >> 12) << 10) | kV);
        table = next;
      }
  }

  void corrupt(double rate)
  {
    std::bernoulli_distribution pick(rate);
    std::uniform_int_distribution<int> how(0, 9);
    for (uint64_t slot : written_)
      {
        image_.pteCount++;
        if (not pick(rng_))
          continue;
        image_.corruptedPtes++;
        uint64_t e = readPte(slot);
        switch (how(rng_))
          {
          case 0: e &= ~kV; break;
          case 1: e = (e & ~kR) | kW; break;                       // W without R
          case 2: e |= uint64_t(1) << (54 + rng_() % 10); break;  // reserved bits
          case 3: e &= ~kA; break;
          case 4: e &= ~kD; break;
          case 5: e ^= kU; break;
          case 6: e ^= kX | kR; break;
          case 7: e |= uint64_t(1) << 10; break;                  // misalign superpage
          case 8: e &= ~(kR | kW | kX); break;                    // leaf becomes pointer
          default: e ^= (rng_() & 0xff); break;
          }
        image_.mem.write64(slot, e);
      }
  }

private:

  FuzzImage& image_;
  std::mt19937_64& rng_;
  uint64_t hostNext_ = kHostPool;
  unsigned guestNext_ = 0;
  std::map<uint64_t, uint64_t> guestPages_;
  std::vector<uint64_t> written_;
};


struct Mapping
{
  uint64_t input;
  uint64_t output;
  unsigned level;
};


uint64_t
sizeForLevel(unsigned level)
{
  return uint64_t(1) << (12 + 9 * level);
}

}


FuzzImage
generateImage(uint64_t seed, size_t probeCount, double faultRate)
{
  FuzzImage image;
  image.seed = seed;
  std::mt19937_64 rng(seed);
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  auto pickLevel = [&]() { return unsigned(std::discrete_distribution<int>({ 6, 3, 1 })(rng)); };

  ImageBuilder builder(image, rng);
  auto& csrs = image.csrs;

  bool virt = chance(0.6);
  bool user = chance(0.5);
  csrs.mode = PrivilegeState(user ? BaseMode::User : BaseMode::Supervisor, virt);
  csrs.mstatus = (chance(0.3) ? status::SUM : 0) | (chance(0.3) ? status::MXR : 0);
  csrs.vsstatus = (chance(0.3) ? status::SUM : 0) | (chance(0.3) ? status::MXR : 0);

  bool firstOn = true, gOn = false;
  if (virt)
    {
      int config = std::discrete_distribution<int>({ 60, 15, 15, 10 })(rng);
      firstOn = config == 0 or config == 1;
      gOn = config == 0 or config == 2;
    }
  else
    firstOn = chance(0.9);

  // Leaf permission bits for a stage; mostly sensible, sometimes not.
  auto leafFlags = [&](bool gStage) {
    uint64_t f = kV | kA | kD | kR;
    if (chance(0.5)) f |= kW;
    if (chance(0.4)) f |= kX;
    if (gStage)
      f |= kU;
    else if (chance(user ? 0.85 : 0.25))
      f |= kU;
    if (not gStage and chance(0.1)) f |= kG;
    return f;
  };

  std::vector<Mapping> gMaps;
  if (gOn)
    {
      uint64_t root = builder.allocHost(0x4000);
      uint16_t vmid = uint16_t(rng() & 0x7f);
      csrs.hgatp = atp::make(atp::MODE_SV39, vmid, root >> 12);

      // Guest table pool: 4 KiB G mappings to host pages.
      for (unsigned i = 0; i < kGuestTablePages; ++i)
        {
          uint64_t gpa = kGuestTablePool + 0x1000 * i;
          uint64_t hpa = builder.allocHost(0x1000);
          builder.bindGuestPage(gpa, hpa);
          builder.map(root, 11, gpa, 0, ((hpa >> 12) << 10) | kV | kR | kW | kU | kA | kD, false);
        }

      // Guest data regions anywhere in the 41-bit space.
      for (int i = 0; i < 8; ++i)
        {
          unsigned level = pickLevel();
          uint64_t size = sizeForLevel(level);
          uint64_t gpa = (rng() & ((uint64_t(1) << 41) - 1)) & ~(size - 1);
          if (gpa >= kGuestTablePool and gpa < kGuestTablePool + 0x4000'0000)
            continue;
          uint64_t hpa = (rng() & ((uint64_t(1) << 40) - 1)) & ~(size - 1);
          if (builder.map(root, 11, gpa, level, ((hpa >> 12) << 10) | leafFlags(true), false))
            gMaps.push_back({ gpa, hpa, level });
        }
    }

  std::vector<Mapping> firstMaps;
  if (firstOn)
    {
      bool guestTables = virt;
      uint64_t root = guestTables ? builder.allocGuestTable() : builder.allocHost(0x1000);
      if (guestTables and not gOn)
        {
          // Without a G stage guest tables sit at the same host address.
          image.mem.backRange(kGuestTablePool, 0x1000 * kGuestTablePages);
        }
      uint16_t asid = uint16_t(rng() & 0x1ff);
      uint64_t atpValue = atp::make(atp::MODE_SV39, asid, root >> 12);
      (virt ? csrs.vsatp : csrs.satp) = atpValue;

      for (int i = 0; i < 8; ++i)
        {
          unsigned level = pickLevel();
          uint64_t size = sizeForLevel(level);
          uint64_t va = (rng() & ((uint64_t(1) << 39) - 1)) & ~(size - 1);
          if (va >> 38)
            va |= ~((uint64_t(1) << 39) - 1);

          // Point most guest leaves into G-mapped memory so the second
          // stage is exercised past its first level.
          uint64_t target;
          if (gOn and not gMaps.empty() and chance(0.8))
            {
              const auto& g = gMaps[rng() % gMaps.size()];
              uint64_t gsize = sizeForLevel(g.level);
              target = g.input + ((rng() % gsize) & ~(size - 1));
              if (size > gsize)
                target = g.input & ~(size - 1);
            }
          else
            target = (rng() & ((uint64_t(1) << 42) - 1)) & ~(size - 1);

          if (builder.map(root, 9, va, level, ((target >> 12) << 10) | leafFlags(false), guestTables))
            firstMaps.push_back({ va, target, level });
        }
    }

  builder.corrupt(faultRate);

  // Probes: mostly inside mappings, some repeats, some arbitrary.
  const auto& maps = firstOn ? firstMaps : gMaps;
  std::uniform_int_distribution<int> accessDist(0, 2);
  for (size_t i = 0; i < probeCount; ++i)
    {
      Access acc = Access(accessDist(rng));
      int kind = std::discrete_distribution<int>({ 70, 12, 10, 8 })(rng);
      uint64_t va;
      if (kind == 0 and not maps.empty())
        {
          const auto& m = maps[rng() % maps.size()];
          va = m.input + (rng() % sizeForLevel(m.level) & ~uint64_t(7));
        }
      else if (kind == 1 and not image.probes.empty())
        va = image.probes[rng() % image.probes.size()].first;
      else if (kind == 3)
        va = rng();
      else
        va = (rng() & ((uint64_t(1) << 39) - 1)) & ~uint64_t(7);
      image.probes.emplace_back(va, acc);
    }
  return image;
}

}
