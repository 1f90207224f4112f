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

#include "hyp/differential.hpp"
#include "hyp/ptw.hpp"

namespace hyp
{

namespace
{

constexpr size_t kMaxSamples = 8;

}


void
DiffStats::merge(const DiffStats& other)
{
  images += other.images;
  probes += other.probes;
  disagreements += other.disagreements;
  faults += other.faults;
  maxAccesses = std::max(maxAccesses, other.maxAccesses);
  for (const auto& s : other.samples)
    if (samples.size() < kMaxSamples)
      samples.push_back(s);
}


DiffStats
diffImage(const oracle::FuzzImage& image, size_t tlbCapacity)
{
  DiffStats stats;
  stats.images = 1;
  Tlb tlb(tlbCapacity);
  bool useTlb = tlbCapacity > 0;

  for (size_t i = 0; i < image.probes.size(); ++i)
    {
      auto [va, access] = image.probes[i];
      auto actual = translate(image.mem, image.csrs, va, access, useTlb ? &tlb : nullptr);
      auto expected = oracle::oracleTranslate(image.mem, image.csrs, va, access);
      auto coords = fmt::format("seed={} probe={} va=0x{:x} access={} mode={} tlb={}",
                                image.seed, i, va, toString(access),
                                toString(image.csrs.mode), tlbCapacity);
      auto report = oracle::compare(actual, expected, not useTlb, coords);

      ++stats.probes;
      if (not actual.ok())
        ++stats.faults;
      stats.maxAccesses = std::max(stats.maxAccesses, actual.accesses.size());
      if (not report.agree)
        {
          ++stats.disagreements;
          if (stats.samples.size() < kMaxSamples)
            stats.samples.push_back(report);
        }
    }
  return stats;
}


DiffStats
diffSeeds(uint64_t seed, size_t cases, size_t tlbCapacity, size_t probesPerImage)
{
  DiffStats total;
  for (size_t i = 0; i < cases; ++i)
    total.merge(diffImage(oracle::generateImage(seed + i, probesPerImage), tlbCapacity));
  return total;
}

}
