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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hyp/oracle.hpp"

namespace hyp
{

  struct DiffStats
  {
    size_t images = 0;
    size_t probes = 0;
    size_t disagreements = 0;
    size_t faults = 0;              // probes the walker reported as faulting
    size_t maxAccesses = 0;
    std::vector<oracle::OracleReport> samples;   // first few disagreements

    void merge(const DiffStats& other);
  };

  /// Run every probe of an image through the walker and the oracle. With
  /// tlbCapacity > 0 probes go through one shared TLB and only the outcome
  /// is compared; without a TLB the read sequences must match as well.
  DiffStats diffImage(const oracle::FuzzImage& image, size_t tlbCapacity);

  /// diffImage over generateImage(seed + i) for i in [0, cases).
  DiffStats diffSeeds(uint64_t seed, size_t cases, size_t tlbCapacity,
                      size_t probesPerImage = 64);

}
