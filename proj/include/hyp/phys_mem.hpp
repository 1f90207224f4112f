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

#include <array>
#include <cstdint>
#include <map>
#include <string_view>

namespace hyp
{

  enum class MemError : uint8_t { None, Unbacked, Misaligned };

  std::string_view toString(MemError err);

  /// Sparse little-endian physical memory over a 56-bit address space.
  /// Storage is allocated in 4 KiB frames by backRange; any access
  /// touching an unbacked frame fails with MemError::Unbacked, which is
  /// distinct from reading backed zeroes.
  class SparseMemory
  {
  public:

    static constexpr unsigned kFrameBits = 12;
    static constexpr uint64_t kFrameSize = uint64_t(1) << kFrameBits;
    static constexpr unsigned kAddressBits = 56;

    /// Back every frame overlapping [pa, pa + len). Already backed frames
    /// keep their contents. Ranges reaching past the 56-bit space are
    /// clipped.
    void backRange(uint64_t pa, uint64_t len);

    bool isBacked(uint64_t pa) const;

    MemError read64(uint64_t pa, uint64_t& value) const;
    MemError write64(uint64_t pa, uint64_t value);

    size_t frameCount() const
    { return frames_.size(); }

  private:

    using Frame = std::array<uint8_t, kFrameSize>;

    std::map<uint64_t, Frame> frames_;
  };

}
