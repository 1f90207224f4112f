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

#include "hyp/phys_mem.hpp"

namespace hyp
{

namespace
{

constexpr uint64_t kLimit = uint64_t(1) << SparseMemory::kAddressBits;

}


std::string_view
toString(MemError err)
{
  switch (err)
    {
    case MemError::None:       return "none";
    case MemError::Unbacked:   return "unbacked";
    case MemError::Misaligned: return "misaligned";
    }
  return "?";
}


void
SparseMemory::backRange(uint64_t pa, uint64_t len)
{
  if (len == 0 or pa >= kLimit)
    return;
  uint64_t end = (len > kLimit - pa) ? kLimit : pa + len;
  for (uint64_t frame = pa >> kFrameBits; frame <= (end - 1) >> kFrameBits; ++frame)
    frames_.try_emplace(frame, Frame{});
}


bool
SparseMemory::isBacked(uint64_t pa) const
{
  return pa < kLimit and frames_.contains(pa >> kFrameBits);
}


MemError
SparseMemory::read64(uint64_t pa, uint64_t& value) const
{
  if (pa & 7)
    return MemError::Misaligned;
  if (pa >= kLimit)
    return MemError::Unbacked;
  auto it = frames_.find(pa >> kFrameBits);
  if (it == frames_.end())
    return MemError::Unbacked;

  const uint8_t* bytes = it->second.data() + (pa & (kFrameSize - 1));
  value = 0;
  for (int i = 7; i >= 0; --i)
    value = (value << 8) | bytes[i];
  return MemError::None;
}


MemError
SparseMemory::write64(uint64_t pa, uint64_t value)
{
  if (pa & 7)
    return MemError::Misaligned;
  if (pa >= kLimit)
    return MemError::Unbacked;
  auto it = frames_.find(pa >> kFrameBits);
  if (it == frames_.end())
    return MemError::Unbacked;

  uint8_t* bytes = it->second.data() + (pa & (kFrameSize - 1));
  for (int i = 0; i < 8; ++i, value >>= 8)
    bytes[i] = uint8_t(value);
  return MemError::None;
}

}
