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

#include "hyp/paging.hpp"

namespace hyp
{

std::string_view
toString(PageSize size)
{
  switch (size)
    {
    case PageSize::Size4K: return "4K";
    case PageSize::Size2M: return "2M";
    case PageSize::Size1G: return "1G";
    }
  return "?";
}


std::optional<PageSize>
parsePageSize(std::string_view text)
{
  for (auto size : { PageSize::Size4K, PageSize::Size2M, PageSize::Size1G })
    if (toString(size) == text)
      return size;
  return std::nullopt;
}


bool
permits(const Perms& perms, const PermCheck& check)
{
  if (check.user and not perms.u)
    return false;
  // Supervisor access to a user page: never for fetch, only with SUM otherwise.
  if (not check.user and perms.u and (check.access == Access::Fetch or not check.sum))
    return false;

  switch (check.access)
    {
    case Access::Fetch: return perms.x;
    case Access::Load:  return perms.r or (check.mxr and perms.x);
    case Access::Store: return perms.w and perms.d;
    }
  return false;
}

}
