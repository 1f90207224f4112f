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

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyp/machine.hpp"
#include "hyp/scenario.hpp"

namespace hyp::scenario
{

  struct RunOptions
  {
    MachineConfig machine;
    /// Cross-check every access, and a few random neighbours of it,
    /// against the reference oracle.
    bool oracleCheck = false;
    uint64_t seed = 1;
  };

  struct Failure
  {
    int line = 0;
    std::string message;
  };

  /// Ordered record of everything a run did. Sequence numbers keep
  /// increasing across scenarios appended to the same log.
  class TraceLog
  {
  public:

    void record(const std::string& scenario, int line, const std::string& kind,
                nlohmann::ordered_json fields = nlohmann::ordered_json::object());

    /// One JSON object per line, each terminated by a newline.
    std::string jsonLines() const;

    const std::vector<nlohmann::ordered_json>& records() const
    { return records_; }

  private:

    uint64_t seq_ = 0;
    std::vector<nlohmann::ordered_json> records_;
  };

  struct RunResult
  {
    std::string name;
    bool passed = true;
    size_t expectations = 0;
    std::vector<Failure> failures;
  };

  /// Execute a scenario on a fresh machine. Expectation mismatches,
  /// oracle disagreements and directives that cannot be carried out are
  /// reported as failures; the run continues past them.
  RunResult run(const Scenario& scenario, const RunOptions& options, TraceLog& trace);

}
