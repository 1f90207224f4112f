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

// hypsim: run scenario files against the hypervisor-extension model, or
// fuzz the page-table walker against the reference oracle.
//
// Exit status: 0 all expectations held, 1 an expectation or oracle check
// failed, 2 a scenario did not parse, 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "hyp/differential.hpp"
#include "hyp/runner.hpp"

namespace
{

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitInternal = 3;

struct RunArgs
{
  std::vector<std::string> files;
  bool oracleCheck = false;
  size_t tlbSize = hyp::Tlb::kDefaultCapacity;
  bool noTlb = false;
  std::string tracePath;
  uint64_t seed = 1;
};

struct FuzzArgs
{
  size_t cases = 100;
  uint64_t seed = 1;
  size_t probes = 64;
  size_t tlbSize = hyp::Tlb::kDefaultCapacity;
};


std::string
baseName(const std::string& path)
{
  auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}


int
runScenarios(const RunArgs& args)
{
  using namespace hyp::scenario;

  std::vector<Scenario> scenarios;
  for (const auto& file : args.files)
    {
      std::ifstream in(file);
      if (not in)
        {
          fmt::print(stderr, "{}: cannot open\n", file);
          return kExitParse;
        }
      std::stringstream text;
      text << in.rdbuf();
      try
        {
          scenarios.push_back(parse(text.str(), baseName(file)));
        }
      catch (const ParseError& e)
        {
          fmt::print(stderr, "{}:{}: {}\n", file, e.line(), e.message());
          return kExitParse;
        }
    }

  RunOptions options;
  options.machine.tlbEnabled = not args.noTlb;
  options.machine.tlbCapacity = args.tlbSize;
  options.oracleCheck = args.oracleCheck;
  options.seed = args.seed;

  TraceLog trace;
  size_t passed = 0;
  size_t expectations = 0;
  for (const auto& s : scenarios)
    {
      auto result = run(s, options, trace);
      expectations += result.expectations;
      if (result.passed)
        ++passed;
      fmt::print(stderr, "{} {} ({} expectations)\n", result.passed ? "PASS" : "FAIL",
                 result.name, result.expectations);
      for (const auto& f : result.failures)
        fmt::print(stderr, "  {}:{}: {}\n", result.name, f.line, f.message);
    }
  fmt::print(stderr, "{}/{} scenarios passed, {} expectations\n", passed, scenarios.size(),
             expectations);

  auto lines = trace.jsonLines();
  if (args.tracePath.empty())
    std::cout << lines;
  else
    {
      std::ofstream out(args.tracePath, std::ios::binary);
      out << lines;
      if (not out)
        {
          fmt::print(stderr, "{}: cannot write trace\n", args.tracePath);
          return kExitInternal;
        }
    }
  return passed == scenarios.size() ? kExitPass : kExitFail;
}


int
runFuzz(const FuzzArgs& args)
{
  int status = kExitPass;
  for (size_t capacity : { size_t(0), args.tlbSize })
    {
      auto stats = hyp::diffSeeds(args.seed, args.cases, capacity, args.probes);
      fmt::print(stderr, "tlb={:<3} images={} probes={} faults={} max-accesses={} "
                 "disagreements={}\n", capacity, stats.images, stats.probes, stats.faults,
                 stats.maxAccesses, stats.disagreements);
      for (const auto& s : stats.samples)
        fmt::print(stderr, "  {}: expected {}, walker gave {}\n", s.coordinates, s.expected,
                   s.actual);
      if (stats.disagreements)
        status = kExitFail;
    }
  return status;
}

}


int
main(int argc, char** argv)
{
  CLI::App app{ "Hypervisor-extension address translation and trap model" };
  app.require_subcommand(1);

  RunArgs runArgs;
  auto* runCmd = app.add_subcommand("run", "Run scenario files");
  runCmd->add_option("files", runArgs.files, "Scenario files")->required()->check(CLI::ExistingFile);
  runCmd->add_flag("--oracle-check", runArgs.oracleCheck,
                   "Cross-check each access and nearby probes against the oracle");
  runCmd->add_option("--tlb-size", runArgs.tlbSize, "TLB entries")->check(CLI::Range(1, 4096));
  runCmd->add_flag("--no-tlb", runArgs.noTlb, "Disable the TLB");
  runCmd->add_option("--trace", runArgs.tracePath, "Write the JSON-lines trace here, not stdout");
  runCmd->add_option("--seed", runArgs.seed, "Seed for oracle-check probes");

  FuzzArgs fuzzArgs;
  auto* fuzzCmd = app.add_subcommand("fuzz", "Differential walker/oracle fuzzing");
  fuzzCmd->add_option("--cases", fuzzArgs.cases, "Number of random images");
  fuzzCmd->add_option("--seed", fuzzArgs.seed, "First image seed");
  fuzzCmd->add_option("--probes", fuzzArgs.probes, "Probes per image");
  fuzzCmd->add_option("--tlb-size", fuzzArgs.tlbSize, "TLB entries for the cached pass")
    ->check(CLI::Range(1, 4096));

  try
    {
      app.parse(argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      int code = app.exit(e);
      return code == 0 ? kExitPass : kExitParse;
    }

  try
    {
      if (runCmd->parsed())
        return runScenarios(runArgs);
      return runFuzz(fuzzArgs);
    }
  catch (const std::exception& e)
    {
      fmt::print(stderr, "internal error: {}\n", e.what());
      return kExitInternal;
    }
}
