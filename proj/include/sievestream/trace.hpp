// Copyright 2026 The SieveStream Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>

namespace sievestream {

// Line-oriented debug/event log. Flush events and sampler decisions are
// emitted as one line each; the CLI `trace` subcommand prints them.
using TraceSink = std::function<void(const std::string&)>;

// One sampler decision, replayable given the seed and buffer order.
struct TraceRow {
  std::uint64_t iteration = 0;  // while-loop index, 1-based
  const char* step = "";        // filter | single | batch | ladder
  std::uint64_t batch_size = 0;
  double avg_gain = 0.0;  // NaN for filter rows
  bool accepted = false;
};

inline std::string format_trace_row(const TraceRow& row) {
  std::string s = "iter=" + std::to_string(row.iteration) +
                  " step=" + std::string(row.step) +
                  " t=" + std::to_string(row.batch_size);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", row.avg_gain);
  s += " avg_gain=";
  s += buf;
  s += row.accepted ? " accepted=1" : " accepted=0";
  return s;
}

}  // namespace sievestream
