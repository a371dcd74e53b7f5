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

namespace sievestream {

// The measured axes of a run. Everything except wall_ms is a pure function
// of the configuration and the input bytes.
struct RunMetrics {
  double utility = 0.0;
  std::uint64_t peak_memory = 0;  // max simultaneous stored elements
  std::uint64_t queries = 0;
  std::uint64_t adaptive_rounds = 0;
  std::uint64_t communication = 0;         // elements moved machine -> center
  std::uint64_t wasted_communication = 0;  // ladder slots discarded
  std::int64_t wall_ms = 0;
};

}  // namespace sievestream
