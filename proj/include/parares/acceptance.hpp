// Copyright 2026 The parares Authors.
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

#include <string>
#include <vector>

namespace parares::acceptance {

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Measured values behind the verdict.
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  unsigned workers = 1;
};

/// Criterion ids 1..11; `include_long` adds the PDE/variational comparison.
std::vector<int> criteria(bool include_long);

std::string name(int id);

/// Runs one criterion. Computational failures are reported as a failed
/// result with the error message as detail.
Result run(int id, const Options& options = {});

/// "criterion <id> <name>: PASS|FAIL (<detail>) [<seconds>s]".
std::string format(const Result& r);

}  // namespace parares::acceptance
