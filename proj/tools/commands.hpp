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

#include "run_config.hpp"

namespace parares::cli {

enum ExitCode : int { kSuccess = 0, kValidation = 1, kComputation = 2, kAcceptance = 3 };

struct VerifyOptions {
  bool full = false;
  /// Criterion ids; empty runs the default set.
  std::vector<int> only;
};

/// Each command validates its inputs before computing and writes its table
/// to config.output. Returns the process exit code.
int cmd_simulate(const RunConfig& config);
int cmd_sweep(const RunConfig& config);
int cmd_floquet(const RunConfig& config);
int cmd_asymptote(const RunConfig& config);
int cmd_gpe(const RunConfig& config);
int cmd_verify(const RunConfig& config, const VerifyOptions& options);

}  // namespace parares::cli
