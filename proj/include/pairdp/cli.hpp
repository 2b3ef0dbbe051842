// Copyright 2026 The Pairdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end. Subcommands:
//
//   calibrate  --G --T --n --eps --delta [--method ma|basic]
//              prints sigma as a decimal on stdout
//   train      --data <csv> --d <dim> | --synthetic <kind,n,d>
//              --loss <kind> [--lambda] --eps --delta --T [--seed]
//              [--project r] [--eta] [--threads] --out <json>
//   stability  --synthetic <kind,n,d> --loss <kind> [--lambda]
//              --method retrain|influence [--removals] [--pairs] [--seed]
//              [--threads] --out <json>
//   experiment --config <file> --out <json> [--threads]
//
// Exposed as a function over argv so tests can drive it in-process.

#ifndef PAIRDP_CLI_HPP_
#define PAIRDP_CLI_HPP_

#include <string>
#include <vector>

namespace pairdp {

// Returns the process exit code. Errors print to stderr as "error: ...".
int run_cli(const std::vector<std::string>& args);

int run_cli(int argc, const char* const* argv);

}  // namespace pairdp

#endif  // PAIRDP_CLI_HPP_
