/*
 * Copyright 2026 The pcbgnn Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// The pcbgnn command line:
//
//   gen-data  --task --count --seed --out [--config]
//   train     --data --task --backbone [--layers --hidden --heads --lr
//             --theta --alpha] --seed --out-checkpoint [--metrics-out]
//   eval      --checkpoint ... --data --report [--sweep-theta]
//   predict   --checkpoint --netlist --out [--min-score]
//   grid      --space --data --task --report
//   stats     --data [--out]
//   embed-sim --netlist --out
//
// Commands that embed names take --embedding-table to replace the built-in
// hash-ngram embedder with a table file. Failures print one JSON object
// {"error": kind, "command": name, "message": text} on stderr; the exit code
// is 2 for usage errors and 1 for everything else. PCBGNN_LOG sets the log
// level (trace, debug, info, warn, error, off; default warn); logs go to
// stderr.

#ifndef PCBGNN_CLI_H_
#define PCBGNN_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace pcbgnn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace pcbgnn

#endif  // PCBGNN_CLI_H_
