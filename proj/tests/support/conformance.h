/*
 * Copyright 2026 The OPS Authors.
 *
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

// Branch checklist for the protocol steps: every abort and success path of
// client registration, TA registration, the TA program, deposit, withdraw,
// offline payment and claim is one entry, exercised by a scripted check.

#ifndef OPS_TESTS_SUPPORT_CONFORMANCE_H_
#define OPS_TESTS_SUPPORT_CONFORMANCE_H_

#include <string>
#include <vector>

namespace ops::testing {

struct Branch {
  std::string id;
  std::string protocol;
  std::string step;
  std::string description;
};

struct BranchResult {
  Branch branch;
  bool covered = false;
  bool passed = false;
  std::string failure;
};

// The full table, in protocol order.
const std::vector<Branch>& conformance_branches();

// Runs every check. A branch no check reached stays uncovered.
std::vector<BranchResult> run_conformance();

// "protocol step id covered passed" lines, one per branch.
std::string format_checklist(const std::vector<BranchResult>& results);

}  // namespace ops::testing

#endif  // OPS_TESTS_SUPPORT_CONFORMANCE_H_
