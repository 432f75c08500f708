// Copyright 2026 The ldprr Authors.
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

#ifndef LDPRR_IO_HPP_
#define LDPRR_IO_HPP_

#include <string>

#include "ldprr/mechanisms.hpp"

namespace ldprr {

// {"k": K, "matrix": [[...], ...], "epsilon": <number> | "inf"}
std::string mechanism_to_json(const Mechanism& w, int indent = 2);

// Parses the object above and revalidates every Mechanism invariant. The
// stored epsilon must agree with the recomputed one to 1e-9 (or both be inf).
// Throws Error(kInvalidArgument) on malformed input.
Mechanism mechanism_from_json(const std::string& text);

}  // namespace ldprr

#endif  // LDPRR_IO_HPP_
