/*
 * Copyright 2026 the latentplot authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace latentplot {

/// Error type thrown by every module for contract violations
/// (bad shapes, malformed files, missing preconditions).
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Log verbosity, controlled by the LATENTPLOT_LOG environment
/// variable: 0 = silent, 1 = progress (default), 2 = debug.
int log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace latentplot
