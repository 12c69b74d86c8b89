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

#include "latentplot/common.hpp"

#include <cstdlib>
#include <iostream>

namespace latentplot {

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("LATENTPLOT_LOG");
    if (env == nullptr || *env == '\0') return 1;
    return std::atoi(env);
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << msg << "\n";
}

}  // namespace latentplot
