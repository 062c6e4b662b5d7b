/*
 * Copyright 2026 The ModelProbe Authors.
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

#include "modelprobe/testers/builtin.hpp"

#include "modelprobe/testers/tabular.hpp"
#include "modelprobe/testers/text.hpp"
#include "modelprobe/testers/timeseries.hpp"

namespace modelprobe::testers {

std::vector<std::pair<std::string, std::shared_ptr<const Tester>>> builtin_testers() {
  return {
      {"correctness", make_correctness_tester()},
      {"group-discrimination", make_group_discrimination_tester()},
      {"individual-discrimination", make_individual_discrimination_tester()},
      {"adversarial-robustness", make_robustness_tester()},
      {"typo-sensitivity", make_text_sensitivity_tester(apply_typo)},
      {"noise-sensitivity", make_text_sensitivity_tester(apply_noise)},
      {"small-linear-change", make_metamorphic_tester(MetamorphicKind::kSmallLinear)},
      {"unordered-data", make_metamorphic_tester(MetamorphicKind::kUnordered)},
      {"large-linear-change", make_metamorphic_tester(MetamorphicKind::kLargeLinear)},
  };
}

}  // namespace modelprobe::testers
