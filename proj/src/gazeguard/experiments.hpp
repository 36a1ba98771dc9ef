// Copyright 2026 The GazeGuard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZEGUARD_EXPERIMENTS_HPP_
#define GAZEGUARD_EXPERIMENTS_HPP_

#include <string>
#include <string_view>

#include "gazeguard/dataset.hpp"
#include "gazeguard/experiment_config.hpp"
#include "gazeguard/io.hpp"

namespace gazeguard {

/// synth, scenario1..4, phase2, report.
bool IsExperimentCommand(std::string_view command);

/// Loads the configured CSV, or generates the synthetic dataset.
Dataset LoadExperimentData(const ExperimentConfig& config);

/// Runs one command, writing its artifacts to <output_dir>/<command>/, and
/// returns a summary document. phase2 needs the admin passphrase.
Json RunExperiment(std::string_view command, const ExperimentConfig& config,
                   const std::string& admin_passphrase = {});

}  // namespace gazeguard

#endif  // GAZEGUARD_EXPERIMENTS_HPP_
