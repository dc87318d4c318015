#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bngnn/experiments/pipeline.hpp"

namespace bngnn {

// One JSON object per run: config echo, metrics, depth histogram, predictions.
std::string results_record(const ExperimentConfig& config, const RunResult& run);
std::string config_json(const ExperimentConfig& config);
std::string sweep_table_json(const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace bngnn
