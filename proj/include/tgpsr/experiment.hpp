#pragma once

#include <vector>

#include "tgpsr/metrics.hpp"

namespace tgpsr {

/// Seeds cfg.seed .. cfg.seed + cfg.runs - 1, results in seed order.
std::vector<RunRecord> run_records(const ScenarioConfig& cfg);
std::vector<RunMetrics> run_experiment(const ScenarioConfig& cfg);

} // namespace tgpsr
