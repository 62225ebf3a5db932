#include "tgpsr/experiment.hpp"

namespace tgpsr {

std::vector<RunRecord> run_records(const ScenarioConfig& cfg) {
    cfg.validate();
    std::vector<RunRecord> out;
    out.reserve(cfg.runs);
    for (std::size_t i = 0; i < cfg.runs; ++i) {
        ScenarioConfig c = cfg;
        c.seed = cfg.seed + i;
        c.runs = 1;
        out.push_back(simulate(c));
    }
    return out;
}

std::vector<RunMetrics> run_experiment(const ScenarioConfig& cfg) {
    std::vector<RunMetrics> out;
    for (const auto& r : run_records(cfg)) {
        out.push_back(aggregate(r));
        out.back().check();
    }
    return out;
}

} // namespace tgpsr
