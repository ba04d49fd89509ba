#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "abnn/search.hpp"
#include "abnn/train.hpp"

namespace abnn {

struct ResultRow {
  std::string task;
  std::string model;
  std::string split;
  double rmse = 0.0;
  std::uint64_t seed = 0;
  double wall_clock_s = 0.0;
};

// One row per evaluated split (val, small, large).
std::vector<ResultRow> result_rows(const ExperimentResult& r);

// Columns task,model,split,rmse,seed,wall_clock_s. Doubles use 17 significant
// digits. With omit_timing the wall-clock column is written as 0 so reruns
// compare byte for byte.
std::string results_csv(const std::vector<ResultRow>& rows, bool omit_timing = false);

nlohmann::json to_json(const ModelSpec& spec);
nlohmann::json to_json(const TrainConfig& cfg);
nlohmann::json to_json(const ExperimentResult& r, bool omit_timing = false);
nlohmann::json to_json(const SearchResult& r);

// Overwrites the fields present in `j`; unknown keys throw Parse.
void apply_json(ModelSpec& spec, const nlohmann::json& j);
void apply_json(TrainConfig& cfg, const nlohmann::json& j);

void write_text(const std::string& path, const std::string& text);

}  // namespace abnn
