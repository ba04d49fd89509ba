#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "abnn/train.hpp"

namespace abnn {

struct IntRange {
  std::size_t lo = 2;
  std::size_t hi = 32;
};

// Hyperparameter ranges; fields that do not apply to the model kind are
// ignored.
struct SearchSpace {
  IntRange groups{2, 32};
  IntRange units{2, 32};
  IntRange ds_layers{2, 8};
  IntRange ds_hidden{2, 32};
  IntRange ds_middle{2, 32};
};

struct TrialRecord {
  std::size_t index = 0;
  TrainConfig config;
  double val_rmse = 0.0;
  bool diverged = false;
  std::string error;
};

struct SearchResult {
  std::size_t best = 0;
  std::vector<TrialRecord> trials;

  const TrainConfig& best_config() const { return trials[best].config; }
};

// Draws the model hyperparameters of `base` from `space`; everything else is
// kept.
TrainConfig sample_config(const SearchSpace& space, const TrainConfig& base, Rng& rng);

// Trial i samples from and trains with seed base_seed + i, on the train split;
// the lowest validation RMSE wins, ties go to the lower index. Trials run on
// up to `threads` workers. Throws Diverged if every trial fails.
SearchResult random_search(const SyntheticTask& task, const Splits& splits, const SearchSpace& space,
                           const TrainConfig& base, std::size_t trials, std::uint64_t base_seed,
                           std::size_t threads = 1);

}  // namespace abnn
