#include "abnn/search.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "abnn/error.hpp"

namespace abnn {

namespace {

std::size_t draw(const IntRange& r, Rng& rng) {
  if (r.lo > r.hi) throw Error(Errc::InvalidArgument, "search range has lo > hi");
  return static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(r.lo), static_cast<std::int64_t>(r.hi)));
}

}  // namespace

TrainConfig sample_config(const SearchSpace& space, const TrainConfig& base, Rng& rng) {
  TrainConfig cfg = base;
  if (cfg.model.kind == ModelKind::DeepSets) {
    cfg.model.ds_layers = draw(space.ds_layers, rng);
    cfg.model.ds_hidden = draw(space.ds_hidden, rng);
    cfg.model.ds_middle = draw(space.ds_middle, rng);
  } else {
    cfg.model.groups = draw(space.groups, rng);
    cfg.model.units = draw(space.units, rng);
  }
  return cfg;
}

SearchResult random_search(const SyntheticTask& task, const Splits& splits, const SearchSpace& space,
                           const TrainConfig& base, std::size_t trials, std::uint64_t base_seed,
                           std::size_t threads) {
  if (trials == 0) throw Error(Errc::InvalidArgument, "random_search needs at least one trial");
  SearchResult out;
  out.trials.resize(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(base_seed + i);
    out.trials[i].index = i;
    out.trials[i].config = sample_config(space, base, rng);
    out.trials[i].config.seed = base_seed + i;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      TrialRecord& t = out.trials[i];
      try {
        Experiment e = run_experiment(task, splits, t.config);
        t.val_rmse = e.result.val_rmse;
        if (!std::isfinite(t.val_rmse)) {
          t.diverged = true;
          t.error = "diverged: non-finite validation RMSE";
        }
      } catch (const Error& e) {
        t.diverged = true;
        t.error = e.what();
      }
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(threads, trials));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  bool any = false;
  std::string seeds;
  for (std::size_t i = 0; i < trials; ++i) {
    const TrialRecord& t = out.trials[i];
    if (t.diverged) {
      seeds += (seeds.empty() ? "" : ", ") + std::to_string(t.config.seed);
      continue;
    }
    if (!any || t.val_rmse < out.trials[out.best].val_rmse) out.best = i;
    any = true;
  }
  if (!any) throw Diverged("all trials diverged (seeds " + seeds + ")", {});
  return out;
}

}  // namespace abnn
