#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "abnn/model.hpp"
#include "abnn/param_store.hpp"
#include "abnn/synthetic.hpp"
#include "abnn/tape.hpp"

namespace abnn {

struct TrainConfig {
  std::size_t epochs = 1000;
  std::size_t batch_size = 32;
  AdamConfig adam;
  // Cosine annealing of the learning rate, per epoch, from adam.lr down to
  // adam.lr * lr_final_ratio. 1 keeps it constant.
  double lr_final_ratio = 1.0;
  std::uint64_t seed = 0;
  ModelSpec model;
};

// Mean loss over the examples listed in `batch`, recorded on `tape` against
// the bound parameters.
using BatchLoss = std::function<Var(Tape& tape, std::span<const Var> params, std::span<const std::size_t> batch)>;

// Minibatch Adam over `n` examples with a fresh shuffle each epoch. Returns
// the per-epoch loss (example-weighted mean of batch losses). Throws Diverged
// with the partial curve on a non-finite loss, gradient, or a failed
// inversion.
std::vector<double> minibatch_adam(ParamStore& params, std::size_t n, std::size_t epochs, std::size_t batch_size,
                                   const AdamConfig& adam, Rng& rng, const BatchLoss& loss,
                                   double lr_final_ratio = 1.0);

// Learning rate for `epoch` under cosine annealing to lr * final_ratio.
double annealed_lr(double lr, double final_ratio, std::size_t epoch, std::size_t epochs);

// sqrt of the mean over examples of the mean squared elementwise error.
double rmse(const std::function<Vector(std::span<const Vector>)>& predict, const Dataset& data);
double evaluate(const Model& model, const Dataset& data);

struct TrainResult {
  std::vector<double> loss_curve;
  double wall_clock_s = 0.0;
};

// MSE training. Batch order comes from a stream derived from cfg.seed.
TrainResult train(Model& model, const Dataset& data, const TrainConfig& cfg);

struct ExperimentResult {
  std::string task;
  TrainConfig config;
  double val_rmse = 0.0;
  double small_rmse = 0.0;
  double large_rmse = 0.0;
  std::vector<double> loss_curve;
  double wall_clock_s = 0.0;
};

struct Experiment {
  Model model;
  ExperimentResult result;
};

// Initializes a model from cfg.seed, trains on splits.train and evaluates the
// other splits.
Experiment run_experiment(const SyntheticTask& task, const Splits& splits, const TrainConfig& cfg);

}  // namespace abnn
