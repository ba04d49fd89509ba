#include "abnn/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "abnn/error.hpp"
#include "abnn/loss.hpp"

namespace abnn {

namespace {

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kBatchStream = 2;

}  // namespace

std::vector<double> minibatch_adam(ParamStore& params, std::size_t n, std::size_t epochs, std::size_t batch_size,
                                   const AdamConfig& adam, Rng& rng, const BatchLoss& loss,
                                   double lr_final_ratio) {
  if (n == 0) throw Error(Errc::InvalidArgument, "training data is empty");
  if (batch_size == 0) throw Error(Errc::InvalidArgument, "batch size must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> curve;
  curve.reserve(epochs);
  Tape tape;
  AdamConfig step_cfg = adam;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    step_cfg.lr = annealed_lr(adam.lr, lr_final_ratio, epoch, epochs);
    shuffle(std::span<std::size_t>(order), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::span<const std::size_t> batch(order.data() + start, std::min(batch_size, n - start));
      tape.clear();
      const std::vector<Var> vars = tape.bind(params);
      Var l;
      try {
        l = loss(tape, vars, batch);
      } catch (const Error& e) {
        if (e.code() != Errc::InversionOutOfRange) throw;
        throw Diverged(std::string("diverged: ") + e.what(), curve);
      }
      if (!std::isfinite(l.value()))
        throw Diverged("diverged: non-finite loss in epoch " + std::to_string(epoch), curve);
      tape.backward(l, params);
      try {
        adam_step(params, step_cfg);
      } catch (const Diverged& d) {
        throw Diverged(d.what(), curve);
      }
      total += l.value() * static_cast<double>(batch.size());
    }
    curve.push_back(total / static_cast<double>(n));
  }
  return curve;
}

double annealed_lr(double lr, double final_ratio, std::size_t epoch, std::size_t epochs) {
  if (final_ratio == 1.0 || epochs <= 1) return lr;
  const double t = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return lr * (final_ratio + (1.0 - final_ratio) * 0.5 * (1.0 + std::cos(3.141592653589793 * t)));
}

double rmse(const std::function<Vector(std::span<const Vector>)>& predict, const Dataset& data) {
  if (data.empty()) throw Error(Errc::InvalidArgument, "evaluate: data is empty");
  double total = 0.0;
  for (const auto& ex : data) {
    const Vector y = predict(ex.xs);
    require_same_dim(y.size(), ex.target.size(), "evaluate");
    double se = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) se += (y[i] - ex.target[i]) * (y[i] - ex.target[i]);
    total += se / static_cast<double>(y.size());
  }
  return std::sqrt(total / static_cast<double>(data.size()));
}

double evaluate(const Model& model, const Dataset& data) {
  return rmse([&](std::span<const Vector> xs) { return model.predict(xs); }, data);
}

TrainResult train(Model& model, const Dataset& data, const TrainConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(cfg.seed, kBatchStream));
  TrainResult r;
  r.loss_curve = minibatch_adam(
      model.params(), data.size(), cfg.epochs, cfg.batch_size, cfg.adam, rng,
      [&](Tape& tape, std::span<const Var> params, std::span<const std::size_t> batch) {
        std::vector<Var> terms;
        terms.reserve(batch.size());
        for (std::size_t i : batch) {
          const Example& ex = data[i];
          const std::vector<Var> y = model.forward<Var>(params, ex.xs, &tape);
          terms.push_back(squared_error<Var>(y, ex.target));
        }
        return sum(terms) * (1.0 / static_cast<double>(batch.size() * model.dim()));
      },
      cfg.lr_final_ratio);
  r.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Experiment run_experiment(const SyntheticTask& task, const Splits& splits, const TrainConfig& cfg) {
  Rng init(derive_seed(cfg.seed, kInitStream));
  Model model = Model::create(cfg.model, init);
  const TrainResult tr = train(model, splits.train, cfg);
  ExperimentResult res;
  res.task = task.name;
  res.config = cfg;
  res.val_rmse = evaluate(model, splits.val);
  res.small_rmse = evaluate(model, splits.small);
  res.large_rmse = evaluate(model, splits.large);
  res.loss_curve = tr.loss_curve;
  res.wall_clock_s = tr.wall_clock_s;
  return Experiment{std::move(model), std::move(res)};
}

}  // namespace abnn
