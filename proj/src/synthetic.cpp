#include "abnn/synthetic.hpp"

#include <cmath>

#include "abnn/error.hpp"

namespace abnn {

double SyntheticTask::op(double x, double y) const {
  switch (kind) {
    case TaskKind::Add: return x + y;
    case TaskKind::Add1: return x + y + 1.0;
    case TaskKind::CbrtSumCubes: return std::cbrt(x * x * x + y * y * y);
    case TaskKind::Mul: return x * y;
    case TaskKind::BilinearHalf: return x + y + x * y / 2.0;
  }
  return 0.0;
}

const std::vector<SyntheticTask>& synthetic_tasks() {
  static const std::vector<SyntheticTask> tasks{
      {TaskKind::Add, "add", "x+y"},
      {TaskKind::Add1, "add1", "x+y+1"},
      {TaskKind::CbrtSumCubes, "cbrt_sum_cubes", "cbrt(x^3+y^3)"},
      {TaskKind::Mul, "mul", "xy"},
      {TaskKind::BilinearHalf, "bilinear_half", "x+y+xy/2"},
  };
  return tasks;
}

const SyntheticTask& find_task(std::string_view name) {
  for (const auto& t : synthetic_tasks())
    if (t.name == name) return t;
  throw Error(Errc::InvalidArgument, "unknown task '" + std::string(name) + "'");
}

Vector fold_target(const SyntheticTask& task, std::span<const Vector> xs) {
  if (xs.empty()) throw Error(Errc::EmptyMultiset, "empty multiset");
  double acc = xs[0].at(0);
  for (std::size_t i = 1; i < xs.size(); ++i) acc = task.op(acc, xs[i].at(0));
  return {acc};
}

Dataset generate_dataset(const SyntheticTask& task, std::size_t n, std::span<const std::size_t> sizes, Rng& rng) {
  if (sizes.empty()) throw Error(Errc::InvalidArgument, "generate_dataset: no multiset sizes");
  Dataset out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pick = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(sizes.size()) - 1));
    Example ex;
    ex.xs.resize(sizes[pick]);
    for (auto& x : ex.xs) x = {uniform(rng, task.lo, task.hi)};
    ex.target = fold_target(task, ex.xs);
    out.push_back(std::move(ex));
  }
  return out;
}

Dataset generate_dataset(const SyntheticTask& task, std::size_t n, std::span<const std::size_t> sizes,
                         std::uint64_t seed) {
  Rng rng(seed);
  return generate_dataset(task, n, sizes, rng);
}

Splits generate_splits(const SyntheticTask& task, std::uint64_t seed, const SplitSizes& sizes) {
  Rng rng(seed);
  Splits s;
  s.train = generate_dataset(task, sizes.train, task.train_sizes, rng);
  s.val = generate_dataset(task, sizes.val, task.train_sizes, rng);
  s.small = generate_dataset(task, sizes.small, task.train_sizes, rng);
  s.large = generate_dataset(task, sizes.large, task.large_sizes, rng);
  return s;
}

}  // namespace abnn
