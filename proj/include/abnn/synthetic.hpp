#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abnn/rng.hpp"
#include "abnn/vector.hpp"

namespace abnn {

enum class TaskKind { Add, Add1, CbrtSumCubes, Mul, BilinearHalf };

struct SyntheticTask {
  TaskKind kind;
  std::string name;
  std::string formula;
  double lo = -5.0;
  double hi = 5.0;
  std::vector<std::size_t> train_sizes{2, 3, 4};
  std::vector<std::size_t> large_sizes{10, 11, 12};

  double op(double x, double y) const;
};

// add, add1, cbrt_sum_cubes, mul, bilinear_half.
const std::vector<SyntheticTask>& synthetic_tasks();
// Throws InvalidArgument for an unknown name.
const SyntheticTask& find_task(std::string_view name);

struct Example {
  Multiset xs;
  Vector target;
};
using Dataset = std::vector<Example>;

// Left fold of the exact target operation over 1-D elements.
Vector fold_target(const SyntheticTask& task, std::span<const Vector> xs);

// Sizes drawn uniformly from `sizes`, elements uniformly from [lo, hi].
Dataset generate_dataset(const SyntheticTask& task, std::size_t n, std::span<const std::size_t> sizes, Rng& rng);
Dataset generate_dataset(const SyntheticTask& task, std::size_t n, std::span<const std::size_t> sizes,
                         std::uint64_t seed);

struct SplitSizes {
  std::size_t train = 500;
  std::size_t val = 100;
  std::size_t small = 100;
  std::size_t large = 100;
};

struct Splits {
  Dataset train, val, small, large;
};

// Consecutive draws from a single generator seeded with `seed`.
Splits generate_splits(const SyntheticTask& task, std::uint64_t seed, const SplitSizes& sizes = {});

}  // namespace abnn
