#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "abnn/abelian.hpp"
#include "abnn/deepsets.hpp"
#include "abnn/rng.hpp"

namespace abnn {

// Tag values are part of the checkpoint format.
enum class ModelKind : std::uint32_t { Agn = 1, Asn = 2, DeepSets = 3 };

const char* model_kind_name(ModelKind kind);
// Accepts agn, asn, deepsets.
ModelKind parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::Agn;
  std::size_t dim = 1;
  // Monotonic phi (dim = 1).
  std::size_t groups = 8;
  std::size_t units = 8;
  // Coupling-flow phi (dim >= 2).
  std::size_t flow_layers = 4;
  std::size_t flow_hidden = 16;
  // DeepSets.
  std::size_t ds_layers = 3;
  std::size_t ds_hidden = 16;
  std::size_t ds_middle = 8;
};

// One of the three multiset models behind a common interface.
class Model {
 public:
  explicit Model(AbelianOp op) : impl_(std::move(op)) {}
  explicit Model(DeepSets ds) : impl_(std::move(ds)) {}

  // Fresh model; coupling flows start as the identity map.
  static Model create(const ModelSpec& spec, Rng& rng);

  ModelKind kind() const;
  ModelSpec spec() const;
  std::size_t dim() const;
  ParamStore& params();
  const ParamStore& params() const;

  const AbelianOp* abelian() const { return std::get_if<AbelianOp>(&impl_); }
  const DeepSets* deepsets() const { return std::get_if<DeepSets>(&impl_); }

  Vector predict(std::span<const Vector> xs) const;

  template <class S>
  std::vector<S> forward(std::span<const S> params, std::span<const Vector> xs, Tape* tape = nullptr) const {
    return std::visit([&](const auto& m) { return m.template forward<S>(params, xs, tape); }, impl_);
  }

 private:
  std::variant<AbelianOp, DeepSets> impl_;
};

}  // namespace abnn
