#include "abnn/model.hpp"

#include "abnn/error.hpp"

namespace abnn {

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Agn: return "agn";
    case ModelKind::Asn: return "asn";
    case ModelKind::DeepSets: return "deepsets";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "agn") return ModelKind::Agn;
  if (name == "asn") return ModelKind::Asn;
  if (name == "deepsets") return ModelKind::DeepSets;
  throw Error(Errc::InvalidArgument, "unknown model kind '" + std::string(name) + "'");
}

Model Model::create(const ModelSpec& spec, Rng& rng) {
  if (spec.dim == 0) throw Error(Errc::InvalidArgument, "model dimension must be positive");
  if (spec.kind == ModelKind::DeepSets)
    return Model(DeepSets(DeepSetsShape{spec.dim, spec.ds_layers, spec.ds_hidden, spec.ds_middle}, rng));
  const Combiner c = spec.kind == ModelKind::Agn ? Combiner::Sum : Combiner::Product;
  if (spec.dim == 1) {
    MonotonicNet net(spec.groups, spec.units);
    ParamStore p = net.init(rng);
    return Model(AbelianOp(InvertibleMap(std::move(net)), std::move(p), c));
  }
  CouplingFlow flow(spec.dim, spec.flow_layers, spec.flow_hidden, rng);
  ParamStore p = flow.init(rng, 0.0);
  return Model(AbelianOp(InvertibleMap(std::move(flow)), std::move(p), c));
}

ModelKind Model::kind() const {
  if (const auto* op = abelian()) return op->combiner() == Combiner::Sum ? ModelKind::Agn : ModelKind::Asn;
  return ModelKind::DeepSets;
}

ModelSpec Model::spec() const {
  ModelSpec s;
  s.kind = kind();
  s.dim = dim();
  if (const auto* ds = deepsets()) {
    s.ds_layers = ds->shape().layers;
    s.ds_hidden = ds->shape().hidden;
    s.ds_middle = ds->shape().middle;
  } else if (const auto* net = abelian()->phi().monotonic()) {
    s.groups = net->groups();
    s.units = net->units();
  } else {
    const auto* flow = abelian()->phi().coupling();
    s.flow_layers = flow->layer_count();
    s.flow_hidden = flow->hidden();
  }
  return s;
}

std::size_t Model::dim() const {
  return std::visit([](const auto& m) { return m.dim(); }, impl_);
}

ParamStore& Model::params() {
  return std::visit([](auto& m) -> ParamStore& { return m.params(); }, impl_);
}

const ParamStore& Model::params() const {
  return std::visit([](const auto& m) -> const ParamStore& { return m.params(); }, impl_);
}

Vector Model::predict(std::span<const Vector> xs) const {
  if (const auto* op = abelian()) return op->fold(xs);
  return (*deepsets())(xs);
}

}  // namespace abnn
