#include "abnn/results.hpp"

#include <cstdio>
#include <fstream>

#include "abnn/error.hpp"

namespace abnn {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
void take(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where) {
  if (!j.is_object()) throw Error(Errc::Parse, std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok |= key == k;
    if (!ok) throw Error(Errc::Parse, std::string("unknown ") + where + " key '" + key + "'");
  }
}

}  // namespace

std::vector<ResultRow> result_rows(const ExperimentResult& r) {
  const std::string model = model_kind_name(r.config.model.kind);
  return {
      {r.task, model, "val", r.val_rmse, r.config.seed, r.wall_clock_s},
      {r.task, model, "small", r.small_rmse, r.config.seed, r.wall_clock_s},
      {r.task, model, "large", r.large_rmse, r.config.seed, r.wall_clock_s},
  };
}

std::string results_csv(const std::vector<ResultRow>& rows, bool omit_timing) {
  std::string out = "task,model,split,rmse,seed,wall_clock_s\n";
  for (const auto& r : rows)
    out += r.task + "," + r.model + "," + r.split + "," + num(r.rmse) + "," + std::to_string(r.seed) + "," +
           (omit_timing ? std::string("0") : num(r.wall_clock_s)) + "\n";
  return out;
}

nlohmann::json to_json(const ModelSpec& s) {
  return {{"kind", model_kind_name(s.kind)}, {"dim", s.dim},
          {"groups", s.groups},              {"units", s.units},
          {"flow_layers", s.flow_layers},    {"flow_hidden", s.flow_hidden},
          {"ds_layers", s.ds_layers},        {"ds_hidden", s.ds_hidden},
          {"ds_middle", s.ds_middle}};
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"lr", c.adam.lr},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"eps", c.adam.eps},
          {"weight_decay", c.adam.weight_decay},
          {"lr_final_ratio", c.lr_final_ratio},
          {"seed", c.seed},
          {"model", to_json(c.model)}};
}

nlohmann::json to_json(const ExperimentResult& r, bool omit_timing) {
  return {{"task", r.task},
          {"config", to_json(r.config)},
          {"rmse", {{"val", r.val_rmse}, {"small", r.small_rmse}, {"large", r.large_rmse}}},
          {"loss_curve", r.loss_curve},
          {"wall_clock_s", omit_timing ? 0.0 : r.wall_clock_s}};
}

nlohmann::json to_json(const SearchResult& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    nlohmann::json j{{"index", t.index}, {"config", to_json(t.config)}, {"diverged", t.diverged}};
    if (t.diverged)
      j["error"] = t.error;
    else
      j["val_rmse"] = t.val_rmse;
    trials.push_back(std::move(j));
  }
  return {{"best", r.best}, {"trials", std::move(trials)}};
}

void apply_json(ModelSpec& s, const nlohmann::json& j) {
  reject_unknown(j, {"kind", "dim", "groups", "units", "flow_layers", "flow_hidden", "ds_layers", "ds_hidden", "ds_middle"},
                 "model");
  if (j.contains("kind")) {
    std::string kind;
    take(j, "kind", kind);
    s.kind = parse_model_kind(kind);
  }
  take(j, "dim", s.dim);
  take(j, "groups", s.groups);
  take(j, "units", s.units);
  take(j, "flow_layers", s.flow_layers);
  take(j, "flow_hidden", s.flow_hidden);
  take(j, "ds_layers", s.ds_layers);
  take(j, "ds_hidden", s.ds_hidden);
  take(j, "ds_middle", s.ds_middle);
}

void apply_json(TrainConfig& c, const nlohmann::json& j) {
  reject_unknown(j, {"epochs", "batch_size", "lr", "beta1", "beta2", "eps", "weight_decay", "lr_final_ratio", "seed", "model"},
                 "training config");
  take(j, "epochs", c.epochs);
  take(j, "batch_size", c.batch_size);
  take(j, "lr", c.adam.lr);
  take(j, "beta1", c.adam.beta1);
  take(j, "beta2", c.adam.beta2);
  take(j, "eps", c.adam.eps);
  take(j, "weight_decay", c.adam.weight_decay);
  take(j, "lr_final_ratio", c.lr_final_ratio);
  take(j, "seed", c.seed);
  if (j.contains("model")) apply_json(c.model, j.at("model"));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error(Errc::Io, "failed writing '" + path + "'");
}

}  // namespace abnn
