#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "abnn/algebra.hpp"
#include "abnn/analogy.hpp"
#include "abnn/checkpoint.hpp"
#include "abnn/error.hpp"
#include "abnn/results.hpp"
#include "abnn/search.hpp"
#include "abnn/synthetic.hpp"
#include "abnn/train.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using namespace abnn;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out = "abnn_out";
  std::size_t threads = 1;
};

struct TrainOpts {
  std::size_t epochs = 1000;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  double weight_decay = 0.0;
  double lr_final_ratio = 1.0;
};

struct SyntheticOpts {
  std::string task;
  std::vector<std::string> models{"agn"};
  TrainOpts train;
  std::size_t groups = 8, units = 8;
  std::size_t ds_layers = 3, ds_hidden = 16, ds_middle = 8;
  std::size_t trials = 0;
  std::size_t n_train = 500, n_val = 100, n_small = 100, n_large = 100;
  bool omit_timing = false;
  bool no_checkpoint = false;
};

struct AnalogyOpts {
  std::string embeddings;
  std::vector<std::string> relations;
  std::string kind = "wv_agn";
  std::string model_path;
  std::string split = "test";
  bool no_normalize = false;
  bool exclude_abc = false;
  std::uint64_t split_seed = 0;
  bool split_seed_set = false;
  AnalogyConfig cfg;
};

void add_train_flags(CLI::App* sub, TrainOpts& t) {
  sub->add_option("--epochs", t.epochs, "Training epochs")->capture_default_str();
  sub->add_option("--batch-size", t.batch_size, "Minibatch size")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--lr", t.lr, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--weight-decay", t.weight_decay, "L2 weight decay")->capture_default_str()->check(CLI::NonNegativeNumber);
  sub->add_option("--lr-final-ratio", t.lr_final_ratio, "Cosine-anneal the learning rate down to lr * ratio")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
}

void add_synthetic_flags(CLI::App* sub, SyntheticOpts& o, std::size_t default_trials) {
  o.trials = default_trials;
  std::vector<std::string> names;
  for (const auto& t : synthetic_tasks()) names.push_back(t.name);
  sub->add_option("--task", o.task, "Target operation")->required()->check(CLI::IsMember(names));
  sub->add_option("--model", o.models, "Models to train (comma separated)")
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember({"agn", "asn", "deepsets"}));
  add_train_flags(sub, o.train);
  sub->add_option("--groups", o.groups, "Monotonic net groups K")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--units", o.units, "Monotonic net units per group J")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--ds-layers", o.ds_layers, "DeepSets layers per MLP")->capture_default_str()->check(CLI::Range(2, 64));
  sub->add_option("--ds-hidden", o.ds_hidden, "DeepSets hidden width")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--ds-middle", o.ds_middle, "DeepSets pooled width")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--trials", o.trials, "Random-search trials (0 trains the given hyperparameters)")->capture_default_str();
  sub->add_option("--n-train", o.n_train, "Training multisets")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--n-val", o.n_val, "Validation multisets")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--n-small", o.n_small, "Small-test multisets")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--n-large", o.n_large, "Large-test multisets")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_flag("--omit-timing", o.omit_timing, "Write wall_clock_s as 0 so reruns are byte-identical");
  sub->add_flag("--no-checkpoint", o.no_checkpoint, "Skip writing model checkpoints");
}

void add_analogy_flags(CLI::App* sub, AnalogyOpts& o, bool training) {
  sub->add_option("--embeddings", o.embeddings, "word2vec text file")->required()->check(CLI::ExistingFile);
  sub->add_option("--relations", o.relations, "Relation TSV files or directories of them")
      ->required()
      ->check(CLI::ExistingPath);
  sub->add_option("--kind", o.kind, "wv, wv_mlp or wv_agn")
      ->capture_default_str()
      ->check(CLI::IsMember({"wv", "wv_mlp", "wv_agn"}));
  sub->add_flag("--no-normalize", o.no_normalize, "Keep embeddings unnormalized");
  sub->add_flag("--exclude-abc", o.exclude_abc, "Remove a, b, c from the retrieval candidates");
  sub->add_option("--split-seed", o.split_seed, "Seed of the 60/20/20 split (defaults to --seed)")
      ->each([&o](const std::string&) { o.split_seed_set = true; });
  sub->add_option("--split", o.split, "Split to evaluate")
      ->capture_default_str()
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  if (training) {
    TrainOpts t;
    auto& c = o.cfg;
    sub->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
    sub->add_option("--batch-size", c.batch_size, "Minibatch size")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--lr", c.adam.lr, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--weight-decay", c.adam.weight_decay, "L2 weight decay")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--lr-final-ratio", c.lr_final_ratio, "Cosine-anneal the learning rate down to lr * ratio")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--flow-layers", c.flow_layers, "Coupling layers of phi")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--flow-hidden", c.flow_hidden, "Hidden width of the coupling subnets")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--mlp-hidden", c.mlp_hidden, "Hidden width of the wv_mlp network")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-train", c.max_train, "Cap on training analogies (0 uses all)")->capture_default_str();
  } else {
    sub->add_option("--model", o.model_path, "Model file written by analogy-train (overrides --kind)")
        ->check(CLI::ExistingFile);
  }
}

std::string path_in(const GlobalOpts& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

int run_synthetic(const GlobalOpts& g, const SyntheticOpts& o) {
  const SyntheticTask& task = find_task(o.task);
  TrainConfig base;
  base.epochs = o.train.epochs;
  base.batch_size = o.train.batch_size;
  base.adam.lr = o.train.lr;
  base.adam.weight_decay = o.train.weight_decay;
  base.lr_final_ratio = o.train.lr_final_ratio;
  base.seed = g.seed;
  base.model.groups = o.groups;
  base.model.units = o.units;
  base.model.ds_layers = o.ds_layers;
  base.model.ds_hidden = o.ds_hidden;
  base.model.ds_middle = o.ds_middle;

  const Splits splits = generate_splits(task, g.seed, SplitSizes{o.n_train, o.n_val, o.n_small, o.n_large});
  std::vector<ResultRow> rows;
  nlohmann::json log{{"task", task.name}, {"formula", task.formula}, {"experiments", nlohmann::json::array()}};
  for (const auto& name : o.models) {
    TrainConfig cfg = base;
    cfg.model.kind = parse_model_kind(name);
    nlohmann::json entry;
    if (o.trials > 0) {
      const SearchResult sr = random_search(task, splits, SearchSpace{}, cfg, o.trials, g.seed, g.threads);
      cfg = sr.best_config();
      entry["search"] = to_json(sr);
    }
    Experiment e = run_experiment(task, splits, cfg);
    for (const auto& row : result_rows(e.result)) {
      rows.push_back(row);
      std::printf("%-14s %-9s %-6s rmse=%.6g\n", row.task.c_str(), row.model.c_str(), row.split.c_str(), row.rmse);
    }
    entry["result"] = to_json(e.result, o.omit_timing);
    log["experiments"].push_back(std::move(entry));
    if (!o.no_checkpoint) save_checkpoint(e.model, path_in(g, task.name + "_" + name + ".ckpt"));
  }
  write_text(path_in(g, "results.csv"), results_csv(rows, o.omit_timing));
  write_json(path_in(g, "log.json"), log);
  return 0;
}

std::vector<std::vector<double>> parse_grid(const std::string& text) {
  std::vector<std::vector<double>> grid;
  std::stringstream rows(text);
  for (std::string row; std::getline(rows, row, ';');) {
    std::vector<double> r;
    std::stringstream cells(row);
    for (std::string cell; std::getline(cells, cell, ',');) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos)
        throw Error(Errc::InvalidArgument, "grid entry '" + cell + "' is not a number");
      r.push_back(v);
    }
    grid.push_back(std::move(r));
  }
  if (grid.empty()) throw Error(Errc::InvalidArgument, "empty coefficient grid");
  for (const auto& r : grid)
    if (r.size() != grid.size()) throw Error(Errc::InvalidArgument, "coefficient grid must be square");
  return grid;
}

int run_classify(const GlobalOpts& g, const std::string& grid_text) {
  const SymPoly2 poly(parse_grid(grid_text));
  const Classification c = classify(poly);
  nlohmann::json report{{"grid", poly.grid()}};
  if (c.form) {
    std::printf("%s\n", c.form->describe().c_str());
    report["associative"] = true;
    report["form"] = c.form->describe();
    report["alpha"] = c.form->alpha;
    report["beta"] = c.form->beta;
    report["gamma"] = c.form->gamma;
  } else {
    const Witness& w = *c.witness;
    std::printf("NotAssociative witness x=%.6g y=%.6g z=%.6g discrepancy=%.6g\n", w.x, w.y, w.z, w.discrepancy);
    report["associative"] = false;
    report["witness"] = {{"x", w.x}, {"y", w.y}, {"z", w.z}, {"discrepancy", w.discrepancy}};
  }
  write_json(path_in(g, "classify.json"), report);
  return 0;
}

int run_bound(const GlobalOpts& g, const SizeGenBound& sg) {
  const double v = size_gen_bound(sg);
  std::printf("%.17g\n", v);
  write_json(path_in(g, "bound.json"), {{"epsilon", sg.epsilon},
                                        {"a", sg.a},
                                        {"b", sg.b},
                                        {"k1", sg.k1},
                                        {"k2", sg.k2},
                                        {"exponent", ceil_log(sg.a, sg.b)},
                                        {"bound", v}});
  return 0;
}

std::vector<Relation> load_relations(const std::vector<std::string>& paths) {
  std::vector<Relation> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".tsv") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) out.push_back(load_relation(f.string()));
    } else {
      out.push_back(load_relation(p));
    }
  }
  return out;
}

std::vector<AnalogyExample> pick_split(const AnalogySplit& s, const std::string& which) {
  if (which == "train") return s.train;
  if (which == "val") return s.val;
  if (which == "test") return s.test;
  std::vector<AnalogyExample> all = s.train;
  all.insert(all.end(), s.val.begin(), s.val.end());
  all.insert(all.end(), s.test.begin(), s.test.end());
  return all;
}

int report_eval(const GlobalOpts& g, const AnalogyOpts& o, const AnalogyModel& model, const EmbeddingTable& table,
                const std::vector<AnalogyExample>& test, const std::string& file, nlohmann::json extra) {
  if (test.empty()) throw Error(Errc::InvalidArgument, "the selected split has no analogies");
  const AnalogyEval ev = evaluate_analogy(model, table, test, o.exclude_abc, g.threads);
  std::printf("%s accuracy=%.4f (%zu/%zu) exclude_abc=%s\n", analogy_kind_name(model.kind()), ev.accuracy, ev.correct,
              ev.total, o.exclude_abc ? "true" : "false");
  nlohmann::json report = to_json(ev, test);
  report["kind"] = analogy_kind_name(model.kind());
  report["split"] = o.split;
  for (auto& [k, v] : extra.items()) report[k] = v;
  write_json(path_in(g, file), report);
  return 0;
}

int run_analogy_train(const GlobalOpts& g, AnalogyOpts o) {
  const EmbeddingTable table = load_embeddings(o.embeddings, !o.no_normalize);
  const auto relations = load_relations(o.relations);
  const AnalogySplit split = split_relations(relations, table, o.split_seed_set ? o.split_seed : g.seed);
  o.cfg.seed = g.seed;
  AnalogyModel model(parse_analogy_kind(o.kind), table.dim(), o.cfg);
  const auto curve = train_analogy(model, table, split.train, o.cfg);
  save_analogy_model(path_in(g, "analogy_model.json"), model, o.cfg);
  return report_eval(g, o, model, table, pick_split(split, o.split), "analogy_report.json",
                     {{"loss_curve", curve}, {"train_size", split.train.size()}});
}

int run_analogy_eval(const GlobalOpts& g, const AnalogyOpts& o) {
  const EmbeddingTable table = load_embeddings(o.embeddings, !o.no_normalize);
  const auto relations = load_relations(o.relations);
  const AnalogySplit split = split_relations(relations, table, o.split_seed_set ? o.split_seed : g.seed);
  const AnalogyModel model = o.model_path.empty() ? AnalogyModel(parse_analogy_kind(o.kind), table.dim(), o.cfg)
                                                  : load_analogy_model(o.model_path);
  if (model.kind() != AnalogyKind::Wv && o.model_path.empty())
    throw Error(Errc::InvalidArgument, "--kind wv_mlp and wv_agn need a trained --model");
  return report_eval(g, o, model, table, pick_split(split, o.split), "analogy_eval.json", nlohmann::json::object());
}

int run_world(const GlobalOpts& g, AnalogyWorldConfig cfg) {
  cfg.seed = g.seed;
  const AnalogyWorld world = make_analogy_world(cfg);
  write_embeddings(path_in(g, "embeddings.txt"), world.table);
  fs::create_directories(fs::path(g.out) / "relations");
  for (const auto& rel : world.relations)
    write_relation((fs::path(g.out) / "relations" / (rel.category + ".tsv")).string(), rel);
  std::printf("wrote %zu embeddings and %zu relations to %s\n", world.table.size(), world.relations.size(),
              g.out.c_str());
  return 0;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Diverged:
    case Errc::Parse:
    case Errc::BadMagic:
    case Errc::VersionMismatch:
    case Errc::Truncated:
    case Errc::ChecksumMismatch:
    case Errc::InversionOutOfRange:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abelian group and semigroup networks: synthetic experiments, algebra checks, analogies"};
  app.config_formatter(std::make_shared<abnn::cli::JsonConfig>());
  app.set_config("--config", "", "JSON config file (flags override it)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand();
  app.fallthrough();
  auto configurable = [](CLI::App* sub) { sub->configurable(); };

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  SyntheticOpts syn, srch;
  auto* synthetic = app.add_subcommand("synthetic", "Train and evaluate multiset models on a synthetic task");
  add_synthetic_flags(synthetic, syn, 0);
  auto* search = app.add_subcommand("search", "Random hyperparameter search, then train the best configuration");
  add_synthetic_flags(search, srch, 16);

  std::string grid;
  auto* classify_cmd = app.add_subcommand("classify-poly", "Classify a symmetric polynomial x*y");
  classify_cmd->add_option("--grid", grid, "Coefficients a_ij of x^i y^j: rows split by ';', entries by ','")
      ->required();

  SizeGenBound sg;
  auto* bound = app.add_subcommand("bound", "Size-generalization error bound");
  bound->add_option("--epsilon", sg.epsilon, "Error bound on small multisets")->required()->check(CLI::NonNegativeNumber);
  bound->add_option("--a", sg.a, "Small-size threshold")->required();
  bound->add_option("--b", sg.b, "Evaluation size")->required();
  bound->add_option("--k1", sg.k1, "Lipschitz constant of phi")->required()->check(CLI::PositiveNumber);
  bound->add_option("--k2", sg.k2, "Lipschitz constant of phi^-1")->required()->check(CLI::PositiveNumber);

  AnalogyOpts atrain, aeval;
  auto* analogy_train = app.add_subcommand("analogy-train", "Train an analogy model and report test accuracy");
  add_analogy_flags(analogy_train, atrain, true);
  auto* analogy_eval = app.add_subcommand("analogy-eval", "Evaluate an analogy model by ranked retrieval");
  add_analogy_flags(analogy_eval, aeval, false);

  AnalogyWorldConfig world;
  auto* world_cmd = app.add_subcommand("analogy-world", "Write a synthetic embedding table with exact group analogies");
  world_cmd->add_option("--words", world.words, "Vocabulary size (even)")->capture_default_str();
  world_cmd->add_option("--dim", world.dim, "Embedding dimension")->capture_default_str();
  world_cmd->add_option("--relations", world.relations, "Number of relations")->capture_default_str();
  world_cmd->add_option("--flow-layers", world.flow_layers, "Coupling layers of the hidden map")->capture_default_str();
  world_cmd->add_option("--flow-hidden", world.flow_hidden, "Hidden width of the hidden map")->capture_default_str();
  world_cmd->add_option("--flow-scale", world.flow_scale, "Output scale of the hidden map's subnets")
      ->capture_default_str();
  world_cmd->add_option("--offset-scale", world.offset_scale, "Spread of relation offsets")->capture_default_str();

  for (auto* sub : app.get_subcommands({})) configurable(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fs::create_directories(g.out);
    write_text(path_in(g, "config.json"), app.config_to_str(true, false));
    if (synthetic->parsed()) return run_synthetic(g, syn);
    if (search->parsed()) return run_synthetic(g, srch);
    if (classify_cmd->parsed()) return run_classify(g, grid);
    if (bound->parsed()) return run_bound(g, sg);
    if (analogy_train->parsed()) return run_analogy_train(g, atrain);
    if (analogy_eval->parsed()) return run_analogy_eval(g, aeval);
    if (world_cmd->parsed()) return run_world(g, world);
  } catch (const Diverged& e) {
    std::cerr << "error: " << e.what() << " (after " << e.partial_curve().size() << " epochs)\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
