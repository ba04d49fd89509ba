#include "abnn/analogy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "abnn/error.hpp"
#include "abnn/loss.hpp"
#include "abnn/train.hpp"

namespace abnn {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(Errc::Parse, source + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !s.empty() && std::isfinite(out);
}

bool parse_count(const std::string& s, std::size_t& out) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
  out = std::stoull(s);
  return true;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::Io, "cannot open '" + path + "'");
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  return f;
}

struct Resolved {
  std::size_t a, b, c;
  std::vector<std::size_t> d;
};

Resolved resolve(const EmbeddingTable& t, const AnalogyExample& ex) {
  if (ex.d_candidates.empty()) throw Error(Errc::InvalidArgument, "analogy example has no candidates");
  Resolved r{t.index(ex.a), t.index(ex.b), t.index(ex.c), {}};
  for (const auto& d : ex.d_candidates) r.d.push_back(t.index(d));
  return r;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> vocab, std::vector<Vector> rows, bool normalize)
    : vocab_(std::move(vocab)), rows_(std::move(rows)), normalized_(normalize) {
  if (vocab_.size() != rows_.size()) throw Error(Errc::ShapeMismatch, "embedding table: vocab and rows differ in size");
  dim_ = rows_.empty() ? 0 : rows_[0].size();
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (rows_[i].size() != dim_) throw Error(Errc::ShapeMismatch, "embedding table: ragged rows");
    if (!index_.emplace(vocab_[i], i).second)
      throw Error(Errc::InvalidArgument, "embedding table: duplicate token '" + vocab_[i] + "'");
    if (normalize) {
      const double n = norm(rows_[i]);
      if (n == 0.0) throw Error(Errc::ZeroVector, "embedding '" + vocab_[i] + "' is zero and cannot be normalized");
      for (double& v : rows_[i]) v /= n;
    }
  }
}

std::optional<std::size_t> EmbeddingTable::find(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingTable::index(const std::string& token) const {
  const auto i = find(token);
  if (!i) throw Error(Errc::InvalidArgument, "token '" + token + "' is not in the vocabulary");
  return *i;
}

EmbeddingTable parse_embeddings(std::istream& in, bool normalize, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t count = 0, dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!split_ws(line).empty()) break;
  }
  const auto header = split_ws(line);
  if (header.size() != 2 || !parse_count(header[0], count) || !parse_count(header[1], dim) || dim == 0)
    parse_error(source, lineno, "malformed header, expected \"count dim\"");

  std::vector<std::string> vocab;
  std::vector<Vector> rows;
  std::unordered_map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1)
      parse_error(source, lineno,
                  "expected " + std::to_string(dim + 1) + " columns, found " + std::to_string(fields.size()));
    if (!seen.emplace(fields[0], lineno).second)
      parse_error(source, lineno,
                  "duplicate token '" + fields[0] + "' (first seen on line " + std::to_string(seen[fields[0]]) + ")");
    Vector v(dim);
    for (std::size_t i = 0; i < dim; ++i)
      if (!parse_double(fields[i + 1], v[i])) parse_error(source, lineno, "bad number '" + fields[i + 1] + "'");
    if (normalize && norm(v) == 0.0) parse_error(source, lineno, "zero vector cannot be normalized");
    vocab.push_back(fields[0]);
    rows.push_back(std::move(v));
  }
  if (rows.size() != count)
    parse_error(source, lineno,
                "header declares " + std::to_string(count) + " rows, found " + std::to_string(rows.size()));
  return EmbeddingTable(std::move(vocab), std::move(rows), normalize);
}

EmbeddingTable load_embeddings(const std::string& path, bool normalize) {
  auto f = open_in(path);
  return parse_embeddings(f, normalize, path);
}

void write_embeddings(const std::string& path, const EmbeddingTable& table) {
  auto f = open_out(path);
  f << table.size() << ' ' << table.dim() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < table.size(); ++i) {
    f << table.token(i);
    for (double v : table.row(i)) f << ' ' << v;
    f << '\n';
  }
  if (!f) throw Error(Errc::Io, "failed writing '" + path + "'");
}

Relation parse_relation(std::istream& in, const std::string& category, const std::string& source) {
  Relation rel{category, {}};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      parse_error(source, lineno, "expected word1<TAB>word2[/alt...]");
    RelationPair pair{line.substr(0, tab), {}};
    std::istringstream alts(line.substr(tab + 1));
    for (std::string w; std::getline(alts, w, '/');)
      if (!w.empty()) pair.word2.push_back(w);
    if (pair.word1.empty() || pair.word2.empty()) parse_error(source, lineno, "empty word");
    rel.pairs.push_back(std::move(pair));
  }
  return rel;
}

Relation load_relation(const std::string& path) {
  auto f = open_in(path);
  return parse_relation(f, std::filesystem::path(path).stem().string(), path);
}

void write_relation(const std::string& path, const Relation& relation) {
  auto f = open_out(path);
  for (const auto& p : relation.pairs) {
    f << p.word1 << '\t';
    for (std::size_t i = 0; i < p.word2.size(); ++i) f << (i ? "/" : "") << p.word2[i];
    f << '\n';
  }
  if (!f) throw Error(Errc::Io, "failed writing '" + path + "'");
}

AnalogySplit split_relations(std::span<const Relation> relations, const EmbeddingTable& table, std::uint64_t seed) {
  Rng rng(seed);
  AnalogySplit out;
  auto combine = [&](std::span<const RelationPair> pairs, const std::string& cat, std::vector<AnalogyExample>& dst) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
      for (std::size_t j = 0; j < pairs.size(); ++j)
        if (i != j) dst.push_back({pairs[i].word1, pairs[i].word2[0], pairs[j].word1, pairs[j].word2, cat});
  };
  for (const auto& rel : relations) {
    std::vector<RelationPair> kept;
    for (const auto& p : rel.pairs) {
      if (!table.find(p.word1)) continue;
      RelationPair q{p.word1, {}};
      for (const auto& w : p.word2)
        if (table.find(w)) q.word2.push_back(w);
      if (!q.word2.empty()) kept.push_back(std::move(q));
    }
    shuffle(std::span<RelationPair>(kept), rng);
    const std::size_t n = kept.size();
    const std::size_t n_train = n * 6 / 10;
    const std::size_t n_val = n * 2 / 10;
    const std::span<const RelationPair> all(kept);
    combine(all.subspan(0, n_train), rel.category, out.train);
    combine(all.subspan(n_train, n_val), rel.category, out.val);
    combine(all.subspan(n_train + n_val), rel.category, out.test);
  }
  return out;
}

const char* analogy_kind_name(AnalogyKind kind) {
  switch (kind) {
    case AnalogyKind::Wv: return "wv";
    case AnalogyKind::WvMlp: return "wv_mlp";
    case AnalogyKind::WvAgn: return "wv_agn";
  }
  return "?";
}

AnalogyKind parse_analogy_kind(const std::string& name) {
  if (name == "wv") return AnalogyKind::Wv;
  if (name == "wv_mlp") return AnalogyKind::WvMlp;
  if (name == "wv_agn") return AnalogyKind::WvAgn;
  throw Error(Errc::InvalidArgument, "unknown analogy kind '" + name + "' (expected wv, wv_mlp, wv_agn)");
}

AnalogyModel::AnalogyModel(AnalogyKind kind, std::size_t dim, const AnalogyConfig& cfg) : kind_(kind), dim_(dim) {
  if (dim == 0) throw Error(Errc::InvalidArgument, "analogy model dimension must be positive");
  Rng rng(derive_seed(cfg.seed, 1));
  if (kind == AnalogyKind::WvMlp) {
    Mlp mlp({dim, cfg.mlp_hidden, cfg.mlp_hidden, dim}, 0);
    params_ = ParamStore(mlp.param_count());
    mlp.init(params_.values(), rng);
    net_ = std::move(mlp);
  } else if (kind == AnalogyKind::WvAgn) {
    if (dim < 2) throw Error(Errc::InvalidArgument, "wv_agn needs embedding dimension >= 2");
    CouplingFlow flow(dim, cfg.flow_layers, cfg.flow_hidden, rng);
    params_ = flow.init(rng, 0.0);
    net_ = InvertibleMap(std::move(flow));
  }
}

template <class S>
std::vector<S> AnalogyModel::apply(std::span<const S> params, std::span<const double> a, std::span<const double> b,
                                   std::span<const double> c, Tape* tape) const {
  require_same_dim(a.size(), dim_, "analogy");
  require_same_dim(b.size(), dim_, "analogy");
  require_same_dim(c.size(), dim_, "analogy");
  if (const auto* map = std::get_if<InvertibleMap>(&net_)) {
    const auto phi = map->bind<S>(params);
    const auto pa = phi.forward(lift<S>(tape, a));
    const auto pb = phi.forward(lift<S>(tape, b));
    const auto pc = phi.forward(lift<S>(tape, c));
    std::vector<S> z(pa);
    for (std::size_t i = 0; i < dim_; ++i) z[i] = pb[i] - pa[i] + pc[i];
    return phi.inverse(z);
  }
  Vector z(dim_);
  for (std::size_t i = 0; i < dim_; ++i) z[i] = b[i] - a[i] + c[i];
  if (const auto* mlp = std::get_if<Mlp>(&net_)) return mlp->forward<S>(params, lift<S>(tape, z));
  return lift<S>(tape, z);
}

template std::vector<double> AnalogyModel::apply(std::span<const double>, std::span<const double>,
                                                 std::span<const double>, std::span<const double>, Tape*) const;
template std::vector<Var> AnalogyModel::apply(std::span<const Var>, std::span<const double>, std::span<const double>,
                                              std::span<const double>, Tape*) const;

void save_analogy_model(const std::string& path, const AnalogyModel& model, const AnalogyConfig& cfg) {
  const nlohmann::json j{{"format", "abnn-analogy"},
                         {"version", 1},
                         {"kind", analogy_kind_name(model.kind())},
                         {"dim", model.dim()},
                         {"seed", cfg.seed},
                         {"flow_layers", cfg.flow_layers},
                         {"flow_hidden", cfg.flow_hidden},
                         {"mlp_hidden", cfg.mlp_hidden},
                         {"params", std::vector<double>(model.params().values().begin(), model.params().values().end())}};
  auto f = open_out(path);
  f << j.dump() << '\n';
  if (!f) throw Error(Errc::Io, "failed writing '" + path + "'");
}

AnalogyModel load_analogy_model(const std::string& path, AnalogyConfig* cfg_out) {
  auto f = open_in(path);
  try {
    const nlohmann::json j = nlohmann::json::parse(f);
    if (j.at("format") != "abnn-analogy") throw Error(Errc::BadMagic, path + ": not an analogy model file");
    if (j.at("version") != 1) throw Error(Errc::VersionMismatch, path + ": unsupported analogy model version");
    AnalogyConfig cfg;
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.flow_layers = j.at("flow_layers").get<std::size_t>();
    cfg.flow_hidden = j.at("flow_hidden").get<std::size_t>();
    cfg.mlp_hidden = j.at("mlp_hidden").get<std::size_t>();
    AnalogyModel model(parse_analogy_kind(j.at("kind").get<std::string>()), j.at("dim").get<std::size_t>(), cfg);
    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != model.params().size()) throw Error(Errc::Parse, path + ": parameter count mismatch");
    std::copy(params.begin(), params.end(), model.params().values().begin());
    if (cfg_out) *cfg_out = cfg;
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, path + ": " + e.what());
  }
}

std::vector<double> train_analogy(AnalogyModel& model, const EmbeddingTable& table,
                                  std::span<const AnalogyExample> train, const AnalogyConfig& cfg) {
  if (train.empty()) throw Error(Errc::InvalidArgument, "analogy training set is empty");
  require_same_dim(table.dim(), model.dim(), "train_analogy");
  std::vector<Resolved> data;
  data.reserve(train.size());
  for (const auto& ex : train) data.push_back(resolve(table, ex));
  Rng rng(derive_seed(cfg.seed, 2));
  if (cfg.max_train > 0 && cfg.max_train < data.size()) {
    shuffle(std::span<Resolved>(data), rng);
    data.resize(cfg.max_train);
  }
  if (model.kind() == AnalogyKind::Wv) return {};
  return minibatch_adam(
      model.params(), data.size(), cfg.epochs, cfg.batch_size, cfg.adam, rng,
      [&](Tape& tape, std::span<const Var> params, std::span<const std::size_t> batch) {
        std::vector<Var> terms;
        terms.reserve(batch.size());
        for (std::size_t i : batch) {
          const Resolved& r = data[i];
          const auto y = model.apply<Var>(params, table.row(r.a), table.row(r.b), table.row(r.c), &tape);
          terms.push_back(cosine<Var>(y, table.row(r.d[0])));
        }
        return sum(terms) * (-1.0 / static_cast<double>(batch.size()));
      },
      cfg.lr_final_ratio);
}

AnalogyEval evaluate_analogy(const AnalogyModel& model, const EmbeddingTable& table,
                             std::span<const AnalogyExample> test, bool exclude_abc, std::size_t threads) {
  if (test.empty()) throw Error(Errc::InvalidArgument, "analogy test set is empty");
  require_same_dim(table.dim(), model.dim(), "evaluate_analogy");
  std::vector<Resolved> data;
  data.reserve(test.size());
  for (const auto& ex : test) data.push_back(resolve(table, ex));
  std::vector<double> row_norm(table.size());
  for (std::size_t w = 0; w < table.size(); ++w) row_norm[w] = norm(table.row(w));

  AnalogyEval ev;
  ev.exclude_abc = exclude_abc;
  ev.total = test.size();
  ev.ranks.assign(test.size(), 0);
  ev.predictions.assign(test.size(), {});
  std::vector<char> hit(test.size(), 0);

  auto run_one = [&](std::size_t e) {
    const Resolved& r = data[e];
    const Vector y = model(table.row(r.a), table.row(r.b), table.row(r.c));
    const double ny = norm(y);
    std::vector<double> score(table.size());
    for (std::size_t w = 0; w < table.size(); ++w) {
      const double denom = ny * row_norm[w];
      score[w] = denom > 0.0 ? inner(y, table.row(w)) / denom : -2.0;
    }
    auto allowed = [&](std::size_t w) { return !exclude_abc || (w != r.a && w != r.b && w != r.c); };
    // (higher score, lower index) wins.
    auto better = [&](std::size_t u, std::size_t v) { return score[u] > score[v] || (score[u] == score[v] && u < v); };
    std::size_t best = table.size();
    for (std::size_t w = 0; w < table.size(); ++w)
      if (allowed(w) && (best == table.size() || better(w, best))) best = w;
    std::size_t rank = 0;
    for (std::size_t d : r.d) {
      if (!allowed(d)) continue;
      std::size_t above = 0;
      for (std::size_t w = 0; w < table.size(); ++w)
        if (allowed(w) && better(w, d)) ++above;
      if (rank == 0 || above + 1 < rank) rank = above + 1;
    }
    ev.ranks[e] = rank;
    ev.predictions[e] = best < table.size() ? table.token(best) : std::string();
    hit[e] = rank == 1;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t e = next++; e < data.size(); e = next++) run_one(e);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::max<std::size_t>(threads, 1); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t e = 0; e < test.size(); ++e) {
    auto& cat = ev.per_category[test[e].category];
    ++cat.second;
    if (hit[e]) {
      ++ev.correct;
      ++cat.first;
    }
  }
  ev.accuracy = static_cast<double>(ev.correct) / static_cast<double>(ev.total);
  return ev;
}

nlohmann::json to_json(const AnalogyEval& ev, std::span<const AnalogyExample> test) {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [name, ct] : ev.per_category)
    cats[name] = {{"correct", ct.first},
                  {"total", ct.second},
                  {"accuracy", static_cast<double>(ct.first) / static_cast<double>(ct.second)}};
  nlohmann::json examples = nlohmann::json::array();
  for (std::size_t e = 0; e < test.size() && e < ev.ranks.size(); ++e)
    examples.push_back({{"a", test[e].a},
                        {"b", test[e].b},
                        {"c", test[e].c},
                        {"d", test[e].d_candidates},
                        {"category", test[e].category},
                        {"prediction", ev.predictions[e]},
                        {"rank", ev.ranks[e]}});
  return {{"exclude_abc", ev.exclude_abc}, {"accuracy", ev.accuracy}, {"correct", ev.correct},
          {"total", ev.total},             {"per_category", cats},    {"examples", examples}};
}

AnalogyWorld make_analogy_world(const AnalogyWorldConfig& cfg) {
  if (cfg.words < 4 || cfg.words % 2 != 0) throw Error(Errc::InvalidArgument, "analogy world needs an even word count >= 4");
  if (cfg.relations == 0 || cfg.relations > cfg.words / 2)
    throw Error(Errc::InvalidArgument, "analogy world relation count out of range");
  if (cfg.dim < 2) throw Error(Errc::InvalidArgument, "analogy world needs dim >= 2");
  Rng rng(cfg.seed);
  const CouplingFlow flow(cfg.dim, cfg.flow_layers, cfg.flow_hidden, rng);
  const ParamStore phi = flow.init(rng, cfg.flow_scale);

  std::vector<Vector> offsets(cfg.relations, Vector(cfg.dim));
  for (auto& o : offsets)
    for (double& v : o) v = cfg.offset_scale * normal01(rng);

  const std::size_t n_pairs = cfg.words / 2;
  AnalogyWorld world;
  world.relations.resize(cfg.relations);
  std::vector<std::string> vocab;
  std::vector<Vector> rows;
  for (std::size_t r = 0; r < cfg.relations; ++r) {
    char name[32];
    std::snprintf(name, sizeof name, "rel%02zu", r);
    world.relations[r].category = name;
  }
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const std::size_t r = p % cfg.relations;
    Vector u(cfg.dim);
    for (double& v : u) v = normal01(rng);
    const Vector u2 = add(u, offsets[r]);
    const std::string w1 = "w" + std::to_string(2 * p), w2 = "w" + std::to_string(2 * p + 1);
    vocab.push_back(w1);
    rows.push_back(flow.inverse<double>(phi.values(), u));
    vocab.push_back(w2);
    rows.push_back(flow.inverse<double>(phi.values(), u2));
    world.relations[r].pairs.push_back({w1, {w2}});
  }
  world.table = EmbeddingTable(std::move(vocab), std::move(rows), false);
  return world;
}

}  // namespace abnn
