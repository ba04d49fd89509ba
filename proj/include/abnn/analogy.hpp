#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "abnn/abelian.hpp"
#include "abnn/mlp.hpp"
#include "abnn/param_store.hpp"
#include "abnn/vector.hpp"

namespace abnn {

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  // Throws InvalidArgument on a duplicate token or ragged rows; ZeroVector
  // when normalizing a zero row.
  EmbeddingTable(std::vector<std::string> vocab, std::vector<Vector> rows, bool normalize);

  std::size_t size() const { return vocab_.size(); }
  std::size_t dim() const { return dim_; }
  bool normalized() const { return normalized_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::string& token(std::size_t i) const { return vocab_[i]; }
  const Vector& row(std::size_t i) const { return rows_[i]; }
  std::optional<std::size_t> find(const std::string& token) const;
  // Throws InvalidArgument for an unknown token.
  std::size_t index(const std::string& token) const;

 private:
  std::vector<std::string> vocab_;
  std::vector<Vector> rows_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t dim_ = 0;
  bool normalized_ = false;
};

// word2vec text format: a "count dim" header, then "token v1 ... v_dim" per
// line. Errors carry "<source>:<line>:".
EmbeddingTable parse_embeddings(std::istream& in, bool normalize, const std::string& source = "<input>");
EmbeddingTable load_embeddings(const std::string& path, bool normalize);
void write_embeddings(const std::string& path, const EmbeddingTable& table);

struct RelationPair {
  std::string word1;
  std::vector<std::string> word2;  // accepted alternatives, first is canonical
};

struct Relation {
  std::string category;
  std::vector<RelationPair> pairs;
};

// One pair per line, "word1<TAB>word2[/alt...]"; blank lines are skipped.
Relation parse_relation(std::istream& in, const std::string& category, const std::string& source = "<input>");
// Category is the file stem.
Relation load_relation(const std::string& path);
void write_relation(const std::string& path, const Relation& relation);

struct AnalogyExample {
  std::string a, b, c;
  std::vector<std::string> d_candidates;
  std::string category;
};

struct AnalogySplit {
  std::vector<AnalogyExample> train, val, test;
};

// Per category: drop pairs whose word1 or every word2 alternative is missing
// from the table (missing alternatives are dropped too), shuffle the pairs,
// cut them 60/20/20, and within each part form every ordered combination of
// two distinct pairs (a:b :: c:d).
AnalogySplit split_relations(std::span<const Relation> relations, const EmbeddingTable& table, std::uint64_t seed);

enum class AnalogyKind { Wv, WvMlp, WvAgn };
const char* analogy_kind_name(AnalogyKind kind);
// Accepts wv, wv_mlp, wv_agn.
AnalogyKind parse_analogy_kind(const std::string& name);

struct AnalogyConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 1.6e-4};
  double lr_final_ratio = 1.0;
  std::uint64_t seed = 0;
  std::size_t flow_layers = 5;
  std::size_t flow_hidden = 151;
  std::size_t mlp_hidden = 64;
  // Cap on training examples, drawn without replacement; 0 uses all.
  std::size_t max_train = 0;
};

// f(a, b, c): b - a + c, MLP(b - a + c), or phi^-1(phi(b) - phi(a) + phi(c)).
class AnalogyModel {
 public:
  // The flow starts as the identity; the MLP uses the default fan-in init.
  AnalogyModel(AnalogyKind kind, std::size_t dim, const AnalogyConfig& cfg);

  AnalogyKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  template <class S>
  std::vector<S> apply(std::span<const S> params, std::span<const double> a, std::span<const double> b,
                       std::span<const double> c, Tape* tape = nullptr) const;

  Vector operator()(std::span<const double> a, std::span<const double> b, std::span<const double> c) const {
    return apply<double>(params_.values(), a, b, c);
  }

 private:
  AnalogyKind kind_;
  std::size_t dim_;
  std::variant<std::monostate, Mlp, InvertibleMap> net_;
  ParamStore params_;
};

// JSON file with the kind, dimension, structural config and parameters. The
// flow permutations are re-derived from the stored seed.
void save_analogy_model(const std::string& path, const AnalogyModel& model, const AnalogyConfig& cfg);
AnalogyModel load_analogy_model(const std::string& path, AnalogyConfig* cfg = nullptr);

// Mean -cos(f(a, b, c), d) with d the first candidate. WV has nothing to
// train and returns an empty curve.
std::vector<double> train_analogy(AnalogyModel& model, const EmbeddingTable& table,
                                  std::span<const AnalogyExample> train, const AnalogyConfig& cfg);

struct AnalogyEval {
  bool exclude_abc = false;
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  // 1-based rank of the best accepted answer among the candidates (0 when no
  // accepted answer is a candidate), and the retrieved token.
  std::vector<std::size_t> ranks;
  std::vector<std::string> predictions;
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_category;  // correct, total
};

// Retrieval by cosine over the whole vocabulary, or without a, b, c when
// exclude_abc. Ties go to the lowest vocabulary index.
AnalogyEval evaluate_analogy(const AnalogyModel& model, const EmbeddingTable& table,
                             std::span<const AnalogyExample> test, bool exclude_abc, std::size_t threads = 1);

nlohmann::json to_json(const AnalogyEval& eval, std::span<const AnalogyExample> test);

struct AnalogyWorldConfig {
  std::size_t words = 2000;  // even; half are first words of pairs
  std::size_t dim = 8;
  std::size_t relations = 20;
  std::size_t flow_layers = 2;
  std::size_t flow_hidden = 16;
  double flow_scale = 1.0;   // output scale of the hidden flow's subnets
  double offset_scale = 1.0;  // spread of relation offsets in latent space
  std::uint64_t seed = 0;
};

struct AnalogyWorld {
  EmbeddingTable table;
  std::vector<Relation> relations;
};

// Latent points u ~ N(0, I) paired with u + delta_r; embeddings are
// phi*^-1(latent) for a random coupling flow phi*, so every analogy within a
// relation satisfies d = phi*^-1(phi*(b) - phi*(a) + phi*(c)) exactly.
AnalogyWorld make_analogy_world(const AnalogyWorldConfig& cfg);

}  // namespace abnn
