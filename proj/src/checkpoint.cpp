#include "abnn/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "abnn/error.hpp"

namespace abnn {

namespace {

constexpr char kMagic[4] = {'A', 'B', 'N', 'N'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8;

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf.insert(buf.end(), b, b + n);
  }
  std::vector<std::uint8_t> buf;

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  bool done() const { return pos_ == n_; }

 private:
  std::uint64_t get(int n) {
    if (pos_ + static_cast<std::size_t>(n) > n_) throw Error(Errc::Parse, "checkpoint payload is malformed");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* p, std::size_t n) {
  return static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), p, static_cast<uInt>(n)));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

// Structural sizes are stored as u32; refuse anything absurd before
// allocating.
std::size_t bounded(std::uint32_t v, std::uint32_t max, const char* what) {
  if (v == 0 || v > max) throw Error(Errc::Parse, std::string("checkpoint field out of range: ") + what);
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const Model& model) {
  Writer payload;
  payload.u32(static_cast<std::uint32_t>(model.dim()));
  if (const auto* ds = model.deepsets()) {
    payload.u32(static_cast<std::uint32_t>(ds->shape().layers));
    payload.u32(static_cast<std::uint32_t>(ds->shape().hidden));
    payload.u32(static_cast<std::uint32_t>(ds->shape().middle));
  } else if (const auto* net = model.abelian()->phi().monotonic()) {
    payload.u32(static_cast<std::uint32_t>(net->groups()));
    payload.u32(static_cast<std::uint32_t>(net->units()));
  } else {
    const auto* flow = model.abelian()->phi().coupling();
    payload.u32(static_cast<std::uint32_t>(flow->layer_count()));
    payload.u32(static_cast<std::uint32_t>(flow->hidden()));
    payload.f64(flow->clamp_bound());
    for (std::size_t l = 0; l < flow->layer_count(); ++l)
      for (std::size_t idx : flow->layer(l).permutation) payload.u32(static_cast<std::uint32_t>(idx));
  }
  const auto params = model.params().values();
  payload.u64(params.size());
  for (double v : params) payload.f64(v);

  Writer out;
  out.bytes(kMagic, 4);
  out.u32(kCheckpointVersion);
  out.u32(static_cast<std::uint32_t>(model.kind()));
  out.u64(payload.buf.size());
  out.bytes(payload.buf.data(), payload.buf.size());
  out.u32(crc_of(out.buf.data(), out.buf.size()));
  return out.buf;
}

Model deserialize_model(const std::vector<std::uint8_t>& bytes, std::optional<ModelKind> expected) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    if (bytes.size() < 4) throw Error(Errc::Truncated, "checkpoint truncated");
    throw Error(Errc::BadMagic, "not a checkpoint (bad magic)");
  }
  if (bytes.size() < kHeaderBytes + 4) throw Error(Errc::Truncated, "checkpoint truncated");
  Reader header(bytes.data() + 4, kHeaderBytes - 4);
  const std::uint32_t version = header.u32();
  const std::uint32_t kind_tag = header.u32();
  const std::uint64_t payload_size = header.u64();
  if (version != kCheckpointVersion)
    throw Error(Errc::VersionMismatch, "checkpoint version " + std::to_string(version) + " is not supported");
  if (payload_size > bytes.size() - kHeaderBytes - 4) throw Error(Errc::Truncated, "checkpoint truncated");
  const std::size_t body = kHeaderBytes + payload_size;
  if (bytes.size() != body + 4 || read_u32(bytes.data() + body) != crc_of(bytes.data(), body))
    throw Error(Errc::ChecksumMismatch, "checkpoint checksum mismatch");

  if (kind_tag < 1 || kind_tag > 3) throw Error(Errc::Parse, "unknown model kind tag");
  const auto kind = static_cast<ModelKind>(kind_tag);
  if (expected && *expected != kind)
    throw Error(Errc::ModelKindMismatch, std::string("model kind mismatch: checkpoint holds ") +
                                             model_kind_name(kind) + ", expected " + model_kind_name(*expected));

  Reader r(bytes.data() + kHeaderBytes, payload_size);
  const std::size_t dim = bounded(r.u32(), 1u << 16, "dim");
  auto read_params = [&](std::size_t count) {
    if (r.u64() != count) throw Error(Errc::Parse, "checkpoint parameter count does not match structure");
    std::vector<double> v(count);
    for (double& x : v) x = r.f64();
    if (!r.done()) throw Error(Errc::Parse, "checkpoint has trailing payload bytes");
    return ParamStore(std::move(v));
  };

  if (kind == ModelKind::DeepSets) {
    DeepSetsShape shape;
    shape.dim = dim;
    shape.layers = bounded(r.u32(), 64, "layers");
    shape.hidden = bounded(r.u32(), 1u << 16, "hidden");
    shape.middle = bounded(r.u32(), 1u << 16, "middle");
    return Model(DeepSets(shape, read_params(DeepSets::param_count(shape))));
  }
  const Combiner c = kind == ModelKind::Agn ? Combiner::Sum : Combiner::Product;
  if (dim == 1) {
    const std::size_t groups = bounded(r.u32(), 1u << 12, "groups");
    const std::size_t units = bounded(r.u32(), 1u << 12, "units");
    MonotonicNet net(groups, units);
    ParamStore p = read_params(net.param_count());
    return Model(AbelianOp(InvertibleMap(std::move(net)), std::move(p), c));
  }
  const std::size_t layers = bounded(r.u32(), 1024, "layers");
  const std::size_t hidden = bounded(r.u32(), 1u << 16, "hidden");
  const double clamp = r.f64();
  std::vector<std::vector<std::size_t>> perms(layers, std::vector<std::size_t>(dim));
  for (auto& perm : perms)
    for (auto& idx : perm) idx = r.u32();
  try {
    CouplingFlow flow(dim, hidden, std::move(perms), clamp);
    ParamStore p = read_params(flow.param_count());
    return Model(AbelianOp(InvertibleMap(std::move(flow)), std::move(p), c));
  } catch (const Error& e) {
    if (e.code() == Errc::Parse) throw;
    throw Error(Errc::Parse, std::string("checkpoint structure invalid: ") + e.what());
  }
}

void save_checkpoint(const Model& model, const std::string& path) {
  const auto bytes = serialize_model(model);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(Errc::Io, "failed writing '" + path + "'");
}

Model load_checkpoint(const std::string& path, std::optional<ModelKind> expected) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open '" + path + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes, expected);
}

}  // namespace abnn
