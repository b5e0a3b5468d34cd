#include "delaynet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace delaynet {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts need byte swaps");

constexpr char kMagic[8] = {'D', 'N', 'E', 'T', 'C', 'K', 'P', 'T'};

class Writer {
 public:
  explicit Writer(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    require(out_.good(), ErrorKind::ingestion, path + ": cannot open for write");
  }
  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void u64(std::uint64_t v) { bytes(&v, 8); }
  void f64(double v) { bytes(&v, 8); }
  void f64_array(std::span<const double> a) {
    u64(a.size());
    bytes(a.data(), a.size() * sizeof(double));
  }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void finish() {
    out_.flush();
    require(out_.good(), ErrorKind::ingestion, path_ + ": write failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    require(in_.good(), ErrorKind::ingestion, path + ": cannot open");
  }
  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    require(static_cast<std::size_t>(in_.gcount()) == n, ErrorKind::ingestion,
            path_ + ": truncated checkpoint");
  }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
  double f64() { double v; bytes(&v, 8); return v; }
  std::vector<double> f64_array(std::uint64_t max_len) {
    std::uint64_t n = u64();
    require(n <= max_len, ErrorKind::ingestion, path_ + ": implausible array length");
    std::vector<double> a(n);
    bytes(a.data(), n * sizeof(double));
    return a;
  }
  std::string str(std::uint64_t max_len = 1 << 20) {
    std::uint64_t n = u64();
    require(n <= max_len, ErrorKind::ingestion, path_ + ": implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

constexpr std::uint64_t kMaxArray = 1ull << 32;

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::string tmp = path + ".tmp";
  {
    Writer w(tmp);
    w.bytes(kMagic, 8);
    w.u32(Checkpoint::kVersion);
    w.str(ck.config_text);
    w.u32(static_cast<std::uint32_t>(ck.layers.size()));
    for (const LayerParams& layer : ck.layers) {
      w.u32(static_cast<std::uint32_t>(layer.post()));
      w.u32(static_cast<std::uint32_t>(layer.pre()));
      w.u32((layer.weights_frozen ? 1u : 0u) | (layer.weights_ternary ? 2u : 0u));
      w.f64(layer.delays.d_max_ms());
      w.f64_array(layer.weights.flat());
      w.f64_array(layer.delays.values());
    }
    w.f64(ck.adam.lr);
    w.f64(ck.adam.beta1);
    w.f64(ck.adam.beta2);
    w.f64(ck.adam.eps_hat);
    w.u64(ck.adam.t);
    w.u32(static_cast<std::uint32_t>(ck.adam.m.size()));
    for (std::size_t s = 0; s < ck.adam.m.size(); ++s) {
      w.f64_array(ck.adam.m[s]);
      w.f64_array(ck.adam.v[s]);
    }
    w.u32(static_cast<std::uint32_t>(ck.epoch));
    w.f64(ck.val_acc);
    w.f64(ck.best_val_acc);
    w.u32(static_cast<std::uint32_t>(ck.best_epoch));
    w.str(ck.rng_state);
    w.finish();
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, 8);
  require(std::memcmp(magic, kMagic, 8) == 0, ErrorKind::ingestion,
          path + ": not a delaynet checkpoint (bad magic)");
  std::uint32_t version = r.u32();
  require(version == Checkpoint::kVersion, ErrorKind::ingestion,
          path + ": incompatible checkpoint format version " +
              std::to_string(version) + " (this build reads version " +
              std::to_string(Checkpoint::kVersion) + ")");

  Checkpoint ck;
  ck.config_text = r.str();
  RunConfig cfg = parse_config_text(ck.config_text, path);

  std::uint32_t n_layers = r.u32();
  require(n_layers >= 1 && n_layers <= 64, ErrorKind::ingestion,
          path + ": implausible layer count");
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    std::uint32_t post = r.u32();
    std::uint32_t pre = r.u32();
    std::uint32_t flags = r.u32();
    double d_max = r.f64();
    std::vector<double> w = r.f64_array(kMaxArray);
    std::vector<double> d = r.f64_array(kMaxArray);
    std::size_t expect = static_cast<std::size_t>(post) * pre;
    require(w.size() == expect && d.size() == expect, ErrorKind::ingestion,
            path + ": layer array sizes do not match declared shape");
    LayerParams layer{Matrix(static_cast<int>(post), static_cast<int>(pre)),
                      DelayMatrix(static_cast<int>(post), static_cast<int>(pre),
                                  d_max, cfg.grid),
                      (flags & 1u) != 0, (flags & 2u) != 0};
    std::copy(w.begin(), w.end(), layer.weights.flat().begin());
    std::copy(d.begin(), d.end(), layer.delays.mutable_values().begin());
    layer.delays.clamp_and_requantize();
    ck.layers.push_back(std::move(layer));
  }

  ck.adam.lr = r.f64();
  ck.adam.beta1 = r.f64();
  ck.adam.beta2 = r.f64();
  ck.adam.eps_hat = r.f64();
  ck.adam.t = r.u64();
  std::uint32_t n_slices = r.u32();
  require(n_slices <= 128, ErrorKind::ingestion, path + ": implausible slice count");
  for (std::uint32_t s = 0; s < n_slices; ++s) {
    ck.adam.m.push_back(r.f64_array(kMaxArray));
    ck.adam.v.push_back(r.f64_array(kMaxArray));
  }
  ck.epoch = static_cast<int>(r.u32());
  ck.val_acc = r.f64();
  ck.best_val_acc = r.f64();
  ck.best_epoch = static_cast<int>(r.u32());
  ck.rng_state = r.str();
  return ck;
}

}  // namespace delaynet
