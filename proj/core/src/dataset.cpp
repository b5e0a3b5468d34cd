#include "delaynet/dataset.hpp"

#include <cstdio>
#include <fstream>

namespace delaynet {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_u32_be(std::ifstream& in, const std::string& path,
                          std::size_t offset) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(in.gcount() == 4, ErrorKind::ingestion,
          path + ": truncated at offset " + std::to_string(offset) +
              " (expected 4 more bytes)");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  require(img.good(), ErrorKind::ingestion, images_path + ": cannot open");
  std::uint32_t magic = read_u32_be(img, images_path, 0);
  require(magic == kImagesMagic, ErrorKind::ingestion,
          images_path + ": bad magic at offset 0 (got " + std::to_string(magic) +
              ", expected " + std::to_string(kImagesMagic) + ")");
  std::uint32_t count = read_u32_be(img, images_path, 4);
  std::uint32_t rows = read_u32_be(img, images_path, 8);
  std::uint32_t cols = read_u32_be(img, images_path, 12);

  std::ifstream lab(labels_path, std::ios::binary);
  require(lab.good(), ErrorKind::ingestion, labels_path + ": cannot open");
  std::uint32_t lmagic = read_u32_be(lab, labels_path, 0);
  require(lmagic == kLabelsMagic, ErrorKind::ingestion,
          labels_path + ": bad magic at offset 0 (got " + std::to_string(lmagic) +
              ", expected " + std::to_string(kLabelsMagic) + ")");
  std::uint32_t lcount = read_u32_be(lab, labels_path, 4);
  require(count == lcount, ErrorKind::ingestion,
          images_path + ": image count " + std::to_string(count) +
              " does not match label count " + std::to_string(lcount) + " in " +
              labels_path);

  Dataset data;
  data.rows = static_cast<int>(rows);
  data.cols = static_cast<int>(cols);
  data.samples.resize(count);
  std::size_t pix = static_cast<std::size_t>(rows) * cols;
  for (std::uint32_t n = 0; n < count; ++n) {
    ImageSample& s = data.samples[n];
    s.pixels.resize(pix);
    img.read(reinterpret_cast<char*>(s.pixels.data()),
             static_cast<std::streamsize>(pix));
    require(static_cast<std::size_t>(img.gcount()) == pix, ErrorKind::ingestion,
            images_path + ": truncated pixel stream at offset " +
                std::to_string(16 + static_cast<std::size_t>(n) * pix +
                               static_cast<std::size_t>(img.gcount())) +
                " (expected " + std::to_string(16 + count * pix) +
                " bytes total)");
    lab.read(reinterpret_cast<char*>(&s.label), 1);
    require(lab.gcount() == 1, ErrorKind::ingestion,
            labels_path + ": truncated label stream at offset " +
                std::to_string(8 + n));
    require(s.label < 10, ErrorKind::ingestion,
            labels_path + ": label " + std::to_string(int(s.label)) +
                " out of range at index " + std::to_string(n));
  }
  return data;
}

void write_idx(const std::string& images_path, const std::string& labels_path,
               const Dataset& data) {
  std::ofstream img(images_path, std::ios::binary | std::ios::trunc);
  require(img.good(), ErrorKind::ingestion, images_path + ": cannot open for write");
  write_u32_be(img, kImagesMagic);
  write_u32_be(img, static_cast<std::uint32_t>(data.samples.size()));
  write_u32_be(img, static_cast<std::uint32_t>(data.rows));
  write_u32_be(img, static_cast<std::uint32_t>(data.cols));
  for (const ImageSample& s : data.samples) {
    img.write(reinterpret_cast<const char*>(s.pixels.data()),
              static_cast<std::streamsize>(s.pixels.size()));
  }
  require(img.good(), ErrorKind::ingestion, images_path + ": write failed");

  std::ofstream lab(labels_path, std::ios::binary | std::ios::trunc);
  require(lab.good(), ErrorKind::ingestion, labels_path + ": cannot open for write");
  write_u32_be(lab, kLabelsMagic);
  write_u32_be(lab, static_cast<std::uint32_t>(data.samples.size()));
  for (const ImageSample& s : data.samples) {
    lab.write(reinterpret_cast<const char*>(&s.label), 1);
  }
  require(lab.good(), ErrorKind::ingestion, labels_path + ": write failed");
}

std::vector<SpikeTrain> encode_threshold(const ImageSample& sample,
                                         const TimeGrid& grid) {
  std::vector<SpikeTrain> trains;
  trains.reserve(sample.pixels.size());
  for (std::uint8_t p : sample.pixels) {
    SpikeTrain t = SpikeTrain::empty(grid);
    if (p > 127) t.counts[0] = 1;
    trains.push_back(std::move(t));
  }
  return trains;
}

SplitBatcher::SplitBatcher(int n_samples, const SplitSpec& spec) {
  require(n_samples > 0, ErrorKind::ingestion, "SplitBatcher: empty dataset");
  require(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0,
          ErrorKind::config, "SplitBatcher: train_fraction out of (0, 1]");
  std::vector<int> order(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(spec.seed);
  rng.shuffle(order);
  int n_train = static_cast<int>(spec.train_fraction * n_samples);
  train_.assign(order.begin(), order.begin() + n_train);
  val_.assign(order.begin() + n_train, order.end());
}

void SplitBatcher::shuffle_train(Rng& rng) { rng.shuffle(train_); }

std::vector<std::span<const int>> SplitBatcher::train_batches(int batch_size) const {
  require(batch_size >= 1, ErrorKind::config, "train_batches: batch_size must be >= 1");
  std::vector<std::span<const int>> out;
  std::size_t n = train_.size();
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(batch_size)) {
    std::size_t len = std::min(static_cast<std::size_t>(batch_size), n - start);
    out.emplace_back(train_.data() + start, len);
  }
  return out;
}

namespace detail {

void active_pixels(const ImageSample& sample, std::vector<int>& out) {
  out.clear();
  for (std::size_t i = 0; i < sample.pixels.size(); ++i) {
    if (sample.pixels[i] > 127) out.push_back(static_cast<int>(i));
  }
}

}  // namespace detail

}  // namespace delaynet
