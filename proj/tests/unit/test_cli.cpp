// End-to-end checks of the command-line surface: subcommands, flag
// overrides and the documented exit codes (0 success, 1 usage/config,
// 2 ingestion, 3 numeric abort).
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "delaynet/dataset.hpp"
#include "doctest.h"

#ifndef DELAYNET_CLI_PATH
#define DELAYNET_CLI_PATH "delaynet"
#endif

using namespace delaynet;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("delaynet_cli_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(DELAYNET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_tiny_dataset(const std::string& images, const std::string& labels) {
  std::mt19937 gen(151);
  Dataset d;
  d.rows = 4;
  d.cols = 4;
  for (int i = 0; i < 48; ++i) {
    ImageSample s;
    s.label = static_cast<std::uint8_t>(i % 10);
    s.pixels.assign(16, 0);
    s.pixels[static_cast<std::size_t>(s.label % 16)] = 255;
    s.pixels[static_cast<std::size_t>((s.label * 5 + 3) % 16)] = 200;
    d.samples.push_back(std::move(s));
  }
  write_idx(images, labels, d);
}

}  // namespace

TEST_CASE("cli: usage errors exit 1, ingestion errors exit 2, success exits 0") {
  TempDir dir;
  CHECK(run_cli("") == 1);
  CHECK(run_cli("definitely-not-a-subcommand") == 1);
  CHECK(run_cli("train --no-such-flag 1") == 1);

  // train with nonexistent data paths: config validation, exit 1.
  CHECK(run_cli("train --images " + dir.file("no.idx") + " --labels " +
                dir.file("no2.idx") + " --out " + dir.file("out")) == 1);

  // eval on files that are not IDX / checkpoints: ingestion, exit 2.
  {
    std::ofstream junk(dir.file("junk.bin"), std::ios::binary);
    junk << "garbage bytes, not a checkpoint";
  }
  CHECK(run_cli("eval --checkpoint " + dir.file("junk.bin") + " --images " +
                dir.file("junk.bin") + " --labels " + dir.file("junk.bin")) == 2);
  CHECK(run_cli("inspect --checkpoint " + dir.file("junk.bin")) == 2);

  // A complete train -> eval -> inspect round trip exits 0 everywhere.
  write_tiny_dataset(dir.file("img.idx"), dir.file("lab.idx"));
  {
    std::ofstream cfg(dir.file("run.cfg"));
    cfg << "train_images = " << dir.file("img.idx") << "\n";
    cfg << "train_labels = " << dir.file("lab.idx") << "\n";
    cfg << "hidden = 8\n";
    cfg << "epochs = 2\n";
    cfg << "batch_size = 8\n";
    cfg << "seed = 3\n";
  }
  CHECK(run_cli("train --config " + dir.file("run.cfg") + " --out " +
                dir.file("out") + " --epochs 1") == 0);
  CHECK(std::filesystem::exists(dir.file("out") + "/metrics.csv"));
  CHECK(std::filesystem::exists(dir.file("out") + "/best.ckpt"));
  CHECK(run_cli("eval --checkpoint " + dir.file("out") + "/best.ckpt --images " +
                dir.file("img.idx") + " --labels " + dir.file("lab.idx")) == 0);
  CHECK(run_cli("inspect --checkpoint " + dir.file("out") + "/best.ckpt") == 0);

  // Corrupt IDX data surfaces as ingestion (exit 2) from train as well.
  {
    std::ofstream bad(dir.file("bad.idx"), std::ios::binary);
    bad << "\x00\x00\x08\x01garbo";
  }
  CHECK(run_cli("train --images " + dir.file("bad.idx") + " --labels " +
                dir.file("lab.idx") + " --out " + dir.file("out2")) == 2);
}
