#include "delaynet/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace delaynet {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    require(used == v.size(), ErrorKind::config, "config: bad number for " + key);
    return x;
  } catch (const Error&) {
    throw;
  } catch (...) {
    throw Error(ErrorKind::config, "config: bad number for " + key + ": '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  require(ec == std::errc() && p == v.data() + v.size(), ErrorKind::config,
          "config: bad integer for " + key + ": '" + v + "'");
  return x;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(parse_int(key, item)));
  }
  require(!out.empty(), ErrorKind::config, "config: empty list for " + key);
  return out;
}

}  // namespace

void RunConfig::validate_for_train() const {
  require(epochs >= 1, ErrorKind::config, "config: epochs must be >= 1");
  require(batch_size >= 1, ErrorKind::config, "config: batch_size must be >= 1");
  require(lr > 0.0, ErrorKind::config, "config: lr must be positive");
  require(train_fraction > 0.0 && train_fraction < 1.0, ErrorKind::config,
          "config: train_fraction must be in (0, 1)");
  require(train_limit >= 0, ErrorKind::config, "config: train_limit must be >= 0");
  grid.validate();
  srm.validate();
  require(surrogate_alpha > 0.0 && surrogate_beta > 0.0, ErrorKind::config,
          "config: surrogate parameters must be positive");
  require(hidden.size() == 1, ErrorKind::config,
          "config: the built-in weight init covers one hidden layer; deeper "
          "nets need explicit per-layer init via the library API");
  require(hidden[0] >= 1, ErrorKind::config, "config: hidden size must be positive");
  require(!train_images.empty() && !train_labels.empty(), ErrorKind::config,
          "config: train_images and train_labels are required");
  require(std::filesystem::exists(train_images), ErrorKind::config,
          "config: train_images path does not exist: " + train_images);
  require(std::filesystem::exists(train_labels), ErrorKind::config,
          "config: train_labels path does not exist: " + train_labels);
  require(!out_dir.empty(), ErrorKind::config, "config: out_dir is required");
  require(delay_init_max_ms >= 0.0 && delay_init_max_ms <= effective_d_max(),
          ErrorKind::config, "config: delay_init_max out of range");
}

void apply_config_kv(RunConfig& cfg, const std::string& key,
                     const std::string& value) {
  if (key == "dataset") {
    require(value == "mnist" || value == "fashion-mnist", ErrorKind::config,
            "config: dataset must be mnist or fashion-mnist");
    cfg.dataset = value;
  } else if (key == "train_images") cfg.train_images = value;
  else if (key == "train_labels") cfg.train_labels = value;
  else if (key == "test_images") cfg.test_images = value;
  else if (key == "test_labels") cfg.test_labels = value;
  else if (key == "mode") cfg.mode = parse_train_mode(value);
  else if (key == "epochs") cfg.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "lr") cfg.lr = parse_double(key, value);
  else if (key == "batch_size") cfg.batch_size = static_cast<int>(parse_int(key, value));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "surrogate_alpha") cfg.surrogate_alpha = parse_double(key, value);
  else if (key == "surrogate_beta") cfg.surrogate_beta = parse_double(key, value);
  else if (key == "dt_ms") cfg.grid.dt_ms = parse_double(key, value);
  else if (key == "steps") cfg.grid.steps = static_cast<int>(parse_int(key, value));
  else if (key == "threshold_mv") cfg.srm.threshold_mv = parse_double(key, value);
  else if (key == "tau_s_ms") cfg.srm.tau_s_ms = parse_double(key, value);
  else if (key == "tau_r_ms") cfg.srm.tau_r_ms = parse_double(key, value);
  else if (key == "hidden") cfg.hidden = parse_int_list(key, value);
  else if (key == "train_fraction") cfg.train_fraction = parse_double(key, value);
  else if (key == "train_limit") cfg.train_limit = static_cast<int>(parse_int(key, value));
  else if (key == "delay_init_max_ms") cfg.delay_init_max_ms = parse_double(key, value);
  else if (key == "d_max_ms") cfg.d_max_ms = parse_double(key, value);
  else if (key == "train_delay_forward") {
    if (value == "fractional") cfg.train_delay_forward = DelayForward::fractional;
    else if (value == "quantized") cfg.train_delay_forward = DelayForward::quantized;
    else throw Error(ErrorKind::config,
                     "config: train_delay_forward must be fractional or quantized");
  }
  else if (key == "delay_gradient_stencil") {
    if (value == "central") cfg.delay_gradient_stencil = DerivativeStencil::central;
    else if (value == "upwind") cfg.delay_gradient_stencil = DerivativeStencil::upwind;
    else throw Error(ErrorKind::config,
                     "config: delay_gradient_stencil must be central or upwind");
  }
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "resume") cfg.resume = value;
  else {
    throw Error(ErrorKind::config, "config: unknown key '" + key + "'");
  }
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    require(eq != std::string::npos, ErrorKind::config,
            origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    require(!key.empty(), ErrorKind::config,
            origin + ":" + std::to_string(lineno) + ": empty key");
    apply_config_kv(cfg, key, value);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::config, "config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "dataset = " << cfg.dataset << "\n";
  os << "train_images = " << cfg.train_images << "\n";
  os << "train_labels = " << cfg.train_labels << "\n";
  os << "test_images = " << cfg.test_images << "\n";
  os << "test_labels = " << cfg.test_labels << "\n";
  os << "mode = " << to_string(cfg.mode) << "\n";
  os << "epochs = " << cfg.epochs << "\n";
  os << "lr = " << cfg.lr << "\n";
  os << "batch_size = " << cfg.batch_size << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "surrogate_alpha = " << cfg.surrogate_alpha << "\n";
  os << "surrogate_beta = " << cfg.surrogate_beta << "\n";
  os << "dt_ms = " << cfg.grid.dt_ms << "\n";
  os << "steps = " << cfg.grid.steps << "\n";
  os << "threshold_mv = " << cfg.srm.threshold_mv << "\n";
  os << "tau_s_ms = " << cfg.srm.tau_s_ms << "\n";
  os << "tau_r_ms = " << cfg.srm.tau_r_ms << "\n";
  os << "hidden = ";
  for (std::size_t i = 0; i < cfg.hidden.size(); ++i) {
    if (i) os << ",";
    os << cfg.hidden[i];
  }
  os << "\n";
  os << "train_fraction = " << cfg.train_fraction << "\n";
  os << "train_limit = " << cfg.train_limit << "\n";
  os << "delay_init_max_ms = " << cfg.delay_init_max_ms << "\n";
  os << "d_max_ms = " << cfg.d_max_ms << "\n";
  os << "train_delay_forward = "
     << (cfg.train_delay_forward == DelayForward::fractional ? "fractional"
                                                             : "quantized")
     << "\n";
  os << "delay_gradient_stencil = "
     << (cfg.delay_gradient_stencil == DerivativeStencil::central ? "central"
                                                                  : "upwind")
     << "\n";
  os << "out_dir = " << cfg.out_dir << "\n";
  return os.str();
}

}  // namespace delaynet
