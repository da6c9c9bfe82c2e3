#include "kerrlearn/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kerrlearn/errors.hpp"

namespace kerr {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size())
      throw ConfigError("config: trailing characters in value for " + key);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse number for key " + key);
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size())
      throw ConfigError("config: trailing characters in value for " + key);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse integer for key " + key);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size())
      throw ConfigError("config: trailing characters in value for " + key);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse integer for key " + key);
  }
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigError("config: empty element in list for key " + key);
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError("config: empty list for key " + key);
  return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : kerr_sweep(default_kerr_sweep()) {}

std::vector<double> ExperimentConfig::default_kerr_sweep() {
  std::vector<double> sweep{0.0};
  constexpr int kLogPoints = 29;
  for (int i = 0; i < kLogPoints; ++i) {
    const double exponent = -2.0 + 5.0 * double(i) / double(kLogPoints - 1);
    sweep.push_back(2.0 * M_PI * std::pow(10.0, exponent));
  }
  return sweep;
}

void ExperimentConfig::validate() const {
  if (n_points < 2) throw ConfigError("config: n_points must be >= 2");
  if (n_points_pert < 2)
    throw ConfigError("config: n_points_pert must be >= 2");
  if (dim < 2) throw ConfigError("config: dim must be >= 2");
  if (omega_mode <= 0) throw ConfigError("config: omega_mode must be > 0");
  if (eta <= 0) throw ConfigError("config: eta must be > 0");
  if (steps < 0) throw ConfigError("config: steps must be >= 0");
  if (fig4_steps < 0) throw ConfigError("config: fig4_steps must be >= 0");
  if (threshold <= 0) throw ConfigError("config: threshold must be > 0");
  if (leakage_tol <= 0) throw ConfigError("config: leakage_tol must be > 0");
  if (kerr_pert < 0) throw ConfigError("config: kerr_pert must be >= 0");
  if (product_dim < 2 || product_dim > 20)
    throw ConfigError("config: product_dim must be in [2, 20]");
  if (product_n < 1 || product_n > 6)
    throw ConfigError("config: product_n must be in [1, 6]");
  if (kerr_sweep.empty()) throw ConfigError("config: kerr_sweep is empty");
  for (std::size_t i = 0; i < kerr_sweep.size(); ++i) {
    if (kerr_sweep[i] < 0)
      throw ConfigError("config: kerr_sweep values must be >= 0");
    if (i > 0 && kerr_sweep[i] <= kerr_sweep[i - 1])
      throw ConfigError("config: kerr_sweep must be strictly ascending");
  }
  if (output_dir.empty()) throw ConfigError("config: output_dir is empty");
  // DataRanges validates positivity on construction.
}

nlohmann::json ExperimentConfig::echo() const {
  return nlohmann::json{
      {"seed", seed},
      {"n_points", n_points},
      {"n_points_pert", n_points_pert},
      {"dim", dim},
      {"omega_mode", omega_mode},
      {"kerr_sweep", kerr_sweep},
      {"eta", eta},
      {"steps", steps},
      {"fig4_steps", fig4_steps},
      {"threshold", threshold},
      {"leakage_tol", leakage_tol},
      {"kerr_pert", kerr_pert},
      {"product_dim", product_dim},
      {"product_n", product_n},
      {"ranges.omega_drive", ranges.omega_drive_max},
      {"ranges.omega_laser", ranges.omega_laser_max},
      {"ranges.time", ranges.time_max},
  };
}

void apply_config_entry(ExperimentConfig& config, const std::string& entry) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos)
    throw ConfigError("config: expected key=value, got: " + entry);
  const std::string key = trim(entry.substr(0, eq));
  const std::string value = trim(entry.substr(eq + 1));
  if (key.empty()) throw ConfigError("config: empty key in: " + entry);

  if (key == "seed") {
    config.seed = parse_u64(key, value);
  } else if (key == "n_points") {
    config.n_points = static_cast<int>(parse_long(key, value));
  } else if (key == "n_points_pert") {
    config.n_points_pert = static_cast<int>(parse_long(key, value));
  } else if (key == "dim") {
    config.dim = static_cast<int>(parse_long(key, value));
  } else if (key == "omega_mode") {
    config.omega_mode = parse_double(key, value);
  } else if (key == "kerr_sweep") {
    config.kerr_sweep = parse_double_list(key, value);
  } else if (key == "eta") {
    config.eta = parse_double(key, value);
  } else if (key == "steps") {
    config.steps = parse_long(key, value);
  } else if (key == "fig4_steps") {
    config.fig4_steps = parse_long(key, value);
  } else if (key == "threshold") {
    config.threshold = parse_double(key, value);
  } else if (key == "leakage_tol") {
    config.leakage_tol = parse_double(key, value);
  } else if (key == "kerr_pert") {
    config.kerr_pert = parse_double(key, value);
  } else if (key == "product_dim") {
    config.product_dim = static_cast<int>(parse_long(key, value));
  } else if (key == "product_n") {
    config.product_n = static_cast<int>(parse_long(key, value));
  } else if (key.rfind("ranges.", 0) == 0) {
    double drive = config.ranges.omega_drive_max;
    double laser = config.ranges.omega_laser_max;
    double time = config.ranges.time_max;
    if (key == "ranges.omega_drive") {
      drive = parse_double(key, value);
    } else if (key == "ranges.omega_laser") {
      laser = parse_double(key, value);
    } else if (key == "ranges.time") {
      time = parse_double(key, value);
    } else {
      throw ConfigError("config: unknown key: " + key);
    }
    try {
      config.ranges = DataRanges(drive, laser, time);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  } else if (key == "output_dir") {
    if (value.empty()) throw ConfigError("config: output_dir is empty");
    config.output_dir = value;
  } else {
    throw ConfigError("config: unknown key: " + key);
  }
}

ExperimentConfig load_config(const std::optional<std::string>& path,
                             const std::vector<std::string>& overrides) {
  ExperimentConfig config;

  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("config: cannot open file: " + *path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      try {
        apply_config_entry(config, line);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " (" + *path + ":" +
                          std::to_string(line_no) + ")");
      }
    }
  }

  for (const std::string& entry : overrides) apply_config_entry(config, entry);

  config.validate();
  return config;
}

}  // namespace kerr
