/* Copyright 2026 The Neural Pathways Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace np::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw DomainError("config key '" + key + "': '" + value + "' is not " + expected);
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) bad_value(key, value, "a non-negative integer");
  return out;
}

std::size_t to_count(const std::string& key, const std::string& value) {
  const auto v = to_unsigned(key, value);
  if (v > std::numeric_limits<std::size_t>::max()) bad_value(key, value, "in range");
  return static_cast<std::size_t>(v);
}

double to_real(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    bad_value(key, value, "a number");
  }
  if (used != value.size()) bad_value(key, value, "a number");
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

// Shortest text that parses back to the same double.
std::string real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> all{
      "lr", "beta1", "beta2", "eps", "batch_size", "stage1_epochs", "stage2_epochs",
      "baseline_epochs", "temperature", "final_lr_ratio", "noise_scale", "insert_count", "loss", "seed",
      "width", "shallow_hidden_layers", "activation", "activation_slope", "train_slopes",
      "jobs", "data", "K", "nu", "budget", "out", "train_ratio", "standardize",
      "prototypes", "seeds"};
  return all;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto& t = train;
  try {
    if (key == "lr") t.adam.lr = to_real(key, value);
    else if (key == "beta1") t.adam.beta1 = to_real(key, value);
    else if (key == "beta2") t.adam.beta2 = to_real(key, value);
    else if (key == "eps") t.adam.eps = to_real(key, value);
    else if (key == "batch_size") t.batch_size = to_count(key, value);
    else if (key == "stage1_epochs") t.stage1_epochs = to_count(key, value);
    else if (key == "stage2_epochs") t.stage2_epochs = to_count(key, value);
    else if (key == "baseline_epochs") t.baseline_epochs = to_count(key, value);
    else if (key == "temperature") t.temperature = to_real(key, value);
    else if (key == "final_lr_ratio") t.final_lr_ratio = to_real(key, value);
    else if (key == "noise_scale") t.noise_scale = to_real(key, value);
    else if (key == "insert_count") t.insert_count = to_count(key, value);
    else if (key == "loss") t.loss = loss_from_string(value);
    else if (key == "seed") t.seed = to_unsigned(key, value);
    else if (key == "width") t.width = to_count(key, value);
    else if (key == "shallow_hidden_layers") t.shallow_hidden_layers = to_count(key, value);
    else if (key == "activation") t.activation = activation_from_string(value);
    else if (key == "activation_slope") t.activation_slope = to_real(key, value);
    else if (key == "train_slopes") t.train_slopes = to_bool(key, value);
    else if (key == "jobs") t.jobs = to_count(key, value);
    else if (key == "data") data = value;
    else if (key == "K") prototypes = to_count(key, value);
    else if (key == "nu") arity = to_count(key, value);
    else if (key == "budget") budget = to_count(key, value);
    else if (key == "out") out = value;
    else if (key == "train_ratio") train_ratio = to_real(key, value);
    else if (key == "standardize") standardize = to_bool(key, value);
    else if (key == "prototypes") {
      if (value != "energy" && value != "kmeans") bad_value(key, value, "'energy' or 'kmeans'");
      prototype_method = value;
    } else if (key == "seeds") seeds = to_count(key, value);
    else throw DomainError("unknown config key '" + key + "'");
  } catch (const DomainError&) {
    throw;
  } catch (const Error& e) {
    throw DomainError("config key '" + key + "': " + e.what());
  }
}

void RunConfig::validate() const {
  train.validate();
  if (prototypes == 0) throw DomainError("K must be at least 1");
  if (arity == 1) throw DomainError("nu must be at least 2");
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw DomainError("train_ratio must lie in (0, 1)");
  if (seeds == 0) throw DomainError("seeds must be at least 1");
  if (out.empty()) throw DomainError("out must not be empty");
}

void apply_config(RunConfig& config, std::istream& in, const std::string& source) {
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw DomainError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw DomainError(where + "missing key");
    try {
      config.set(key, value);
    } catch (const DomainError& e) {
      throw DomainError(where + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  apply_config(config, in, path.string());
}

void write_config(std::ostream& out, const RunConfig& c) {
  const auto& t = c.train;
  out << "lr = " << real(t.adam.lr) << "\nbeta1 = " << real(t.adam.beta1) << "\nbeta2 = " << real(t.adam.beta2)
      << "\neps = " << real(t.adam.eps) << "\nbatch_size = " << t.batch_size
      << "\nstage1_epochs = " << t.stage1_epochs << "\nstage2_epochs = " << t.stage2_epochs
      << "\nbaseline_epochs = " << t.baseline_epochs << "\ntemperature = " << real(t.temperature)
      << "\nfinal_lr_ratio = " << real(t.final_lr_ratio)
      << "\nnoise_scale = " << real(t.noise_scale) << "\ninsert_count = " << t.insert_count
      << "\nloss = " << to_string(t.loss) << "\nseed = " << t.seed << "\nwidth = " << t.width
      << "\nshallow_hidden_layers = " << t.shallow_hidden_layers
      << "\nactivation = " << to_string(t.activation) << "\nactivation_slope = " << real(t.activation_slope)
      << "\ntrain_slopes = " << bool_str(t.train_slopes) << "\njobs = " << t.jobs
      << "\ndata = " << c.data << "\nK = " << c.prototypes << "\nnu = " << c.arity
      << "\nbudget = " << c.budget << "\nout = " << c.out << "\ntrain_ratio = " << real(c.train_ratio)
      << "\nstandardize = " << bool_str(c.standardize) << "\nprototypes = " << c.prototype_method
      << "\nseeds = " << c.seeds << '\n';
}

}  // namespace np::cli
