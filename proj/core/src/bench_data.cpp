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
#include "np/bench_data.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "np/rng.hpp"

namespace np {
namespace {

double parse_double(const std::string& token, std::size_t line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw FormatError("line " + std::to_string(line) + ": '" + token + "' is not a number");
  return value;
}

int parse_int(const std::string& token, std::size_t line) {
  int value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw FormatError("line " + std::to_string(line) + ": '" + token + "' is not an integer label");
  return value;
}

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

// Lower Cholesky factor of the fBm covariance on t_j = j * step, j = 1..steps.
Matrix fbm_factor(double hurst, std::size_t steps, double step) {
  const auto n = static_cast<Eigen::Index>(steps);
  const double two_h = 2.0 * hurst;
  Matrix cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = static_cast<double>(i + 1) * step;
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double t = static_cast<double>(j + 1) * step;
      const double c = 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::fabs(s - t), two_h));
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-12;
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw NumericError("fBm covariance is not positive definite even with jitter");
  }
  return llt.matrixL();
}

void check_hurst(double hurst, std::size_t count) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst parameter must lie in (0, 1)");
  if (count < 2) throw DomainError("fBm path needs at least 2 points");
}

}  // namespace

void Dataset::validate() const {
  if (inputs.cols() == 0) throw DomainError("dataset is empty");
  if (!inputs.allFinite()) throw NumericError("dataset inputs must be finite");
  if (is_classification()) {
    if (labels.size() != size()) throw ShapeError("label count differs from sample count");
    for (int l : labels)
      if (l < 0 || static_cast<std::size_t>(l) >= classes)
        throw DomainError("label " + std::to_string(l) + " outside [0, " + std::to_string(classes) + ")");
  } else {
    if (targets.cols() != inputs.cols() || targets.rows() == 0)
      throw ShapeError("target matrix does not match the inputs");
    if (!targets.allFinite()) throw NumericError("dataset targets must be finite");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.classes = classes;
  out.inputs.resize(inputs.rows(), static_cast<Eigen::Index>(indices.size()));
  if (!is_classification()) out.targets.resize(targets.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(indices[i]);
    const auto dst = static_cast<Eigen::Index>(i);
    out.inputs.col(dst) = inputs.col(src);
    if (is_classification())
      out.labels.push_back(labels[indices[i]]);
    else
      out.targets.col(dst) = targets.col(src);
  }
  return out;
}

double ackley(const Eigen::Ref<const Vector>& x) {
  if (x.size() == 0) throw DomainError("ackley needs n >= 1");
  constexpr double a = 20.0;
  constexpr double b = 0.2;
  const double n = static_cast<double>(x.size());
  double sq = 0.0;
  double cs = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    cs += std::cos(2.0 * std::numbers::pi * x[i]);
  }
  return 20.0 + std::numbers::e - a * std::exp(-b * std::sqrt(sq / n)) - std::exp(cs / n);
}

double rastrigin(const Eigen::Ref<const Vector>& x) {
  if (x.size() == 0) throw DomainError("rastrigin needs n >= 1");
  double sq = 0.0;
  double cs = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    cs += std::cos(2.0 * std::numbers::pi * x[i]);
  }
  return sq + 10.0 * (static_cast<double>(x.size()) - cs);
}

Vector fbm_path(double hurst, std::size_t count, std::uint64_t seed) {
  check_hurst(hurst, count);
  const Matrix factor = fbm_factor(hurst, count - 1, 1.0 / static_cast<double>(count - 1));
  Rng rng(seed);
  Vector z(static_cast<Eigen::Index>(count - 1));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  Vector path = Vector::Zero(static_cast<Eigen::Index>(count));
  path.tail(z.size()) = factor.triangularView<Eigen::Lower>() * z;
  return path;
}

Vector fbm_path_chunked(double hurst, std::size_t count, std::size_t chunk, std::uint64_t seed) {
  check_hurst(hurst, count);
  if (chunk < 1) throw DomainError("fBm chunk must contain at least one step");
  const std::size_t steps = count - 1;
  if (steps <= chunk) return fbm_path(hurst, count, seed);

  const double step = 1.0 / static_cast<double>(steps);
  std::map<std::size_t, Matrix> factors;  // keyed by segment length
  Rng rng(seed);
  Vector path = Vector::Zero(static_cast<Eigen::Index>(count));
  for (std::size_t start = 0; start < steps; start += chunk) {
    const std::size_t len = std::min(chunk, steps - start);
    auto it = factors.find(len);
    if (it == factors.end()) it = factors.emplace(len, fbm_factor(hurst, len, step)).first;
    Vector z(static_cast<Eigen::Index>(len));
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const Vector seg = it->second.triangularView<Eigen::Lower>() * z;
    const double base = path[static_cast<Eigen::Index>(start)];
    path.segment(static_cast<Eigen::Index>(start + 1), static_cast<Eigen::Index>(len)) =
        seg.array() + base;
  }
  return path;
}

std::size_t default_size_cap() {
  if (const char* env = std::getenv("NP_SIZE_CAP")) {
    std::size_t cap = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cap);
    if (ec == std::errc() && ptr == s.data() + s.size() && cap > 0) return cap;
  }
  return 10'000'000;
}

Matrix regular_grid(double a, double b, std::size_t n, std::size_t s, std::size_t size_cap) {
  if (n < 1) throw DomainError("grid dimension must be at least 1");
  if (s < 2) throw DomainError("grid needs s >= 2 points per axis");
  if (!(a < b)) throw DomainError("grid needs a < b");
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > size_cap / s)
      throw DomainError("grid of " + std::to_string(s) + "^" + std::to_string(n) +
                        " points exceeds the size cap of " + std::to_string(size_cap));
    total *= s;
  }
  std::vector<double> axis(s);
  for (std::size_t i = 0; i < s; ++i)
    axis[i] = i + 1 == s ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(s - 1);

  Matrix grid(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(total));
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t c = 0; c < total; ++c) {
    for (std::size_t d = 0; d < n; ++d)
      grid(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(c)) = axis[digit[d]];
    for (std::size_t d = n; d-- > 0;) {
      if (++digit[d] < s) break;
      digit[d] = 0;
    }
  }
  return grid;
}

BenchFunction bench_function_from_string(const std::string& name) {
  if (name == "ackley") return BenchFunction::Ackley;
  if (name == "rastrigin") return BenchFunction::Rastrigin;
  throw DomainError("unknown benchmark function '" + name + "'");
}

std::string to_string(BenchFunction fn) {
  return fn == BenchFunction::Ackley ? "ackley" : "rastrigin";
}

Dataset make_function_dataset(BenchFunction fn, double a, double b, std::size_t n, std::size_t s) {
  Dataset data;
  data.inputs = regular_grid(a, b, n, s);
  data.targets.resize(1, data.inputs.cols());
  for (Eigen::Index c = 0; c < data.inputs.cols(); ++c)
    data.targets(0, c) = fn == BenchFunction::Ackley ? ackley(data.inputs.col(c)) : rastrigin(data.inputs.col(c));
  return data;
}

Dataset make_fbm_dataset(double hurst, std::size_t count, std::size_t chunk, std::uint64_t seed) {
  Dataset data;
  data.inputs = regular_grid(0.0, 1.0, 1, count);
  data.targets = fbm_path_chunked(hurst, count, chunk, seed).transpose();
  return data;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t count,
                                                                            double ratio,
                                                                            std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("split ratio must lie in (0, 1)");
  const auto train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(count)));
  if (train == 0 || train >= count)
    throw DomainError("split ratio " + std::to_string(ratio) + " leaves an empty part for " +
                      std::to_string(count) + " samples");
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());
  std::vector<std::size_t> first(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train));
  std::vector<std::size_t> second(order.begin() + static_cast<std::ptrdiff_t>(train), order.end());
  return {std::move(first), std::move(second)};
}

std::pair<Dataset, Dataset> split(const Dataset& data, double ratio, std::uint64_t seed) {
  auto [train, test] = split_indices(data.size(), ratio, seed);
  return {data.subset(train), data.subset(test)};
}

Dataset gaussian_mixture(std::size_t classes, std::size_t dim, std::size_t per_class,
                         double separation, std::uint64_t seed) {
  if (classes < 2) throw DomainError("mixture needs at least 2 classes");
  if (dim < classes) throw DomainError("mixture simplex needs dim >= classes");
  if (per_class < 1) throw DomainError("mixture needs at least one sample per class");
  if (!(separation >= 0.0)) throw DomainError("separation must be non-negative");
  Rng rng(seed);
  const double scale = separation / std::numbers::sqrt2;
  Dataset data;
  data.classes = classes;
  data.inputs.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(classes * per_class));
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i, ++col) {
      for (Eigen::Index r = 0; r < data.inputs.rows(); ++r)
        data.inputs(r, col) = rng.normal() + (static_cast<std::size_t>(r) == c ? scale : 0.0);
      data.labels.push_back(static_cast<int>(c));
    }
  }
  return data;
}

Dataset read_features(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("line 1: missing 'npf <dim> <classes>' header");
  std::istringstream header(strip_cr(line));
  std::string magic;
  long long dim = -1;
  long long classes = -1;
  std::string extra;
  if (!(header >> magic >> dim >> classes) || magic != "npf" || dim < 1 || classes < 1 || (header >> extra))
    throw FormatError("line 1: expected 'npf <dim> <classes>' header");

  std::vector<std::vector<double>> rows;
  Dataset data;
  data.classes = static_cast<std::size_t>(classes);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream row(line);
    std::vector<std::string> tokens;
    for (std::string tok; row >> tok;) tokens.push_back(tok);
    if (tokens.size() != static_cast<std::size_t>(dim) + 1)
      throw FormatError("line " + std::to_string(lineno) + ": expected label and " +
                        std::to_string(dim) + " features, found " +
                        std::to_string(tokens.size() - 1) + " features");
    const int label = parse_int(tokens[0], lineno);
    if (label < 0 || label >= classes)
      throw FormatError("line " + std::to_string(lineno) + ": label " + std::to_string(label) +
                        " outside [0, " + std::to_string(classes) + ")");
    data.labels.push_back(label);
    std::vector<double> values;
    for (std::size_t i = 1; i < tokens.size(); ++i) values.push_back(parse_double(tokens[i], lineno));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw FormatError("feature file has no samples");
  data.inputs.resize(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (Eigen::Index r = 0; r < dim; ++r)
      data.inputs(r, static_cast<Eigen::Index>(c)) = rows[c][static_cast<std::size_t>(r)];
  return data;
}

Dataset load_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open feature file " + path.string());
  return read_features(in);
}

void write_features(std::ostream& out, const Dataset& data) {
  if (!data.is_classification()) throw DomainError("feature files hold labelled data only");
  out << "npf " << data.input_dim() << ' ' << data.classes << '\n';
  out << std::setprecision(17);
  for (std::size_t c = 0; c < data.size(); ++c) {
    out << data.labels[c];
    for (Eigen::Index r = 0; r < data.inputs.rows(); ++r)
      out << ' ' << data.inputs(r, static_cast<Eigen::Index>(c));
    out << '\n';
  }
}

void save_features(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write feature file " + path.string());
  write_features(out, data);
  if (!out) throw IoError("failed writing " + path.string());
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto n = data.inputs.rows();
  for (Eigen::Index r = 0; r < n; ++r) out << (r ? "," : "") << 'x' << r;
  if (data.is_classification()) {
    out << ",label\n";
  } else if (data.targets.rows() == 1) {
    out << ",y\n";
  } else {
    for (Eigen::Index r = 0; r < data.targets.rows(); ++r) out << ",y" << r;
    out << '\n';
  }
  out << std::setprecision(17);
  for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) {
    for (Eigen::Index r = 0; r < n; ++r) out << (r ? "," : "") << data.inputs(r, c);
    if (data.is_classification())
      out << ',' << data.labels[static_cast<std::size_t>(c)];
    else
      for (Eigen::Index r = 0; r < data.targets.rows(); ++r) out << ',' << data.targets(r, c);
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset " + path.string());
  write_csv(out, data);
  if (!out) throw IoError("failed writing " + path.string());
}

Dataset read_csv(std::istream& in, std::size_t classes) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("line 1: missing CSV header");
  const auto header = split_on(strip_cr(line), ',');
  std::size_t n = 0;
  while (n < header.size() && header[n] == "x" + std::to_string(n)) ++n;
  if (n == 0 || n == header.size()) throw FormatError("line 1: header must be x0,...,x{n-1},y...");
  const bool labelled = header.size() == n + 1 && header[n] == "label";
  const std::size_t m = header.size() - n;

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_on(line, ',');
    if (cells.size() != header.size())
      throw FormatError("line " + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    std::vector<double> values;
    for (std::size_t i = 0; i < (labelled ? n : cells.size()); ++i)
      values.push_back(parse_double(cells[i], lineno));
    if (labelled) labels.push_back(parse_int(cells[n], lineno));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw FormatError("dataset has no rows");

  Dataset data;
  data.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows.size()));
  if (!labelled) data.targets.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    for (std::size_t r = 0; r < n; ++r)
      data.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[c][r];
    if (!labelled)
      for (std::size_t r = 0; r < m; ++r)
        data.targets(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[c][n + r];
  }
  if (labelled) {
    data.labels = std::move(labels);
    int top = *std::max_element(data.labels.begin(), data.labels.end());
    data.classes = classes > 0 ? classes : static_cast<std::size_t>(top + 1);
  }
  data.validate();
  return data;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  std::size_t classes = 0;
  const auto meta_path = std::filesystem::path(path.string() + ".json");
  if (std::filesystem::exists(meta_path)) {
    std::ifstream meta_in(meta_path);
    try {
      const auto meta = nlohmann::json::parse(meta_in);
      classes = meta.value("classes", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("bad dataset metadata " + meta_path.string() + ": " + e.what());
    }
  }
  return read_csv(in, classes);
}

}  // namespace np
