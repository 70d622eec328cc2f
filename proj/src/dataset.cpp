#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "attackbench/dataset.hpp"
#include "attackbench/errors.hpp"
#include "rng.hpp"

namespace attackbench {

void Dataset::validate() const {
  if (samples.empty()) throw DataError("dataset is empty");
  if (num_classes < 2) throw DataError("dataset needs at least 2 classes");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.x.size() != dim) throw DataError("sample " + std::to_string(i) + " has wrong dimension");
    for (double v : s.x) {
      if (!(v >= 0.0 && v <= 1.0)) throw DataError("sample " + std::to_string(i) + " has a feature outside [0,1]");
    }
    if (s.label < 0 || static_cast<std::size_t>(s.label) >= num_classes) {
      throw DataError("sample " + std::to_string(i) + " has label out of range");
    }
  }
}

namespace {

void min_max_scale(std::vector<Sample>& samples, std::size_t d) {
  for (std::size_t j = 0; j < d; ++j) {
    double lo = samples.front().x[j];
    double hi = lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s.x[j]);
      hi = std::max(hi, s.x[j]);
    }
    for (auto& s : samples) {
      const double v = hi > lo ? (s.x[j] - lo) / (hi - lo) : 0.5;
      s.x[j] = static_cast<double>(static_cast<float>(std::clamp(v, 0.0, 1.0)));
    }
  }
}

}  // namespace

Dataset generate_synthetic(SyntheticKind kind, std::size_t n, std::size_t d, std::uint64_t seed,
                           std::size_t classes) {
  if (n == 0) throw ConfigError("synthetic dataset needs n >= 1");
  if (d == 0) throw ConfigError("synthetic dataset needs d >= 1");
  Rng rng(seed);
  Dataset out;
  out.dim = d;
  out.samples.reserve(n);
  if (kind == SyntheticKind::Blobs) {
    if (classes < 2) throw ConfigError("blobs need at least 2 classes");
    std::vector<Vector> centers(classes, Vector(d));
    for (auto& c : centers) {
      for (double& v : c) v = rng.uniform(-4.0, 4.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = static_cast<Label>(i % classes);
      Vector x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = centers[y][j] + rng.normal();
      out.samples.push_back({std::move(x), y});
    }
    out.num_classes = classes;
  } else {
    if (d < 2) throw ConfigError("moons need d >= 2");
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = static_cast<Label>(i % 2);
      const double t = rng.uniform() * std::numbers::pi;
      Vector x(d);
      if (y == 0) {
        x[0] = std::cos(t);
        x[1] = std::sin(t);
      } else {
        x[0] = 1.0 - std::cos(t);
        x[1] = 0.5 - std::sin(t);
      }
      for (std::size_t j = 0; j < d; ++j) x[j] += 0.1 * rng.normal();
      out.samples.push_back({std::move(x), y});
    }
    out.num_classes = 2;
  }
  min_max_scale(out.samples, d);
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  if (*begin == '\0') return false;
  char* end = nullptr;
  out = std::strtod(begin, &end);
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  Dataset out;
  std::string line;
  std::size_t lineno = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() < 2) throw DataError("line " + std::to_string(lineno) + ": need features and a label");
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = parse_double(fields[i], values[i]);
    if (!numeric) {
      if (out.samples.empty() && out.dim == 0 && lineno == 1) continue;  // header
      throw DataError("line " + std::to_string(lineno) + ": non-numeric field");
    }
    const std::size_t d = fields.size() - 1;
    if (out.samples.empty()) out.dim = d;
    if (d != out.dim) throw DataError("line " + std::to_string(lineno) + ": inconsistent column count");
    const double lab = values.back();
    if (lab != std::floor(lab) || lab < 0 || lab > 1e6) {
      throw DataError("line " + std::to_string(lineno) + ": label must be a non-negative integer");
    }
    Sample s;
    s.x.assign(values.begin(), values.end() - 1);
    s.label = static_cast<Label>(lab);
    max_label = std::max(max_label, s.label);
    out.samples.push_back(std::move(s));
  }
  if (in.bad()) throw IoError("error reading " + path.string());
  out.num_classes = static_cast<std::size_t>(std::max(max_label + 1, 2));
  out.validate();
  return out;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset " + path.string());
  for (std::size_t j = 0; j < data.dim; ++j) out << 'x' << j << ',';
  out << "label\n";
  char buf[32];
  for (const auto& s : data.samples) {
    for (double v : s.x) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    out << s.label << '\n';
  }
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace attackbench
