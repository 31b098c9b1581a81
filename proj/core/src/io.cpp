// Copyright 2026 The noveval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "noveval/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "noveval/error.hpp"

namespace noveval {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view token) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  }
  return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

namespace {

[[noreturn]] void fail(std::string_view name, int line_no, const std::string& what) {
  throw FormatError(std::string(name) + ":" + std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_int_field(std::string_view token, std::string_view name, int line_no,
                  const char* what) {
  T out{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    fail(name, line_no, std::string("bad ") + what + " '" + std::string(token) + "'");
  }
  return out;
}

double parse_real_field(std::string_view token, std::string_view name, int line_no) {
  double v = 0.0;
  try {
    v = parse_double(token);
  } catch (const std::invalid_argument&) {
    fail(name, line_no, "bad number '" + std::string(token) + "'");
  }
  if (!std::isfinite(v)) fail(name, line_no, "non-finite value");
  return v;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

void write_instances(std::ostream& out, std::span<const Instance> instances,
                     int feature_dim) {
  out << "id,true_label";
  for (int j = 1; j <= feature_dim; ++j) out << ",f_" << j;
  out << '\n';
  for (const Instance& inst : instances) {
    if (static_cast<int>(inst.features.size()) != feature_dim) {
      throw std::invalid_argument("instance " + std::to_string(inst.id) +
                                  " has the wrong feature dimension");
    }
    out << inst.id << ',' << inst.true_label;
    for (double v : inst.features) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<Instance> read_instances(std::istream& in, std::string_view name) {
  std::string line;
  if (!next_line(in, line)) fail(name, 1, "missing header");
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "id" || header[1] != "true_label") {
    fail(name, 1, "header must start with id,true_label");
  }
  const std::size_t dim = header.size() - 2;
  for (std::size_t j = 0; j < dim; ++j) {
    if (header[j + 2] != "f_" + std::to_string(j + 1)) {
      fail(name, 1, "expected column f_" + std::to_string(j + 1));
    }
  }
  std::vector<Instance> out;
  int line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != header.size()) {
      fail(name, line_no, "expected " + std::to_string(header.size()) +
                              " columns, got " + std::to_string(cols.size()));
    }
    Instance inst;
    inst.id = parse_int_field<InstanceId>(cols[0], name, line_no, "id");
    inst.true_label = parse_int_field<LabelId>(cols[1], name, line_no, "label");
    if (inst.true_label < 1) fail(name, line_no, "true_label must be >= 1");
    inst.features.reserve(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      inst.features.push_back(parse_real_field(cols[j + 2], name, line_no));
    }
    out.push_back(std::move(inst));
  }
  return out;
}

void save_instances(const std::filesystem::path& path,
                    std::span<const Instance> instances, int feature_dim) {
  std::ostringstream out;
  write_instances(out, instances, feature_dim);
  write_file_atomic(path, out.str());
}

std::vector<Instance> load_instances(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_instances(in, path.string());
}

void save_bundle(const std::filesystem::path& dir, const SplitBundle& bundle,
                 int feature_dim) {
  std::filesystem::create_directories(dir);
  save_instances(dir / "d_train.csv", bundle.d_train, feature_dim);
  save_instances(dir / "eval_det.csv", bundle.eval_det, feature_dim);
  save_instances(dir / "eval_acc.csv", bundle.eval_acc, feature_dim);
}

SplitBundle load_bundle(const std::filesystem::path& dir) {
  SplitBundle bundle;
  bundle.d_train = load_instances(dir / "d_train.csv");
  bundle.eval_det = load_instances(dir / "eval_det.csv");
  bundle.eval_acc = load_instances(dir / "eval_acc.csv");
  return bundle;
}

namespace {
constexpr std::string_view kModelMagic = "noveval-softmax-model v1";
}

void write_model(std::ostream& out, const SoftmaxModel& model) {
  out << kModelMagic << '\n';
  out << model.num_logits() << ' ' << model.feature_dim() << '\n';
  for (int j = 0; j < model.num_logits(); ++j) {
    out << (j ? " " : "") << model.trained_on[j];
  }
  out << '\n';
  for (int j = 0; j < model.num_logits(); ++j) {
    for (int k = 0; k < model.feature_dim(); ++k) {
      out << (k ? " " : "") << format_double(model.weights(j, k));
    }
    out << '\n';
  }
  for (int j = 0; j < model.num_logits(); ++j) {
    out << (j ? " " : "") << format_double(model.bias(j));
  }
  out << '\n';
}

SoftmaxModel read_model(std::istream& in, std::string_view name) {
  std::string line;
  if (!next_line(in, line) || line != kModelMagic) {
    fail(name, 1, "not a noveval model checkpoint");
  }
  auto tokens = [&](int line_no, std::size_t expected) {
    if (!next_line(in, line)) fail(name, line_no, "unexpected end of file");
    std::vector<std::string> out;
    std::istringstream ss(line);
    for (std::string t; ss >> t;) out.push_back(t);
    if (out.size() != expected) {
      fail(name, line_no, "expected " + std::to_string(expected) + " values, got " +
                              std::to_string(out.size()));
    }
    return out;
  };
  const auto dims = tokens(2, 2);
  const int logits = parse_int_field<int>(dims[0], name, 2, "logit count");
  const int dim = parse_int_field<int>(dims[1], name, 2, "feature dimension");
  if (logits < 1 || dim < 1) fail(name, 2, "dimensions must be positive");
  SoftmaxModel model(logits, dim);
  const auto counts = tokens(3, logits);
  for (int j = 0; j < logits; ++j) {
    model.trained_on[j] = parse_int_field<std::int64_t>(counts[j], name, 3, "count");
  }
  for (int j = 0; j < logits; ++j) {
    const auto row = tokens(4 + j, dim);
    for (int k = 0; k < dim; ++k) {
      model.weights(j, k) = parse_real_field(row[k], name, 4 + j);
    }
  }
  const auto bias = tokens(4 + logits, logits);
  for (int j = 0; j < logits; ++j) {
    model.bias(j) = parse_real_field(bias[j], name, 4 + logits);
  }
  return model;
}

void save_model(const std::filesystem::path& path, const SoftmaxModel& model) {
  std::ostringstream out;
  write_model(out, model);
  write_file_atomic(path, out.str());
}

SoftmaxModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_model(in, path.string());
}

void write_report(std::ostream& out, const DetectionReport& report) {
  out << "id,assigned_label\n";
  for (std::size_t i = 0; i < report.instance_ids.size(); ++i) {
    out << report.instance_ids[i] << ',' << report.assignment[i] << '\n';
  }
}

DetectionReport read_report(std::istream& in, std::string_view name) {
  std::string line;
  if (!next_line(in, line) || line != "id,assigned_label") {
    fail(name, 1, "header must be id,assigned_label");
  }
  DetectionReport report;
  int line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != 2) fail(name, line_no, "expected 2 columns");
    report.instance_ids.push_back(parse_int_field<InstanceId>(cols[0], name, line_no, "id"));
    const auto label = parse_int_field<LabelId>(cols[1], name, line_no, "label");
    if (label < 0) fail(name, line_no, "negative label");
    report.assignment.push_back(label);
    if (label == kNovelPseudoLabel) ++report.budget;
  }
  return report;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace noveval
