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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noveval/classifier.hpp"
#include "noveval/detection.hpp"
#include "noveval/types.hpp"

namespace noveval {

// Locale-independent rendering with 17 significant digits;
// parse_double(format_double(x)) == x for every finite x.
std::string format_double(double value);
// Strict decimal parse of the whole token. Throws std::invalid_argument.
double parse_double(std::string_view token);

// Splits a CSV line on commas (no quoting; none of our formats need it).
std::vector<std::string_view> split_csv(std::string_view line);

// Instance CSV: header `id,true_label,f_1,...,f_d`, LF line endings.
void write_instances(std::ostream& out, std::span<const Instance> instances,
                     int feature_dim);
std::vector<Instance> read_instances(std::istream& in, std::string_view name);
void save_instances(const std::filesystem::path& path,
                    std::span<const Instance> instances, int feature_dim);
std::vector<Instance> load_instances(const std::filesystem::path& path);

// d_train.csv, eval_det.csv and eval_acc.csv inside `dir`.
void save_bundle(const std::filesystem::path& dir, const SplitBundle& bundle,
                 int feature_dim);
SplitBundle load_bundle(const std::filesystem::path& dir);

// Text checkpoint: magic line, dimensions, per-logit training counts, then
// row-major weights and the bias, all at 17 significant digits.
void write_model(std::ostream& out, const SoftmaxModel& model);
SoftmaxModel read_model(std::istream& in, std::string_view name);
void save_model(const std::filesystem::path& path, const SoftmaxModel& model);
SoftmaxModel load_model(const std::filesystem::path& path);

// Detection report CSV: `id,assigned_label`. The budget is the number of
// rows assigned to 0.
void write_report(std::ostream& out, const DetectionReport& report);
DetectionReport read_report(std::istream& in, std::string_view name);

// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace noveval
