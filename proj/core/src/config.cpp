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

#include "noveval/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "noveval/error.hpp"
#include "noveval/io.hpp"

namespace noveval {

ExperimentConfig ExperimentConfig::base_setting() {
  ExperimentConfig cfg;
  cfg.k_known = 100;
  cfg.n_novel = 100;
  cfg.train_per_known = 500;
  cfg.det_per_class = 100;
  cfg.acc_per_class = 500;
  cfg.balanced = true;
  cfg.budget_grid.clear();
  for (int m = 1000; m <= 10000; m += 1000) cfg.budget_grid.push_back(m);
  return cfg;
}

std::vector<ConfigViolation> validate_config(const ExperimentConfig& cfg) {
  std::vector<ConfigViolation> out;
  auto positive = [&](const char* field, long long v) {
    if (v <= 0) out.push_back({field, "must be positive, got " + std::to_string(v)});
  };
  positive("k_known", cfg.k_known);
  positive("n_novel", cfg.n_novel);
  positive("train_per_known", cfg.train_per_known);
  positive("det_per_class", cfg.det_per_class);
  positive("acc_per_class", cfg.acc_per_class);
  positive("feature_dim", cfg.feature_dim);
  positive("epochs", cfg.epochs);
  positive("batch_size", cfg.batch_size);

  auto real = [&](const char* field, double v, bool strict) {
    if (!std::isfinite(v) || v < 0.0 || (strict && v == 0.0)) {
      out.push_back({field, std::string("must be ") +
                                (strict ? "positive" : "nonnegative") +
                                " and finite, got " + format_double(v)});
    }
  };
  real("learning_rate", cfg.learning_rate, true);
  real("l2_penalty", cfg.l2_penalty, false);
  real("ridge", cfg.ridge, true);
  real("class_separation", cfg.class_separation, false);
  real("within_class_stddev", cfg.within_class_stddev, true);

  if (cfg.budget_grid.empty()) {
    out.push_back({"budget_grid", "must not be empty"});
  }
  const long long capacity =
      cfg.k_known > 0 && cfg.n_novel > 0 && cfg.det_per_class > 0
          ? static_cast<long long>(cfg.num_classes()) * cfg.det_per_class
          : -1;
  for (std::size_t i = 0; i < cfg.budget_grid.size(); ++i) {
    const int m = cfg.budget_grid[i];
    if (m <= 0) {
      out.push_back({"budget_grid", "budget " + std::to_string(m) +
                                        " must be positive"});
    } else if (capacity >= 0 && m > capacity) {
      out.push_back({"budget_grid",
                     "budget " + std::to_string(m) +
                         " exceeds the detection set size " +
                         std::to_string(capacity)});
    }
    if (i > 0 && m <= cfg.budget_grid[i - 1]) {
      out.push_back({"budget_grid", "must be strictly ascending (" +
                                        std::to_string(cfg.budget_grid[i - 1]) +
                                        " then " + std::to_string(m) + ")"});
    }
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) +
                      "': not an integer: '" + std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  try {
    return parse_double(value);
  } catch (const std::invalid_argument&) {
    throw ConfigError("config key '" + std::string(key) +
                      "': not a number: '" + std::string(value) + "'");
  }
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + std::string(key) +
                    "': expected true or false, got '" + std::string(value) + "'");
}

std::vector<int> parse_grid(std::string_view key, std::string_view value) {
  std::vector<int> grid;
  for (std::string_view token : split_csv(value)) {
    grid.push_back(parse_integer<int>(key, trim(token)));
  }
  return grid;
}

std::string format_grid(const std::vector<int>& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(grid[i]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define NOVEVAL_INT_FIELD(name)                                                \
  Field {                                                                      \
    #name,                                                                     \
        [](ExperimentConfig& c, std::string_view v) {                          \
          c.name = parse_integer<decltype(c.name)>(#name, v);                  \
        },                                                                     \
        [](const ExperimentConfig& c) { return std::to_string(c.name); }       \
  }
#define NOVEVAL_REAL_FIELD(name)                                               \
  Field {                                                                      \
    #name,                                                                     \
        [](ExperimentConfig& c, std::string_view v) {                          \
          c.name = parse_real(#name, v);                                       \
        },                                                                     \
        [](const ExperimentConfig& c) { return format_double(c.name); }        \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      NOVEVAL_INT_FIELD(k_known),
      NOVEVAL_INT_FIELD(n_novel),
      NOVEVAL_INT_FIELD(train_per_known),
      NOVEVAL_INT_FIELD(det_per_class),
      NOVEVAL_INT_FIELD(acc_per_class),
      Field{"balanced",
            [](ExperimentConfig& c, std::string_view v) {
              c.balanced = parse_bool("balanced", v);
            },
            [](const ExperimentConfig& c) {
              return std::string(c.balanced ? "true" : "false");
            }},
      Field{"budget_grid",
            [](ExperimentConfig& c, std::string_view v) {
              c.budget_grid = parse_grid("budget_grid", v);
            },
            [](const ExperimentConfig& c) { return format_grid(c.budget_grid); }},
      NOVEVAL_INT_FIELD(seed),
      NOVEVAL_INT_FIELD(feature_dim),
      NOVEVAL_REAL_FIELD(class_separation),
      NOVEVAL_REAL_FIELD(within_class_stddev),
      NOVEVAL_REAL_FIELD(learning_rate),
      NOVEVAL_INT_FIELD(epochs),
      NOVEVAL_INT_FIELD(batch_size),
      NOVEVAL_REAL_FIELD(l2_penalty),
      NOVEVAL_REAL_FIELD(ridge),
  };
  return kFields;
}

#undef NOVEVAL_INT_FIELD
#undef NOVEVAL_REAL_FIELD

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    const Field* field = nullptr;
    for (const Field& f : fields()) {
      if (key == f.key) field = &f;
    }
    if (field == nullptr) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
    field->set(cfg, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += '=';
    out += f.get(cfg);
    out += '\n';
  }
  return out;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return format_config(a) == format_config(b);
}

}  // namespace noveval
