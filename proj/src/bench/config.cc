// Copyright 2026 The robustqn Authors
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

#include "robustqn/bench/config.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>

#include "robustqn/bench/generators.h"

namespace robustqn::bench {
namespace {

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value) {
  throw std::invalid_argument("bad value '" + std::string(value) +
                              "' for key '" + std::string(key) + "'");
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  value = Trim(value);
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) BadValue(key, value);
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  value = Trim(value);
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  BadValue(key, value);
}

template <typename T>
std::vector<T> ParseList(std::string_view key, std::string_view value) {
  std::vector<T> out;
  value = Trim(value);
  while (!value.empty()) {
    const auto comma = value.find(',');
    out.push_back(ParseNumber<T>(key, value.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    value = value.substr(comma + 1);
  }
  return out;
}

}  // namespace

void ApplyConfigKey(ExperimentConfig& cfg, std::string_view key,
                    std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  if (key == "model") {
    const auto kind = ParseModelKind(value);
    if (!kind) BadValue(key, value);
    cfg.model = *kind;
  } else if (key == "p") {
    cfg.p = ParseNumber<int>(key, value);
  } else if (key == "m") {
    cfg.m = ParseNumber<int>(key, value);
  } else if (key == "n") {
    cfg.n = ParseNumber<int>(key, value);
  } else if (key == "alpha_byz") {
    cfg.alpha_byz = ParseNumber<double>(key, value);
  } else if (key == "attack_scale") {
    cfg.attack_scale = ParseNumber<double>(key, value);
  } else if (key == "K") {
    cfg.K = ParseNumber<int>(key, value);
  } else if (key == "epsilon_total") {
    cfg.epsilon_total = ParseNumber<double>(key, value);
  } else if (key == "delta_total") {
    cfg.delta_total = ParseNumber<double>(key, value);
  } else if (key == "gamma") {
    cfg.gammas.fill(ParseNumber<double>(key, value));
  } else if (key.size() == 6 && key.substr(0, 5) == "gamma" &&
             key[5] >= '1' && key[5] <= '6') {
    cfg.gammas[static_cast<std::size_t>(key[5] - '1')] =
        ParseNumber<double>(key, value);
  } else if (key == "lambda_s") {
    if (value == "auto") {
      cfg.lambda_s.reset();
    } else {
      cfg.lambda_s = ParseNumber<double>(key, value);
    }
  } else if (key == "reps") {
    cfg.reps = ParseNumber<int>(key, value);
  } else if (key == "master_seed") {
    cfg.master_seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "dp_enabled") {
    cfg.dp_enabled = ParseBool(key, value);
  } else if (key == "variant") {
    if (value == "standard") {
      cfg.variant = Variant::kStandard;
    } else if (value == "unreliable-center") {
      cfg.variant = Variant::kUnreliableCenter;
    } else {
      BadValue(key, value);
    }
  } else if (key == "epsilon_grid") {
    cfg.epsilon_grid = ParseList<double>(key, value);
  } else if (key == "m_grid") {
    cfg.m_grid = ParseList<int>(key, value);
  } else if (key == "images") {
    cfg.images = std::string(value);
  } else if (key == "labels") {
    cfg.labels = std::string(value);
  } else if (key == "test_images") {
    cfg.test_images = std::string(value);
  } else if (key == "test_labels") {
    cfg.test_labels = std::string(value);
  } else if (key == "digit_a") {
    cfg.digit_a = ParseNumber<int>(key, value);
  } else if (key == "digit_b") {
    cfg.digit_b = ParseNumber<int>(key, value);
  } else if (key == "features") {
    cfg.features = ParseList<int>(key, value);
  } else if (key == "train_size") {
    cfg.train_size = ParseNumber<int>(key, value);
  } else if (key == "intercept") {
    cfg.intercept = ParseBool(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) +
                                "'");
  }
}

void LoadConfig(std::istream& in, ExperimentConfig& cfg) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = Trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    try {
      ApplyConfigKey(cfg, text.substr(0, eq), text.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": " + e.what());
    }
  }
}

void LoadConfigFile(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  LoadConfig(in, cfg);
}

void ValidateConfig(const ExperimentConfig& cfg) {
  if (cfg.p < 1) throw std::invalid_argument("p must be >= 1");
  if (cfg.m < 1) throw std::invalid_argument("m must be >= 1");
  if (cfg.n < 2) throw std::invalid_argument("n must be >= 2");
  if (!(cfg.alpha_byz >= 0.0 && cfg.alpha_byz < 0.5)) {
    throw std::invalid_argument("alpha_byz must lie in [0, 0.5)");
  }
  if (cfg.K < 1) throw std::invalid_argument("K must be >= 1");
  if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (cfg.dp_enabled) {
    if (!(cfg.epsilon_total > 0.0)) {
      throw std::invalid_argument("epsilon_total must be > 0 with DP on");
    }
    if (!(cfg.delta_total > 0.0 && cfg.delta_total < 1.0)) {
      throw std::invalid_argument("delta_total must lie in (0, 1)");
    }
  }
  for (double e : cfg.epsilon_grid) {
    if (!(e > 0.0)) throw std::invalid_argument("epsilon_grid must be > 0");
  }
  for (int m : cfg.m_grid) {
    if (m < 1) throw std::invalid_argument("m_grid entries must be >= 1");
  }
  for (double g : cfg.gammas) {
    if (!(g > 0.0)) throw std::invalid_argument("gammas must be > 0");
  }
  if (cfg.lambda_s && !(*cfg.lambda_s > 0.0)) {
    throw std::invalid_argument("lambda_s must be > 0");
  }
}

int PrivacyRounds(const ExperimentConfig& cfg) {
  return cfg.variant == Variant::kUnreliableCenter ? 6 : 5;
}

PrivacyParams RoundPrivacy(const ExperimentConfig& cfg) {
  const double rounds = PrivacyRounds(cfg);
  const double lambda_s = cfg.lambda_s
                              ? *cfg.lambda_s
                              : PopulationHessianMinEigenvalue(cfg.model, cfg.p);
  PrivacyParams params = MakePrivacyParams(
      cfg.epsilon_total / rounds, cfg.delta_total / rounds, 1.0, lambda_s);
  params.gammas = cfg.gammas;
  ValidatePrivacyParams(params);
  return params;
}

}  // namespace robustqn::bench
