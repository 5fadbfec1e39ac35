// Copyright 2026 The lpmat Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "lpmat/error.hpp"
#include "lpmat/process.hpp"

namespace lpmat {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<std::string_view> allowed,
                                std::string_view where) {
  if (!obj.is_object()) {
    throw ValidationError(std::string(where) + " must be a JSON object", std::string(where));
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) {
      throw ValidationError("unknown key '" + key + "' in " + std::string(where), key);
    }
  }
}

template <class T>
T required(const nlohmann::json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) {
    throw ValidationError("missing key '" + std::string(key) + "' in " + std::string(where), key);
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad value for '" + std::string(key) + "': " + e.what(), key);
  }
}

template <class T>
T optional_or(const nlohmann::json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad value for '" + std::string(key) + "': " + e.what(), key);
  }
}

}  // namespace detail

inline nlohmann::json model_to_json(const CoefficientModel& model) {
  return std::visit(
      detail::overloaded{
          [](const ExplicitList& m) {
            return nlohmann::json{{"kind", "explicit"}, {"coefficients", m.coefficients}};
          },
          [](const MovingAverage& m) { return nlohmann::json{{"kind", "ma"}, {"theta", m.theta}}; },
          [](const AutoRegressive1& m) { return nlohmann::json{{"kind", "ar1"}, {"phi", m.phi}}; },
          [](const Arma& m) {
            return nlohmann::json{{"kind", "arma"}, {"phi", m.phi}, {"theta", m.theta}};
          },
          [](const Farima& m) { return nlohmann::json{{"kind", "farima"}, {"d", m.d}}; },
      },
      model);
}

/// Kinds: white_noise, explicit{coefficients}, ma{theta}, ar1{phi},
/// arma{phi, theta}, farima{d}.
inline CoefficientModel model_from_json(const nlohmann::json& j) {
  const auto kind = detail::required<std::string>(j, "kind", "model");
  CoefficientModel model;
  if (kind == "white_noise") {
    detail::reject_unknown_keys(j, {"kind"}, "model");
    model = white_noise();
  } else if (kind == "explicit") {
    detail::reject_unknown_keys(j, {"kind", "coefficients"}, "model");
    model = ExplicitList{detail::required<std::vector<double>>(j, "coefficients", "model")};
  } else if (kind == "ma") {
    detail::reject_unknown_keys(j, {"kind", "theta"}, "model");
    model = MovingAverage{detail::required<std::vector<double>>(j, "theta", "model")};
  } else if (kind == "ar1") {
    detail::reject_unknown_keys(j, {"kind", "phi"}, "model");
    model = AutoRegressive1{detail::required<double>(j, "phi", "model")};
  } else if (kind == "arma") {
    detail::reject_unknown_keys(j, {"kind", "phi", "theta"}, "model");
    model = Arma{detail::optional_or<std::vector<double>>(j, "phi", {}),
                 detail::optional_or<std::vector<double>>(j, "theta", {})};
  } else if (kind == "farima") {
    detail::reject_unknown_keys(j, {"kind", "d"}, "model");
    model = Farima{detail::required<double>(j, "d", "model")};
  } else {
    throw ValidationError("unknown model kind '" + kind + "'", "kind");
  }
  validate(model);
  return model;
}

inline nlohmann::json innovations_to_json(const InnovationSpec& spec) {
  return {{"dist", std::string(to_string(spec.distribution))}, {"seed", spec.seed}};
}

inline InnovationSpec innovations_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"dist", "seed"}, "innovations");
  InnovationSpec spec;
  spec.distribution = parse_distribution(detail::optional_or<std::string>(j, "dist", "gaussian"));
  spec.seed = detail::optional_or<std::uint64_t>(j, "seed", 0);
  return spec;
}

/// {"model": {...}, "innovations": {"dist": ..., "seed": ...}, "horizon": J}
inline nlohmann::json to_json(const ProcessSpec& spec) {
  nlohmann::json j{{"model", model_to_json(spec.model)},
                   {"innovations", innovations_to_json(spec.innovations)}};
  if (spec.horizon) j["horizon"] = *spec.horizon;
  return j;
}

inline ProcessSpec process_from_json(const nlohmann::json& j) {
  detail::reject_unknown_keys(j, {"model", "innovations", "horizon"}, "process");
  ProcessSpec spec;
  spec.model = model_from_json(detail::required<nlohmann::json>(j, "model", "process"));
  if (j.contains("innovations")) spec.innovations = innovations_from_json(j.at("innovations"));
  if (j.contains("horizon")) spec.horizon = detail::required<std::size_t>(j, "horizon", "process");
  return spec;
}

}  // namespace lpmat
