// Copyright 2026 The tampmilp Authors
// SPDX-License-Identifier: Apache-2.0

#include "tampmilp/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tamp {

using nlohmann::json;

namespace {

const std::string kInfeasible = "infeasible scenario: ";

constexpr const char* kSchema = "tamp-scenario/1";

Vec3 vec(const json& j, const char* key) {
  if (!j.contains(key)) throw ScenarioError(std::string("missing field '") + key + "'");
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 3) {
    throw ScenarioError(std::string("field '") + key + "' must be an array of 3 numbers");
  }
  Vec3 v;
  for (std::size_t k = 0; k < 3; ++k) {
    if (!a[k].is_number()) throw ScenarioError(std::string("field '") + key + "' is not numeric");
    v[k] = a[k].get<double>();
  }
  return v;
}

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

bool finite_box(const Aabb& b) { return b.center.finite() && b.width.finite(); }

bool nonneg(const Vec3& w) { return w.x >= 0 && w.y >= 0 && w.z >= 0; }

std::string name(const char* kind, std::size_t index) {
  return std::string(kind) + " " + std::to_string(index);
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::Hard: return "hard";
    case Variant::HardSoft: return "hard_soft";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "baseline") return Variant::Baseline;
  if (s == "hard") return Variant::Hard;
  if (s == "hard_soft" || s == "hard+soft") return Variant::HardSoft;
  throw ScenarioError("unknown variant '" + s + "' (expected baseline, hard or hard_soft)");
}

void validate(const Params& p) {
  if (!(p.dt > 0.0) || !std::isfinite(p.dt)) throw ScenarioError("time step must be positive");
  if (p.steps < 1) throw ScenarioError("step count must be at least 1");
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) throw ScenarioError("alpha must be positive");
}

void validate(const Scenario& s) {
  if (!finite_box(s.workspace) || !nonneg(s.workspace.width)) {
    throw ScenarioError("workspace must be a finite box with non-negative width");
  }
  if (s.end_effectors.empty()) throw ScenarioError("at least one end-effector is required");
  if (s.deliveries.empty()) throw ScenarioError("at least one delivery is required");
  constexpr double kTol = 1e-9;

  for (std::size_t k = 0; k < s.obstacles.size(); ++k) {
    if (!finite_box(s.obstacles[k]) || !nonneg(s.obstacles[k].width)) {
      throw ScenarioError(name("obstacle", k) + " must be a finite box with non-negative width");
    }
  }
  for (std::size_t i = 0; i < s.end_effectors.size(); ++i) {
    const EndEffector& e = s.end_effectors[i];
    const std::string who = name("end-effector", i);
    if (!e.width.finite() || !e.initial.finite() || !e.max_speed.finite() || !e.margin.finite()) {
      throw ScenarioError(who + " has non-finite values");
    }
    if (!nonneg(e.width) || !nonneg(e.max_speed)) {
      throw ScenarioError(who + " has a negative width or speed bound");
    }
    if (e.max_speed.norm1() <= 0.0) throw ScenarioError(who + " has a zero speed bound");
    if (!s.workspace.contains(e.initial, kTol)) {
      throw ScenarioError(who + " initial position is outside the workspace");
    }
    for (std::size_t k = 0; k < s.obstacles.size(); ++k) {
      if (inflate(s.obstacles[k], e.width).interior_contains(e.initial)) {
        throw ScenarioError(
            kInfeasible + who + " initial position collides with " + name("obstacle", k));
      }
    }
    for (std::size_t j = 0; j < s.deliveries.size(); ++j) {
      const Aabb d{s.deliveries[j].initial, s.deliveries[j].width};
      if (inflate(d, e.width).interior_contains(e.initial)) {
        throw ScenarioError(
            kInfeasible + who + " initial position collides with " + name("delivery", j));
      }
    }
  }
  for (std::size_t j = 0; j < s.deliveries.size(); ++j) {
    const Delivery& d = s.deliveries[j];
    const std::string who = name("delivery", j);
    if (!d.width.finite() || !d.initial.finite() || !d.target.finite()) {
      throw ScenarioError(who + " has non-finite values");
    }
    if (!nonneg(d.width)) throw ScenarioError(who + " has a negative width");
    for (const auto& [p, what] : {std::pair{d.initial, "initial"}, std::pair{d.target, "target"}}) {
      if (!s.workspace.contains(p, kTol)) {
        throw ScenarioError(who + " " + what + " position is outside the workspace");
      }
      for (std::size_t k = 0; k < s.obstacles.size(); ++k) {
        if (inflate(s.obstacles[k], d.width).interior_contains(p)) {
          throw ScenarioError(
              kInfeasible + who + " " + what + " position collides with " + name("obstacle", k));
        }
      }
    }
    for (std::size_t l = 0; l < j; ++l) {
      const Delivery& o = s.deliveries[l];
      if (interiors_overlap({d.initial, d.width}, {o.initial, o.width})) {
        throw ScenarioError(
            kInfeasible + who + " initial position overlaps " + name("delivery", l));
      }
      if (interiors_overlap({d.target, d.width}, {o.target, o.width})) {
        throw ScenarioError(kInfeasible + who + " target position overlaps " + name("delivery", l));
      }
    }
  }
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  const std::string schema = j.value("schema", "");
  if (schema != kSchema) {
    throw ScenarioError("unsupported schema '" + schema + "' (expected " + kSchema + ")");
  }
  Scenario s;
  s.name = j.value("name", "");
  if (!j.contains("workspace")) throw ScenarioError("missing field 'workspace'");
  s.workspace = {vec(j["workspace"], "center_m"), vec(j["workspace"], "width_m")};
  for (const json& e : j.value("end_effectors", json::array())) {
    EndEffector ee;
    ee.width = vec(e, "width_m");
    ee.initial = vec(e, "initial_m");
    ee.max_speed = vec(e, "max_speed_mps");
    ee.margin = e.contains("margin_m") ? vec(e, "margin_m") : Vec3{};
    s.end_effectors.push_back(ee);
  }
  for (const json& d : j.value("deliveries", json::array())) {
    s.deliveries.push_back({vec(d, "width_m"), vec(d, "initial_m"), vec(d, "target_m")});
  }
  for (const json& o : j.value("obstacles", json::array())) {
    s.obstacles.push_back({vec(o, "center_m"), vec(o, "width_m")});
  }
  return s;
}

std::optional<Params> params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("params")) return std::nullopt;
  const json& p = j["params"];
  Params out;
  try {
    out.dt = p.value("dt_s", out.dt);
    out.steps = p.value("steps", out.steps);
    out.alpha = p.value("alpha", out.alpha);
    if (p.contains("variant")) out.variant = parse_variant(p["variant"].get<std::string>());
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("bad params: ") + e.what());
  }
  return out;
}

std::string scenario_to_json(const Scenario& s, const std::optional<Params>& params) {
  json j;
  j["schema"] = kSchema;
  j["name"] = s.name;
  j["workspace"] = {{"center_m", to_json(s.workspace.center)}, {"width_m", to_json(s.workspace.width)}};
  j["end_effectors"] = json::array();
  for (const EndEffector& e : s.end_effectors) {
    j["end_effectors"].push_back({{"width_m", to_json(e.width)},
                                  {"initial_m", to_json(e.initial)},
                                  {"max_speed_mps", to_json(e.max_speed)},
                                  {"margin_m", to_json(e.margin)}});
  }
  j["deliveries"] = json::array();
  for (const Delivery& d : s.deliveries) {
    j["deliveries"].push_back({{"width_m", to_json(d.width)},
                               {"initial_m", to_json(d.initial)},
                               {"target_m", to_json(d.target)}});
  }
  j["obstacles"] = json::array();
  for (const Aabb& o : s.obstacles) {
    j["obstacles"].push_back({{"center_m", to_json(o.center)}, {"width_m", to_json(o.width)}});
  }
  if (params) {
    j["params"] = {{"dt_s", params->dt},
                   {"steps", params->steps},
                   {"alpha", params->alpha},
                   {"variant", to_string(params->variant)}};
  }
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace tamp
