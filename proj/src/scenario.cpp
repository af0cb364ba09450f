#include "ppfe/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ppfe {

namespace {

using nlohmann::json;

Mat to_matrix(const json& j, const std::string& what) {
  if (j.is_number()) return Mat::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ScenarioError(what + " must be a nested array of rows or a number");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ScenarioError(what + " rows must have equal length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Vec to_vector(const json& j, const std::string& what) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array()) throw ScenarioError(what + " must be an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ScenarioError(what + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<double> to_list(const json& j, const std::string& what) {
  const Vec v = to_vector(j, what);
  return {v.data(), v.data() + v.size()};
}

std::size_t to_count(const json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1) {
    throw ScenarioError(what + " must be a positive integer");
  }
  return j.get<std::size_t>();
}

SystemModel parse_model(const json& j) {
  if (!j.contains("A")) throw ScenarioError("model needs A");
  const Mat A = to_matrix(j.at("A"), "A");
  const auto n = A.rows();
  const Mat Q = j.contains("Q") ? to_matrix(j.at("Q"), "Q") : Mat(Mat::Zero(n, n));
  const Vec x0 = j.contains("x0") ? to_vector(j.at("x0"), "x0") : Vec(Vec::Zero(n));
  const Mat P0 = j.contains("P0") ? to_matrix(j.at("P0"), "P0") : Mat(Mat::Identity(n, n));
  const Mat B = j.contains("B") ? to_matrix(j.at("B"), "B") : Mat();
  const Mat D = j.contains("D") ? to_matrix(j.at("D"), "D") : Mat();
  InputSignal u;
  if (j.contains("u")) {
    const json& ju = j.at("u");
    if (ju.is_array() && !ju.empty() && ju.front().is_array()) {
      for (const auto& row : ju) u.sequence.push_back(to_vector(row, "u"));
    } else {
      u.constant = to_vector(ju, "u");
    }
  }
  return make_system(A, Q, x0, P0, B, D, u);
}

SensorModel parse_sensor(const json& j, Eigen::Index state_dim) {
  if (!j.contains("C") || !j.contains("R")) throw ScenarioError("sensor needs C and R");
  const Mat E = j.contains("E") ? to_matrix(j.at("E"), "E") : Mat();
  return make_sensor(to_matrix(j.at("C"), "C"), to_matrix(j.at("R"), "R"), E, state_dim);
}

OutcomeTrace parse_override(const json& j, std::size_t channels, std::size_t horizon) {
  if (j.contains("worst_case")) {
    const json& w = j.at("worst_case");
    const std::size_t ch = to_count(w.at("channel"), "worst_case.channel");
    if (!w.at("k_bar").is_number_integer() || w.at("k_bar").get<std::int64_t>() < 0) {
      throw ScenarioError("worst_case.k_bar must be a non-negative integer");
    }
    return build_worst_case(channels, horizon, ch - 1, w.at("k_bar").get<std::size_t>());
  }
  OutcomeTrace t(channels, horizon);
  for (const char* key : {"gamma", "gamma_e"}) {
    if (!j.contains(key)) throw ScenarioError(std::string("outcome_override needs ") + key);
    const json& rows = j.at(key);
    if (!rows.is_array() || rows.size() != channels) {
      throw ScenarioError(std::string("outcome_override.") + key + " needs one row per channel");
    }
    for (std::size_t i = 0; i < channels; ++i) {
      if (!rows[i].is_array() || rows[i].size() != horizon) {
        throw ScenarioError(std::string("outcome_override.") + key + " rows need horizon entries");
      }
      for (std::size_t k = 0; k < horizon; ++k) {
        const bool v = rows[i][k].get<int>() != 0;
        if (std::string(key) == "gamma") {
          t.set_received(i, k, v);
        } else {
          t.set_intercepted(i, k, v);
        }
      }
    }
  }
  return t;
}

Scenario build(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario must be a JSON object");
  Scenario sc;
  if (j.contains("preset")) sc = scenario_preset(j.at("preset").get<std::string>());
  if (j.contains("name")) sc.name = j.at("name").get<std::string>();

  if (j.contains("model")) {
    const json& m = j.at("model");
    if (m.is_string()) {
      if (m.get<std::string>() != "three-tank") {
        throw ScenarioError("unknown model preset: " + m.get<std::string>());
      }
      PlantPreset p = three_tank_preset();
      sc.model = std::move(p.model);
      sc.sensors = std::move(p.sensors);
    } else {
      sc.model = parse_model(m);
    }
  }
  if (sc.model.A.size() == 0) throw ScenarioError("scenario needs a model or preset");
  if (j.contains("sensors")) {
    sc.sensors.clear();
    for (const auto& s : j.at("sensors")) sc.sensors.push_back(parse_sensor(s, sc.model.state_dim()));
  }
  if (j.contains("channel")) {
    const json& c = j.at("channel");
    sc.channel.authorized = to_list(c.at("gamma"), "channel.gamma");
    sc.channel.wiretap = to_list(c.at("gamma_e"), "channel.gamma_e");
  }
  if (j.contains("codec")) {
    const json& c = j.at("codec");
    if (c.contains("a")) sc.codec.growth = to_list(c.at("a"), "codec.a");
    if (c.contains("delta")) sc.codec.step = to_list(c.at("delta"), "codec.delta");
    if (c.contains("s")) sc.codec.scale = c.at("s").get<double>();
    if (c.contains("transparent")) sc.codec.transparent = c.at("transparent").get<bool>();
  }
  if (j.contains("horizon")) sc.horizon = to_count(j.at("horizon"), "horizon");
  if (j.contains("trials")) sc.trials = to_count(j.at("trials"), "trials");
  if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("eavesdropper_policy")) {
    const auto p = j.at("eavesdropper_policy").get<std::string>();
    if (p == "own-history") {
      sc.policy = EavesdropperPolicy::OwnHistory;
    } else if (p == "overhear-ack") {
      sc.policy = EavesdropperPolicy::OverhearAck;
    } else {
      throw ScenarioError("eavesdropper_policy must be own-history or overhear-ack");
    }
  }
  if (j.contains("legit_decode_noise")) {
    const auto p = j.at("legit_decode_noise").get<std::string>();
    if (p == "bound") {
      sc.legit_noise = DecodeNoise::Bound;
    } else if (p == "realized") {
      sc.legit_noise = DecodeNoise::Realized;
    } else {
      throw ScenarioError("legit_decode_noise must be bound or realized");
    }
  }
  if (j.contains("outcome_override")) {
    sc.outcome_override = parse_override(j.at("outcome_override"), sc.sensors.size(), sc.horizon);
  }
  sc.validate();
  return sc;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  try {
    return build(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("invalid scenario: ") + e.what());
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("invalid scenario: ") + e.what());
  }
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  Scenario sc = parse_scenario(ss.str());
  if (sc.name.empty()) sc.name = path;
  return sc;
}

}  // namespace ppfe
