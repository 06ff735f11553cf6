#pragma once

#include "obp/core/errors.hpp"
#include "obp/persuasion/instance.hpp"
#include "obp/type_reporting/set_function.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace obp {

using Json = nlohmann::json;

// Instance JSON:
//   { "n", "states", "prior", "actions", "types",
//     "receiver_utils": flat [r][k][a][θ],
//     "sender_util": { "kind": "tensor", "data": flat [θ][a_1]…[a_n] }
//                  | { "kind": "set_function", "function": "anonymous"|"table"|"supermodular",
//                      "monotone": bool, "data": [[f_θ values] per state] } }
// Structural problems (missing fields, wrong types) and invariant violations
// both raise InstanceValidationError.

inline const char* set_function_name(SetFunctionKind k) {
  switch (k) {
  case SetFunctionKind::Anonymous: return "anonymous";
  case SetFunctionKind::Supermodular: return "supermodular";
  default: return "table";
  }
}

inline Json instance_to_json(const PersuasionInstance& inst) {
  Json j;
  j["n"] = inst.n;
  j["states"] = inst.d;
  j["prior"] = inst.prior;
  j["actions"] = inst.actions;
  j["types"] = inst.m;
  j["receiver_utils"] = inst.receiver_utils;
  Json s;
  if (inst.sender.kind == SenderUtility::Kind::Tensor) {
    s["kind"] = "tensor";
    s["data"] = inst.sender.tensor;
  } else {
    s["kind"] = "set_function";
    const auto& fs = inst.sender.per_state;
    s["function"] = set_function_name(fs.front().kind());
    bool mono = true;
    Json data = Json::array();
    for (const auto& f : fs) {
      mono = mono && f.flagged_monotone();
      data.push_back(f.values());
    }
    s["monotone"] = mono;
    s["data"] = std::move(data);
  }
  j["sender_util"] = std::move(s);
  return j;
}

inline PersuasionInstance instance_from_json(const Json& j) {
  PersuasionInstance inst;
  try {
    inst.n = j.at("n").get<int>();
    inst.d = j.at("states").get<int>();
    inst.prior = j.at("prior").get<std::vector<double>>();
    inst.actions = j.at("actions").get<int>();
    inst.m = j.value("types", 1);
    inst.receiver_utils = j.at("receiver_utils").get<std::vector<double>>();
    const Json& s = j.at("sender_util");
    const std::string kind = s.at("kind").get<std::string>();
    if (kind == "tensor") {
      inst.sender.kind = SenderUtility::Kind::Tensor;
      inst.sender.tensor = s.at("data").get<std::vector<double>>();
    } else if (kind == "set_function") {
      inst.sender.kind = SenderUtility::Kind::SetFunction;
      const std::string fn = s.value("function", std::string("table"));
      const bool mono = s.value("monotone", false);
      for (const auto& row : s.at("data")) {
        auto v = row.get<std::vector<double>>();
        if (fn == "anonymous")
          inst.sender.per_state.push_back(SetFunction::anonymous(inst.n, std::move(v), mono));
        else if (fn == "supermodular")
          inst.sender.per_state.push_back(SetFunction::supermodular(inst.n, std::move(v), mono));
        else if (fn == "table")
          inst.sender.per_state.push_back(SetFunction::table(inst.n, std::move(v), mono));
        else
          throw InstanceValidationError("instance: unknown set-function kind '" + fn + "'");
      }
    } else {
      throw InstanceValidationError("instance: unknown sender_util kind '" + kind + "'");
    }
  } catch (const Json::exception& e) {
    throw InstanceValidationError(std::string("instance: malformed JSON: ") + e.what());
  }
  inst.validate();
  return inst;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline PersuasionInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InstanceValidationError("cannot open instance file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InstanceValidationError("instance file '" + path + "' is not valid JSON: " + e.what());
  }
  return instance_from_json(j);
}

} // namespace obp
