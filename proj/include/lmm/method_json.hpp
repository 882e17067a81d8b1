#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lmm/method.hpp"

namespace lmm {

// Document shape: {"name": ..., "alpha": [...], "beta": [...]}

inline nlohmann::json method_to_json(const MultistepMethod& m) {
  return nlohmann::json{{"name", m.name()},
                        {"alpha", std::vector<double>(m.alpha().begin(), m.alpha().end())},
                        {"beta", std::vector<double>(m.beta().begin(), m.beta().end())}};
}

inline MultistepMethod method_from_json(const nlohmann::json& doc) {
  try {
    return make_method(doc.at("name").get<std::string>(), doc.at("alpha").get<std::vector<double>>(),
                       doc.at("beta").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed method document: ") + e.what());
  }
}

inline MultistepMethod load_method_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open method file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "cannot parse " + path + ": " + e.what());
  }
  return method_from_json(doc);
}

}  // namespace lmm
