#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace dsq {

// Key order is preserved so serialized reports are byte-stable.
using Json = nlohmann::ordered_json;

// Outcome of one verification check. `witness` (optional) carries whatever
// makes a failure reproducible: a vector, a subset, an index, a counterexample.
struct Report {
  std::string check;
  bool ok = false;
  Json details = Json::object();
  std::uint64_t seed = 0;
  double tol = 0.0;

  Json to_json() const {
    Json j;
    j["check"] = check;
    j["ok"] = ok;
    if (!details.empty()) j["details"] = details;
    j["seed"] = seed;
    j["tol"] = tol;
    return j;
  }
};

}  // namespace dsq
