#pragma once

#include <charconv>
#include <string>

#include <json.hpp>

#include "asymptotics.hpp"
#include "constants.hpp"

namespace momo {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip decimal form; '.' separator, locale-free.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline ordered_json to_json(const EulerValue& e, const std::string& name) {
  return ordered_json{{"name", name},
                      {"value", e.value},
                      {"truncation_norm", e.truncation_norm},
                      {"tail_estimate", e.tail_estimate},
                      {"term_count", e.term_count},
                      {"tail_kind", tail_kind_name(e.tail_kind)}};
}

inline ordered_json to_json(const ConstantsBundle& b) {
  ordered_json j;
  j["h"] = b.h;
  j["x_mode"] = b.x_mode == XMode::rational ? "rational" : "q-power";
  if (b.x_mode == XMode::q_power) j["q"] = b.q;
  j["truncation_norm"] = b.truncation_norm;
  j["constants"] = ordered_json::array({
      to_json(b.A, "A"),
      ordered_json{{"name", "B"}, {"value", b.B}},
      to_json(b.zeta_h, "zeta_h"),
      to_json(b.gamma, "gamma_h"),
      to_json(b.C3, "C3"),
      to_json(b.C3p, "C3_prime"),
      to_json(b.C4, "C4"),
      to_json(b.D3, "D3"),
      to_json(b.D3p, "D3_prime"),
      to_json(b.D4, "D4"),
  });
  return j;
}

inline ordered_json to_json(const ErrorClass& ec) {
  return ordered_json{{"exponent", ec.exponent}, {"log_power", ec.log_power}};
}

inline ordered_json to_json(const Prediction& p) {
  ordered_json terms = ordered_json::array();
  for (auto& [label, v] : p.terms) terms.push_back(ordered_json{{"label", label}, {"value", v}});
  return ordered_json{{"x", p.x},
                      {"h", p.h},
                      {"family", family_name(p.family)},
                      {"moment", moment_name(p.moment)},
                      {"main_value", p.main_value},
                      {"terms", terms},
                      {"error_class", to_json(p.error_class)}};
}

}  // namespace momo
