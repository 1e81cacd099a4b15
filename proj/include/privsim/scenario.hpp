#ifndef PRIVSIM_SCENARIO_HPP
#define PRIVSIM_SCENARIO_HPP

#include <stdexcept>
#include <string>

#include "privsim/scene.hpp"

namespace privsim {

// Parse failure with the offending field spelled out.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Strict parser: unknown fields, dangling actor references, mixed
// modalities, or unordered events are all rejected.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

uint64_t parse_mac(const std::string& twelve_hex_digits);
std::string format_mac(uint64_t mac);

}  // namespace privsim

#endif  // PRIVSIM_SCENARIO_HPP
