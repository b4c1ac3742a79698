#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "blochball/holo.hpp"

namespace blochball::mapio {

// Tagged-tree text format, one map per entry:
//   kind(param=value, ...){ children }
// kinds: identity, poly (comp/term children), extremal, mobius, compose,
// stack, rotation, scale. '#' starts a comment. See the README for the
// grammar and examples.

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

std::vector<holo::HoloMap> parse_battery(const std::string& text);
std::vector<holo::HoloMap> load_battery_file(const std::string& path);

// Complex literal of the map format: "1.5", "-0.25i", "0.3+0.1i", "i".
cplx parse_complex_literal(const std::string& text);

std::string serialize(const holo::HoloMap& map);
std::string serialize_battery(const std::vector<holo::HoloMap>& maps);

}  // namespace blochball::mapio
