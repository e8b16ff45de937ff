#pragma once

// JSON instance files. Every numeric payload travels as an exact string
// ("3/7", "-0.25"); floating-point literals are rejected outright so no
// binary rounding can leak into the data model.

#include <stdexcept>
#include <string>

#include "conemin/functions.hpp"

namespace conemin {

// Parse failure carrying the JSON path of the offending field, e.g.
// "constraints[2].Q[0][1]".
struct ParseError : std::runtime_error {
  std::string where;
  ParseError(std::string w, const std::string& what)
      : std::runtime_error(w.empty() ? what : w + ": " + what), where(std::move(w)) {}
};

// Reads and fully validates an instance file; throws ParseError on any
// malformed input (bad JSON, wrong shapes, indefinite Q, epsilon <= 0, ...).
Instance parse_instance(const std::string& path);

// Same, from an in-memory document. origin names the source in errors.
Instance parse_instance_text(const std::string& text,
                             const std::string& origin = "<string>");

// Inverse of parsing; parse_instance_text(serialize_instance(i)) reproduces
// the instance exactly.
std::string serialize_instance(const Instance& inst);

}  // namespace conemin
