#pragma once

// Batch commands behind the CLI. Each takes a JSON config (input documents
// inline, no file I/O) and returns a JSON report plus an optional derived
// text artifact (SVG or CSV).

#include <string>
#include <vector>

#include "rollingball/io.hpp"

namespace rollingball {

struct CommandOutput {
  io::Json report;
  std::string aux;       // SVG/CSV text, empty when not requested
  std::string aux_kind;  // "svg", "csv" or empty
};

// Commands: "body open", "body measure", "func regularize", "func lusin",
// "func extend", "envelope", "alexandrov scan".
CommandOutput run_command(const std::string& command, const io::Json& config);

const std::vector<std::string>& command_names();

}  // namespace rollingball
