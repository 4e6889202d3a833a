#pragma once

#include <string>
#include <vector>

#include "walkbound/config.hpp"

namespace walkbound {

const std::vector<std::string>& command_names();

// Runs one command and returns the artifact text in cfg.format. Throws the
// library error types on failure; nothing is written here.
std::string run_command(const std::string& command, const RunConfig& cfg);

// Writes text to path through a temporary file in the same directory and a
// rename, so readers never observe a partial file.
void write_atomically(const std::string& path, const std::string& text);

}  // namespace walkbound
