// Shared model texts and helpers for the test binaries.

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#ifndef KDIFF_SOURCE_DIR
#error "KDIFF_SOURCE_DIR must point at the source tree"
#endif

namespace kdiff::testing {

inline const char* const kNoPromptChoice = R"(choice
	prompt "choice prompt"

config A
	boolean "A prompt"

config B
	boolean "B prompt"
	default n

config NOPROMPT
	boolean
	default y

endchoice
)";

inline std::string source_path(const std::string& relative) { return std::string(KDIFF_SOURCE_DIR) + "/" + relative; }

inline std::string read_source(const std::string& relative) {
  std::ifstream in(source_path(relative), std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace kdiff::testing
