#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace fluidex::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

// Collects outputs under one directory; every write goes through a
// temporary file and a rename.
class OutputSet {
 public:
  explicit OutputSet(std::string dir);
  void write(const std::string& name, const std::string& content);
  const std::vector<OutputFile>& files() const { return files_; }
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::vector<OutputFile> files_;
};

std::string sha256_hex(const std::string& data);

// Validates, executes, writes outputs plus manifest.json. Exceptions escape;
// run_guarded maps them to exit codes.
void run(const RunConfig& cfg, std::ostream& out);
int run_guarded(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace fluidex::app
