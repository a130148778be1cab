#pragma once

#include <string>
#include <vector>

namespace histrec {

struct SubprocessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs argv[0] with the given arguments, capturing stdout and stderr.
// Throws SubprocessError when the process cannot be spawned; a nonzero
// exit code is reported through the result, not as an exception.
SubprocessResult run_subprocess(const std::vector<std::string>& argv);

}  // namespace histrec
