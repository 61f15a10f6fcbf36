#pragma once

#include <string>
#include <string_view>

namespace xpathdiff::harness {

/// POSIX single-quoting for /bin/sh.
std::string shell_quote(std::string_view s);

struct CommandResult {
  enum class Status { kExited, kSignaled, kTimedOut, kSpawnFailed } status = Status::kExited;
  int exit_code = 0;
  std::string out;
};

/// Runs `command` through /bin/sh in its own process group, capturing stdout
/// (stderr is discarded). The whole group is killed at the deadline.
CommandResult run_command(const std::string& command, int timeout_ms);

}  // namespace xpathdiff::harness
