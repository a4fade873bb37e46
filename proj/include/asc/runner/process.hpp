#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <sys/types.h>
#include <vector>

namespace asc::runner {

class ProcessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A spawned child. The destructor kills and reaps it if still running.
class ChildProcess {
 public:
  ChildProcess() = default;
  ~ChildProcess();
  ChildProcess(ChildProcess&& other) noexcept;
  ChildProcess& operator=(ChildProcess&& other) noexcept;
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  // argv[0] is the executable path. stdout/stderr go to `log` when given,
  // otherwise they are inherited.
  static ChildProcess spawn(const std::vector<std::string>& argv,
                            const std::optional<std::filesystem::path>& log = std::nullopt);

  pid_t pid() const { return pid_; }
  bool running();
  void kill(int signal);
  // Exit status if the child ended within the timeout (128 + signal when
  // killed).
  std::optional<int> wait(std::chrono::milliseconds timeout);

 private:
  void terminate();

  pid_t pid_ = -1;
  std::optional<int> status_;
};

std::filesystem::path current_executable();

}  // namespace asc::runner
