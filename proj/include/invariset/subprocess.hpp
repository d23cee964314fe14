#pragma once

// SystemModel backed by an external simulator process.
//
// Wire protocol (line-oriented text over stdin/stdout):
//   handshake:  tool sends "DIM?\n", process replies "<n>\n"
//   per step:   tool sends n whitespace-separated decimal floats + "\n",
//               process replies with n floats + "\n"
// Floats travel as shortest round-trip decimals, so a well-behaved process
// sees and returns exact binary64 values.
//
// Error reporting distinguishes three failure modes so callers can tell a
// crashed simulator from a protocol bug:
//   ProcessDiedError       - the child exited / the pipe broke
//   MalformedReplyError    - a reply line was not parseable numbers
//   DimensionMismatchError - a reply had the wrong number of values

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "dynamics.hpp"

namespace invariset {

class ProcessDiedError : public SubprocessError {
 public:
  using SubprocessError::SubprocessError;
};

class MalformedReplyError : public SubprocessError {
 public:
  using SubprocessError::SubprocessError;
};

class DimensionMismatchError : public SubprocessError {
 public:
  using SubprocessError::SubprocessError;
};

/// A black-box system whose step() round-trips one state through a child
/// process speaking the line protocol above.  Access to one instance is
/// serialized internally; for multi-worker simulation spawn one instance
/// per worker via clone().
class ExternalSystem final : public SystemModel {
 public:
  explicit ExternalSystem(std::string command) : command_(std::move(command)) {
    // Dead children must surface as EPIPE errors on write, not SIGPIPE.
    static std::once_flag ignore_sigpipe;
    std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

    spawn();
    try {
      write_line("DIM?");
      const std::string reply = read_line();
      dim_ = parse_dim(reply);
    } catch (...) {
      shutdown();
      throw;
    }
  }

  ~ExternalSystem() override { shutdown(); }

  ExternalSystem(const ExternalSystem&) = delete;
  ExternalSystem& operator=(const ExternalSystem&) = delete;

  int dim() const override { return dim_; }
  std::string name() const override { return "extern:" + command_; }
  const std::string& command() const noexcept { return command_; }

  /// Fresh process running the same command (one per worker thread).
  std::shared_ptr<ExternalSystem> clone() const {
    return std::make_shared<ExternalSystem>(command_);
  }

  void step_into(std::span<const double> x,
                 std::span<double> out) const override {
    std::lock_guard<std::mutex> lock(io_mutex_);
    std::string line;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j > 0) line.push_back(' ');
      append_double(line, x[j]);
    }
    write_line(line);
    parse_state(read_line(), out);
  }

 private:
  void spawn() {
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0)
      throw SubprocessError("pipe() failed: " +
                            std::string(std::strerror(errno)));
    if (::pipe(from_child) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw SubprocessError("pipe() failed: " +
                            std::string(std::strerror(errno)));
    }

    pid_ = ::fork();
    if (pid_ < 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      throw SubprocessError("fork() failed: " +
                            std::string(std::strerror(errno)));
    }

    if (pid_ == 0) {
      // Child: wire the pipes to stdio and hand off to the shell.
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command_.c_str(),
              static_cast<char*>(nullptr));
      ::_exit(127);
    }

    ::close(to_child[0]);
    ::close(from_child[1]);
    write_fd_ = to_child[1];
    read_fd_ = from_child[0];
  }

  void shutdown() noexcept {
    if (write_fd_ >= 0) {
      ::close(write_fd_);
      write_fd_ = -1;
    }
    if (read_fd_ >= 0) {
      ::close(read_fd_);
      read_fd_ = -1;
    }
    if (pid_ > 0) {
      // A conforming process exits once stdin closes; give it a moment,
      // then insist.
      for (int i = 0; i < 200; ++i) {
        const pid_t r = ::waitpid(pid_, nullptr, WNOHANG);
        if (r == pid_ || (r < 0 && errno == ECHILD)) {
          pid_ = -1;
          return;
        }
        ::usleep(10'000);
      }
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, nullptr, 0);
      pid_ = -1;
    }
  }

  void write_line(std::string line) const {
    line.push_back('\n');
    const char* data = line.data();
    std::size_t remaining = line.size();
    while (remaining > 0) {
      const ssize_t n = ::write(write_fd_, data, remaining);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProcessDiedError("external system '" + command_ +
                               "' is not accepting input (" +
                               std::strerror(errno) + ")");
      }
      data += n;
      remaining -= static_cast<std::size_t>(n);
    }
  }

  std::string read_line() const {
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      char chunk[4096];
      const ssize_t n = ::read(read_fd_, chunk, sizeof(chunk));
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProcessDiedError("external system '" + command_ +
                               "' read failed (" + std::strerror(errno) + ")");
      }
      if (n == 0)
        throw ProcessDiedError("external system '" + command_ +
                               "' closed its output (process died?)");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  int parse_dim(const std::string& reply) const {
    try {
      const double v = parse_double(trimmed(reply));
      const int n = static_cast<int>(v);
      if (v != static_cast<double>(n) || n < 1)
        throw ParameterError("not a positive integer");
      return n;
    } catch (const ParameterError&) {
      throw MalformedReplyError("external system '" + command_ +
                                "' answered the DIM? handshake with '" +
                                reply + "'");
    }
  }

  void parse_state(const std::string& line, std::span<double> out) const {
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && is_space(line[pos])) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !is_space(line[end])) ++end;
      if (count >= out.size())
        throw DimensionMismatchError(
            "external system '" + command_ + "' replied with more than " +
            std::to_string(out.size()) + " values: '" + line + "'");
      try {
        out[count] = parse_double(std::string_view(line).substr(pos, end - pos));
      } catch (const ParameterError&) {
        throw MalformedReplyError("external system '" + command_ +
                                  "' replied with a non-numeric value in '" +
                                  line + "'");
      }
      ++count;
      pos = end;
    }
    if (count != out.size())
      throw DimensionMismatchError(
          "external system '" + command_ + "' replied with " +
          std::to_string(count) + " values, expected " +
          std::to_string(out.size()) + ": '" + line + "'");
  }

  static bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\r';
  }

  static std::string_view trimmed(std::string_view s) noexcept {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
  }

  std::string command_;
  pid_t pid_ = -1;
  int write_fd_ = -1;
  int read_fd_ = -1;
  int dim_ = 0;
  mutable std::mutex io_mutex_;
  mutable std::string buffer_;
};

/// Builds a system from a CLI/config spec: a built-in name, or
/// "extern:<command>" for an external simulator process.
inline std::shared_ptr<SystemModel> make_system(const std::string& spec) {
  constexpr std::string_view prefix = "extern:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string command = spec.substr(prefix.size());
    if (command.empty())
      throw ParameterError("extern: system spec needs a command");
    return std::make_shared<ExternalSystem>(command);
  }
  return make_builtin_system(spec);
}

inline bool is_builtin_system(const std::string& spec) {
  for (const auto& n : builtin_system_names())
    if (n == spec) return true;
  return false;
}

}  // namespace invariset
