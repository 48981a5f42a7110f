// Copyright 2026 The Critique Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "critique_forge/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "critique_forge/error.hpp"
#include "critique_forge/text.hpp"

namespace critique_forge {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxStderrBytes = 64 * 1024;

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  Fd& operator=(Fd&& other) noexcept {
    if (this != &other) {
      reset();
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }
  ~Fd() { reset(); }

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Pipe {
  Fd read;
  Fd write;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw SandboxSpawnFailure(std::string("pipe2 failed: ") + std::strerror(errno));
  }
  return {Fd(fds[0]), Fd(fds[1])};
}

// Removes the directory tree on scope exit.
class TempDir {
 public:
  TempDir() {
    auto pattern = (fs::temp_directory_path() / "critique-forge-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) {
      throw SandboxSpawnFailure(std::string("mkdtemp failed: ") + std::strerror(errno));
    }
    path_ = pattern;
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string resolve_executable(const std::string& name) {
  if (name.find('/') != std::string::npos) {
    return ::access(name.c_str(), X_OK) == 0 ? name : std::string();
  }
  const char* path_env = std::getenv("PATH");
  std::string_view dirs = path_env ? path_env : "/usr/local/bin:/usr/bin:/bin";
  while (!dirs.empty()) {
    auto colon = dirs.find(':');
    std::string_view dir = dirs.substr(0, colon);
    dirs = colon == std::string_view::npos ? std::string_view() : dirs.substr(colon + 1);
    if (dir.empty()) dir = ".";
    std::string candidate = std::string(dir) + "/" + name;
    struct stat st;
    if (::stat(candidate.c_str(), &st) == 0 && S_ISREG(st.st_mode) &&
        ::access(candidate.c_str(), X_OK) == 0) {
      return candidate;
    }
  }
  return {};
}

void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void set_nonblocking(int fd) { ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK); }

struct ChildOutcome {
  bool timed_out = false;
  bool exited_cleanly = false;
  int exit_code = 0;
  int signal = 0;
  bool output_truncated = false;
  std::string stdout_text;
  std::string stderr_text;
  std::int64_t wall_time_ms = 0;
};

ChildOutcome run_child(const std::vector<std::string>& argv, const fs::path& workdir,
                       std::string_view input, const ExecutionLimits& limits) {
  Pipe in = make_pipe();
  Pipe out = make_pipe();
  Pipe err = make_pipe();
  Pipe exec_status = make_pipe();

  std::vector<char*> cargv;
  for (const auto& arg : argv) cargv.push_back(const_cast<char*>(arg.c_str()));
  cargv.push_back(nullptr);
  const std::string workdir_str = workdir.string();

  const auto start = Clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    throw SandboxSpawnFailure(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    // Child: async-signal-safe calls only.
    ::setpgid(0, 0);
    if (::chdir(workdir_str.c_str()) != 0 || ::dup2(in.read.get(), STDIN_FILENO) < 0 ||
        ::dup2(out.write.get(), STDOUT_FILENO) < 0 ||
        ::dup2(err.write.get(), STDERR_FILENO) < 0) {
      int e = errno;
      [[maybe_unused]] auto n = ::write(exec_status.write.get(), &e, sizeof e);
      ::_exit(127);
    }
    ::signal(SIGPIPE, SIG_DFL);
    ::execv(cargv[0], cargv.data());
    int e = errno;
    [[maybe_unused]] auto n = ::write(exec_status.write.get(), &e, sizeof e);
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  in.read.reset();
  out.write.reset();
  err.write.reset();
  exec_status.write.reset();

  int exec_errno = 0;
  ssize_t got;
  do {
    got = ::read(exec_status.read.get(), &exec_errno, sizeof exec_errno);
  } while (got < 0 && errno == EINTR);
  if (got == static_cast<ssize_t>(sizeof exec_errno)) {
    int status;
    ::waitpid(pid, &status, 0);
    throw SandboxSpawnFailure(
        fmt::format("cannot start {}: {}", argv.front(), std::strerror(exec_errno)));
  }

  set_nonblocking(in.write.get());
  set_nonblocking(out.read.get());
  set_nonblocking(err.read.get());

  ChildOutcome outcome;
  const auto deadline = start + std::chrono::milliseconds(limits.per_test_timeout_ms);
  std::size_t written = 0;
  if (input.empty()) in.write.reset();

  std::array<char, 65536> buffer;
  auto drain = [&](Fd& fd, std::string& sink, std::size_t cap, bool* truncated) {
    while (true) {
      ssize_t n = ::read(fd.get(), buffer.data(), buffer.size());
      if (n > 0) {
        std::size_t room = sink.size() < cap ? cap - sink.size() : 0;
        std::size_t take = std::min(room, static_cast<std::size_t>(n));
        sink.append(buffer.data(), take);
        if (take < static_cast<std::size_t>(n) && truncated) *truncated = true;
        continue;
      }
      if (n == 0) {
        fd.reset();
      } else if (errno == EINTR) {
        continue;
      }
      return;
    }
  };

  while (out.read || err.read) {
    const auto now = Clock::now();
    if (now >= deadline) {
      outcome.timed_out = true;
      break;
    }
    std::vector<pollfd> fds;
    if (in.write) fds.push_back({in.write.get(), POLLOUT, 0});
    if (out.read) fds.push_back({out.read.get(), POLLIN, 0});
    if (err.read) fds.push_back({err.read.get(), POLLIN, 0});
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
    int ready = ::poll(fds.data(), fds.size(), static_cast<int>(remaining));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (const auto& p : fds) {
      if (p.revents == 0) continue;
      if (in.write && p.fd == in.write.get()) {
        if (p.revents & (POLLERR | POLLHUP)) {
          in.write.reset();
          continue;
        }
        ssize_t n = ::write(in.write.get(), input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if ((n < 0 && errno != EAGAIN && errno != EINTR) || written == input.size()) {
          in.write.reset();
        }
      } else if (out.read && p.fd == out.read.get()) {
        drain(out.read, outcome.stdout_text, limits.max_output_bytes, &outcome.output_truncated);
      } else if (err.read && p.fd == err.read.get()) {
        drain(err.read, outcome.stderr_text, kMaxStderrBytes, nullptr);
      }
    }
  }
  in.write.reset();

  // Streams closed (or deadline hit); wait for the process itself.
  int status = 0;
  bool reaped = false;
  while (!outcome.timed_out) {
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      reaped = true;
      break;
    }
    if (r < 0 && errno != EINTR) break;
    if (Clock::now() >= deadline) {
      outcome.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  ::kill(-pid, SIGKILL);
  if (!reaped) {
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
  }
  outcome.wall_time_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();

  if (WIFEXITED(status)) {
    outcome.exit_code = WEXITSTATUS(status);
    outcome.exited_cleanly = outcome.exit_code == 0;
  } else if (WIFSIGNALED(status)) {
    outcome.signal = WTERMSIG(status);
  }
  return outcome;
}

}  // namespace

InterpreterTable default_interpreters() {
  return {{"python3", {"python3", "{source}"}}, {"sh", {"sh", "{source}"}}};
}

std::string normalize_output(std::string_view raw) {
  const std::string clean = text::sanitize_utf8(raw);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= clean.size()) {
    auto eol = clean.find('\n', start);
    std::string line =
        clean.substr(start, eol == std::string::npos ? std::string::npos : eol - start);
    auto last = line.find_last_not_of(" \t\r\f\v");
    line.erase(last == std::string::npos ? 0 : last + 1);
    lines.push_back(std::move(line));
    if (eol == std::string::npos) break;
    start = eol + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i];
  }
  return out;
}

Sandbox::Sandbox(InterpreterTable interpreters, int max_concurrency)
    : interpreters_(std::move(interpreters)) {
  if (max_concurrency <= 0) {
    max_concurrency = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  slots_ = std::make_unique<std::counting_semaphore<>>(max_concurrency);
  ignore_sigpipe_once();
}

ExecutionReport Sandbox::run_tests(std::string_view source, const std::string& language_tag,
                                   const std::vector<TestCase>& tests,
                                   const ExecutionLimits& limits) const {
  auto it = interpreters_.find(language_tag);
  if (it == interpreters_.end() || it->second.empty()) throw UnknownLanguage(language_tag);
  if (tests.empty()) throw ContractError("run_tests needs at least one test");

  std::vector<TestResult> results;
  results.reserve(tests.size());
  for (const auto& test : tests) {
    results.push_back(run_one(it->second, source, test, limits));
  }
  return ExecutionReport::from(std::move(results));
}

TestResult Sandbox::run_one(const std::vector<std::string>& argv_template,
                            std::string_view source, const TestCase& test,
                            const ExecutionLimits& limits) const {
  slots_->acquire();
  struct Release {
    std::counting_semaphore<>& sem;
    ~Release() { sem.release(); }
  } release{*slots_};

  TempDir dir;
  const fs::path source_path = dir.path() / "solution";
  {
    std::ofstream out(source_path, std::ios::binary);
    out.write(source.data(), static_cast<std::streamsize>(source.size()));
    if (!out) throw SandboxSpawnFailure("cannot write source to " + source_path.string());
  }

  std::vector<std::string> argv;
  for (const auto& part : argv_template) {
    std::string arg = part;
    for (auto pos = arg.find("{source}"); pos != std::string::npos;
         pos = arg.find("{source}", pos + source_path.string().size())) {
      arg.replace(pos, 8, source_path.string());
    }
    argv.push_back(std::move(arg));
  }
  const std::string exe = resolve_executable(argv.front());
  if (exe.empty()) {
    throw SandboxSpawnFailure("interpreter not found: " + argv.front());
  }
  argv.front() = exe;

  ChildOutcome outcome = run_child(argv, dir.path(), test.input, limits);

  TestResult result;
  result.actual_output = text::sanitize_utf8(outcome.stdout_text);
  result.stderr_text = text::sanitize_utf8(outcome.stderr_text);
  // Tracebacks mention the random work directory; keep reports reproducible.
  const std::string work_dir = dir.path().string();
  for (auto pos = result.stderr_text.find(work_dir); pos != std::string::npos;
       pos = result.stderr_text.find(work_dir, pos + 1)) {
    result.stderr_text.replace(pos, work_dir.size(), ".");
  }
  result.wall_time_ms = outcome.wall_time_ms;
  if (outcome.timed_out) {
    result.verdict = Verdict::kTimeout;
  } else if (!outcome.exited_cleanly) {
    result.verdict = Verdict::kRuntimeError;
    if (outcome.signal != 0) {
      result.stderr_text += fmt::format("\n[terminated by signal {}]", outcome.signal);
    } else {
      result.stderr_text += fmt::format("\n[exit code {}]", outcome.exit_code);
    }
  } else if (outcome.output_truncated) {
    result.verdict = Verdict::kWrongAnswer;
    result.stderr_text += fmt::format("\n[output truncated at {} bytes]", limits.max_output_bytes);
  } else if (normalize_output(outcome.stdout_text) == normalize_output(test.expected_output)) {
    result.verdict = Verdict::kAccepted;
  } else {
    result.verdict = Verdict::kWrongAnswer;
  }
  return result;
}

}  // namespace critique_forge
