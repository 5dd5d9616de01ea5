#include "bitwidth/solver.hpp"

#include "bitwidth/smtlib.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace bw {
namespace {

struct Fd {
  int fd = -1;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

void ignore_sigpipe() {
  struct sigaction sa {};
  if (sigaction(SIGPIPE, nullptr, &sa) == 0 && sa.sa_handler == SIG_DFL) {
    sa.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &sa, nullptr);
  }
}

}  // namespace

ExternalSolver::ExternalSolver(std::string command, double timeout_seconds)
    : command_(std::move(command)), timeout_(timeout_seconds) {
  std::istringstream in(command_);
  for (std::string part; in >> part;) argv_.push_back(part);
  if (argv_.empty()) throw SolverError("empty solver command");
  if (argv_.size() == 1 && std::filesystem::path(argv_[0]).filename() == "z3")
    argv_.push_back("-in");
  ignore_sigpipe();
}

SatResult ExternalSolver::check(const ConstraintSystem& cs, Side side, const Rational& bound) {
  return run_script(emit_smtlib(cs, side, bound));
}

SatResult ExternalSolver::run_script(const std::string& script) {
  ++queries_;
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw SolverError("pipe: " + std::string(std::strerror(errno)));
  Fd in_r{in_pipe[0]}, in_w{in_pipe[1]};
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) throw SolverError("pipe: " + std::string(std::strerror(errno)));
  Fd out_r{out_pipe[0]}, out_w{out_pipe[1]};

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_r.fd, STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_w.fd, STDOUT_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

  std::vector<char*> argv;
  for (auto& a : argv_) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw SolverError("cannot start solver '" + command_ + "': " + std::strerror(rc));
  in_r.reset();
  out_w.reset();

  const char* data = script.data();
  size_t left = script.size();
  while (left > 0) {
    ssize_t n = ::write(in_w.fd, data, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;  // solver closed its input early; its output decides
    }
    data += n;
    left -= static_cast<size_t>(n);
  }
  in_w.reset();

  std::string output;
  bool timed_out = false;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_);
  char buf[4096];
  while (true) {
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      timed_out = true;
      break;
    }
    int ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    pollfd pfd{out_r.fd, POLLIN, 0};
    int pr = ::poll(&pfd, 1, ms);
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (pr == 0) continue;
    ssize_t n = ::read(out_r.fd, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<size_t>(n));
  }
  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    ++timeouts_;
    return SatResult::Unknown;
  }

  std::istringstream tokens(output);
  std::string first;
  tokens >> first;
  if (first == "sat") return SatResult::Sat;
  if (first == "unsat") return SatResult::Unsat;
  if (first == "unknown") return SatResult::Unknown;
  std::string why = first.empty() ? "no output" : "unexpected answer '" + first + "'";
  if (WIFSIGNALED(status)) why += ", killed by signal " + std::to_string(WTERMSIG(status));
  else if (WIFEXITED(status) && WEXITSTATUS(status) != 0)
    why += ", exit status " + std::to_string(WEXITSTATUS(status));
  throw SolverError("solver '" + command_ + "' failed: " + why);
}

std::optional<std::string> find_solver() {
  if (const char* env = std::getenv("BITWIDTH_SOLVER"); env && *env) return std::string(env);
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::string_view rest(path);
  while (!rest.empty()) {
    auto colon = rest.find(':');
    std::string dir(rest.substr(0, colon));
    rest = colon == std::string_view::npos ? std::string_view() : rest.substr(colon + 1);
    if (dir.empty()) continue;
    std::filesystem::path candidate = std::filesystem::path(dir) / "z3";
    if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
  }
  return std::nullopt;
}

}  // namespace bw
