#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "fpprep/compressors.hpp"
#include "fpprep/error.hpp"

extern char** environ;

namespace fpprep {

namespace {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(o.release()) {}
  Fd& operator=(Fd&& o) noexcept {
    reset(o.release());
    return *this;
  }
  ~Fd() { reset(); }

  int get() const { return fd_; }
  int release() {
    const int fd = fd_;
    fd_ = -1;
    return fd;
  }
  void reset(int fd = -1) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = fd;
  }

 private:
  int fd_ = -1;
};

bool executable(const std::string& path) {
  struct stat st {};
  return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(path.c_str(), X_OK) == 0;
}

std::string resolve_program(const std::string& program) {
  if (program.find('/') != std::string::npos) {
    if (executable(program)) return program;
  } else if (const char* path = std::getenv("PATH")) {
    std::stringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      const std::string candidate = (dir.empty() ? "." : dir) + "/" + program;
      if (executable(candidate)) return candidate;
    }
  }
  throw Error(ErrorCode::config, "compressor executable not found: '" + program + "'");
}

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::process, what + ": " + std::strerror(errno));
}

std::string joined(const std::vector<std::string>& argv) {
  std::string s;
  for (const auto& a : argv) s += (s.empty() ? "" : " ") + a;
  return s;
}

}  // namespace

CommandSpec command_from_string(const std::string& command_line,
                                const std::string& decompress_line) {
  auto split = [](const std::string& line) {
    std::vector<std::string> argv;
    std::istringstream in(line);
    std::string word;
    while (in >> word) argv.push_back(word);
    return argv;
  };
  CommandSpec spec;
  spec.compress_argv = split(command_line);
  if (spec.compress_argv.empty()) throw Error(ErrorCode::config, "empty compressor command");
  spec.name = spec.compress_argv.front();
  if (!decompress_line.empty()) {
    spec.decompress_argv = split(decompress_line);
  } else {
    spec.decompress_argv = {spec.compress_argv.front(), "-d"};
  }
  return spec;
}

Bytes run_filter(const std::vector<std::string>& argv, std::span<const std::uint8_t> input,
                 std::chrono::milliseconds timeout) {
  if (argv.empty()) throw Error(ErrorCode::config, "empty command");
  const std::string program = resolve_program(argv.front());

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) fail("pipe");
  Fd child_stdin(in_pipe[0]), to_child(in_pipe[1]);
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) fail("pipe");
  Fd from_child(out_pipe[0]), child_stdout(out_pipe[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, child_stdin.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, child_stdout.get(), STDOUT_FILENO);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, program.c_str(), &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    errno = rc;
    fail("spawning '" + joined(argv) + "'");
  }
  child_stdin.reset();
  child_stdout.reset();
  ::fcntl(to_child.get(), F_SETFL, O_NONBLOCK);
  ::fcntl(from_child.get(), F_SETFL, O_NONBLOCK);

  // Feed stdin and drain stdout together so neither side blocks on a full pipe.
  Bytes output;
  std::size_t written = 0;
  if (input.empty()) to_child.reset();
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  bool timed_out = false;
  std::uint8_t buf[65536];
  while (from_child.get() >= 0) {
    pollfd fds[2];
    nfds_t n = 0;
    fds[n++] = {from_child.get(), POLLIN, 0};
    if (to_child.get() >= 0) fds[n++] = {to_child.get(), POLLOUT, 0};
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    const int ready = ::poll(fds, n, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      ::kill(pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      fail("poll");
    }
    if (n == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = ::write(to_child.get(), input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) to_child.reset();  // child closed its stdin
      if (written == input.size()) to_child.reset();
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t r = ::read(from_child.get(), buf, sizeof buf);
      if (r > 0) {
        output.insert(output.end(), buf, buf + r);
      } else if (r == 0 || errno != EAGAIN) {
        from_child.reset();
      }
    }
  }
  to_child.reset();
  from_child.reset();

  if (timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    throw Error(ErrorCode::process, "'" + joined(argv) + "' timed out");
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw Error(ErrorCode::process, "'" + joined(argv) + "' failed with status " +
                                        std::to_string(WIFEXITED(status) ? WEXITSTATUS(status)
                                                                         : -WTERMSIG(status)));
  }
  if (written != input.size()) {
    throw Error(ErrorCode::process, "'" + joined(argv) + "' did not consume its input");
  }
  return output;
}

ExternalResult external_compress(std::span<const std::uint8_t> input, const CommandSpec& spec,
                                 bool verify) {
  ExternalResult result;
  result.blob = run_filter(spec.compress_argv, input, spec.timeout);
  result.compressed_bytes = result.blob.size();
  if (verify && !spec.decompress_argv.empty()) {
    const Bytes back = run_filter(spec.decompress_argv, result.blob, spec.timeout);
    if (back.size() != input.size() || !std::equal(back.begin(), back.end(), input.begin())) {
      throw Error(ErrorCode::process,
                  "'" + joined(spec.decompress_argv) + "' did not reproduce the input");
    }
  }
  return result;
}

Bytes external_decompress(std::span<const std::uint8_t> blob, const CommandSpec& spec) {
  if (spec.decompress_argv.empty()) {
    throw Error(ErrorCode::config, "no decompressor configured for '" + spec.name + "'");
  }
  return run_filter(spec.decompress_argv, blob, spec.timeout);
}

}  // namespace fpprep
