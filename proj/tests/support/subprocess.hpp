// Runs a child process with captured output. POSIX only.
#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

class Child {
 public:
  Child(const std::string& exe, const std::vector<std::string>& args,
        const std::filesystem::path& cwd) {
    int out[2], err[2];
    if (::pipe(out) != 0 || ::pipe(err) != 0) throw std::runtime_error("pipe failed");
    pid_ = ::fork();
    if (pid_ < 0) throw std::runtime_error("fork failed");
    if (pid_ == 0) {
      ::dup2(out[1], 1);
      ::dup2(err[1], 2);
      ::close(out[0]);
      ::close(err[0]);
      if (::chdir(cwd.c_str()) != 0) ::_exit(126);
      std::vector<char*> argv{const_cast<char*>(exe.c_str())};
      for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      ::execv(exe.c_str(), argv.data());
      ::_exit(127);
    }
    ::close(out[1]);
    ::close(err[1]);
    out_ = out[0];
    err_ = err[0];
  }
  ~Child() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      wait();
    }
  }

  // Reads stdout up to and including the next newline.
  std::string read_line() {
    std::string line;
    char c;
    while (::read(out_, &c, 1) == 1) {
      line += c;
      if (c == '\n') break;
    }
    return line;
  }

  void signal(int sig) { ::kill(pid_, sig); }

  ProcessResult wait() {
    ProcessResult r;
    r.out = drain(out_);
    r.err = drain(err_);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    return r;
  }

 private:
  static std::string drain(int& fd) {
    std::string s;
    if (fd < 0) return s;
    char buf[4096];
    for (ssize_t n; (n = ::read(fd, buf, sizeof buf)) > 0;) s.append(buf, static_cast<std::size_t>(n));
    ::close(fd);
    fd = -1;
    return s;
  }

  pid_t pid_ = -1;
  int out_ = -1;
  int err_ = -1;
};

inline ProcessResult run(const std::string& exe, const std::vector<std::string>& args,
                         const std::filesystem::path& cwd) {
  return Child(exe, args, cwd).wait();
}

}  // namespace fixtures
