#include "histrec/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "histrec/errors.hpp"

namespace histrec {

namespace {

void read_available(int fd, std::string& sink, bool& open_flag) {
  char buf[4096];
  ssize_t n = ::read(fd, buf, sizeof(buf));
  if (n > 0) {
    sink.append(buf, static_cast<size_t>(n));
  } else if (n == 0) {
    open_flag = false;
  } else if (errno != EAGAIN && errno != EINTR) {
    open_flag = false;
  }
}

}  // namespace

SubprocessResult run_subprocess(const std::vector<std::string>& argv) {
  if (argv.empty()) throw SubprocessError("empty argv", -1, "");

  int out_pipe[2];
  int err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    throw SubprocessError("pipe() failed: " + std::string(strerror(errno)), -1, "");

  pid_t pid = fork();
  if (pid < 0) throw SubprocessError("fork() failed: " + std::string(strerror(errno)), -1, "");

  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    // Reached only when exec failed; 127 mirrors the shell convention.
    std::string msg = "exec failed for '" + argv[0] + "': " + strerror(errno) + "\n";
    ssize_t ignored = ::write(STDERR_FILENO, msg.data(), msg.size());
    (void)ignored;
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  SubprocessResult result;
  bool out_open = true;
  bool err_open = true;
  while (out_open || err_open) {
    pollfd fds[2];
    nfds_t nfds = 0;
    if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
    if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
    int rc = poll(fds, nfds, -1);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (nfds_t i = 0; i < nfds; ++i) {
      if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
      if (fds[i].fd == out_pipe[0]) {
        read_available(out_pipe[0], result.out, out_open);
      } else {
        read_available(err_pipe[0], result.err, err_open);
      }
    }
  }
  close(out_pipe[0]);
  close(err_pipe[0]);

  int status = 0;
  if (waitpid(pid, &status, 0) < 0)
    throw SubprocessError("waitpid() failed: " + std::string(strerror(errno)), -1, "");
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

}  // namespace histrec
