// Acceptance run: one line per criterion, exit status 0 iff every line passes.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "poncelet/acceptance.hpp"

namespace {

void print(const poncelet::acceptance::CriterionResult& r) {
  std::printf("criterion %2d %s  %s (%.3f s): %s\n", r.id, r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
              r.detail.c_str());
}

// The command line selftest end to end: exit status and wall time.
poncelet::acceptance::CriterionResult selftest_binary() {
  const std::string cmd = std::string(PONCELET_LAB_PATH) + " selftest > /dev/null 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  char buf[128];
  std::snprintf(buf, sizeof buf, "exit %d, %.2f s (budget 60 s)", code, secs);
  return {10, "poncelet-lab selftest", code == 0 && secs < 60.0, buf, secs};
}

}  // namespace

int main() {
  bool all = true;
  for (const auto& r : poncelet::acceptance::run_library_criteria({})) {
    print(r);
    all = all && r.passed;
  }
  const auto last = selftest_binary();
  print(last);
  all = all && last.passed;
  std::printf("%s\n", all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL");
  return all ? 0 : 1;
}
