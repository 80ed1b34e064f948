// One PASS/FAIL line per acceptance criterion. Exit status 1 if any fails.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "mulpart/verify.hpp"

int main(int argc, char** argv) {
  mulpart::verify::Options opt;
  if (argc > 1) opt.seed = std::strtoull(argv[1], nullptr, 10);
  int failed = 0;
  for (const auto& suite : mulpart::verify::suites()) {
    for (const auto& r : mulpart::verify::run(suite, opt)) {
      std::printf("%s %2d %-16s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.suite.c_str(), r.seconds,
                  r.detail.c_str());
      std::fflush(stdout);
      if (!r.passed) ++failed;
    }
  }
  std::printf("%d of 12 criteria failed\n", failed);
  return failed ? 1 : 0;
}
