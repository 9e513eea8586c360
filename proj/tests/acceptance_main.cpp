// Acceptance suite: one pass/fail line per criterion; nonzero exit on any
// failure. `--criterion N` runs a single criterion, `--quick [scale]` divides
// the trial counts for fast smoke runs.

#include <cstring>
#include <iostream>
#include <string>

#include "evograph/verify.hpp"

int main(int argc, char** argv) {
  evograph::verify::Options opt;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      opt.criterion = std::atoi(argv[++i]);
    } else if (arg == "--quick") {
      opt.quick = true;
      if (i + 1 < argc && argv[i + 1][0] != '-') opt.scale = std::atoll(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion N] [--quick [scale]]\n";
      return 2;
    }
  }
  bool ok = evograph::verify::run_suite(opt, std::cout);
  return ok ? 0 : 1;
}
