#ifndef EVOGRAPH_VERIFY_HPP
#define EVOGRAPH_VERIFY_HPP

#include <ostream>

namespace evograph::verify {

struct Options {
  int criterion = 0;    // 0 = all
  bool quick = false;   // divide trial counts by `scale`
  long long scale = 10;
};

// Runs the acceptance criteria, printing one pass/fail line per criterion.
// Returns true iff every executed criterion passed.
bool run_suite(const Options& opt, std::ostream& out);

}  // namespace evograph::verify

#endif
