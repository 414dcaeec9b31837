// One PASS/FAIL line per acceptance criterion; tolerances come from data/golden.json.

#include <cstdio>
#include <cstring>

#include "qcompat/qcompat.h"

namespace {

struct Tally {
  int index = 0;
  int failed = 0;
};

void report(const char* name, int passed, const char* detail, double seconds, void* user) {
  auto* t = static_cast<Tally*>(user);
  ++t->index;
  t->failed += !passed;
  std::printf("[%s] %2d %-18s (%.1fs) %s\n", passed ? "PASS" : "FAIL", t->index, name, seconds, detail);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  const char* golden = argc > 1 ? argv[1] : nullptr;
  Tally t;
  int all = 0;
  const qc_status s = qc_validate(golden, nullptr, 0, report, &t, &all);
  if (s != QC_OK) {
    std::fprintf(stderr, "acceptance: %s: %s\n", qc_status_name(s), qc_last_error());
    return 2;
  }
  std::printf("%d/%d criteria passed\n", t.index - t.failed, t.index);
  return all ? 0 : 1;
}
