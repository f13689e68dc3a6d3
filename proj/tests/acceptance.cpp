// Acceptance run: one line per criterion, then a verdict.
//
//   acceptance [--quick] [--seed N] [--known-gap oracle-error-bound]
//
// Exit 0 when every criterion passes. With --known-gap the exit code also
// tolerates exactly one recorded shortfall: criterion 3 failing on its error
// bound while its order and runtime checks pass. The line still reads FAIL.
#include "hamalg/hamalg.h"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  int quick = 0;
  std::uint64_t seed = 42;
  bool known_gap = false;
  for (int k = 1; k < argc; ++k) {
    if (!std::strcmp(argv[k], "--quick")) {
      quick = 1;
    } else if (!std::strcmp(argv[k], "--seed") && k + 1 < argc) {
      seed = std::strtoull(argv[++k], nullptr, 10);
    } else if (!std::strcmp(argv[k], "--known-gap") && k + 1 < argc &&
               !std::strcmp(argv[k + 1], "oracle-error-bound")) {
      known_gap = true;
      ++k;
    } else {
      std::cerr << "usage: acceptance [--quick] [--seed N] [--known-gap oracle-error-bound]\n";
      return 2;
    }
  }
  int passed = 0;
  char *text = nullptr, *json = nullptr;
  if (hamalg_suite(quick, seed, HAMALG_FAULT_NONE, &passed, &text, &json) != HAMALG_OK) {
    std::cerr << "suite error: " << hamalg_last_error() << "\n";
    return 1;
  }
  std::cout << text;
  const auto report = nlohmann::ordered_json::parse(json);
  hamalg_string_free(text);
  hamalg_string_free(json);

  int failed = 0;
  bool waived = false;
  for (const auto& c : report["criteria"]) {
    if (c["passed"].get<bool>()) continue;
    const auto& d = c["detail_values"];
    if (known_gap && c["id"] == 3 && d.value("order_ok", false) && !d.value("error_ok", true) &&
        d.value("budget_ok", false)) {
      waived = true;
      continue;
    }
    ++failed;
  }
  if (report["criteria"].size() != 9) {
    std::cout << "expected 9 criteria, got " << report["criteria"].size() << "\n";
    return 1;
  }
  if (failed) {
    std::cout << failed << " criteria failed\n";
    return 1;
  }
  std::cout << (waived ? "all criteria passed except the known oracle error bound (criterion 3)\n"
                       : "all criteria passed\n");
  return 0;
}
