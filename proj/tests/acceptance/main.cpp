#include <chrono>
#include <cstdio>
#include <cstring>
#include <exception>
#include <set>
#include <string>

#include "acceptance/criteria.hpp"

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only.insert(std::stoi(argv[++i]));
    } else if (std::strcmp(argv[i], "--list") == 0) {
      for (const auto& c : acceptance::all_criteria()) std::printf("%2d %s\n", c.id, c.name.c_str());
      return 0;
    } else {
      std::fprintf(stderr, "usage: %s [--only N]... [--list]\n", argv[0]);
      return 2;
    }
  }

  int failed = 0;
  for (const auto& c : acceptance::all_criteria()) {
    if (!only.empty() && !only.contains(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    acceptance::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
