// One line per acceptance criterion; exit status 1 if any fails.
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>

#include "colorlimits/scenarios.hpp"

int main(int argc, char** argv) {
  colorlimits::scenarios::Context ctx;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      ctx.seed = std::stoull(argv[++i]);
    } else if (arg == "--jobs" && i + 1 < argc) {
      ctx.jobs = std::stoul(argv[++i]);
    } else if (arg == "--only" && i + 1 < argc) {
      only.insert(std::stoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--seed N] [--jobs N] [--only ID]...\n";
      return 2;
    }
  }
  ctx.jobs = colorlimits::resolve_jobs(ctx.jobs);
  int failed = 0;
  for (const auto& c : colorlimits::scenarios::criteria()) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto o = colorlimits::scenarios::run(c, ctx);
    std::cout << colorlimits::scenarios::format_line(o) << std::endl;
    failed += o.passed ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion/criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
