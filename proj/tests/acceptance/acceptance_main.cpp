// Acceptance suite: one PASS/FAIL line per criterion.
//   sfr_acceptance                 all ten criteria
//   sfr_acceptance --criterion 3   a single criterion (as registered with ctest)

#include <CLI11.hpp>
#include <iostream>

#include "sfr/app/acceptance.hpp"

int main(int argc, char** argv) {
  CLI::App app{"sfr acceptance criteria"};
  std::vector<int> ids;
  app.add_option("--criterion", ids, "Criterion number 1..10 (repeatable)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (ids.empty())
    for (int i = 1; i <= 10; ++i) ids.push_back(i);

  std::vector<std::string> lines;
  bool all = true;
  for (int id : ids) {
    std::cout << "--- criterion " << id << '\n' << std::flush;
    const sfr::CriterionOutcome o = sfr::run_criterion(id, std::cout);
    lines.push_back(sfr::outcome_line(o));
    all = all && o.pass;
  }
  std::cout << '\n';
  for (const auto& l : lines) std::cout << l << '\n';
  return all ? 0 : 1;
}
