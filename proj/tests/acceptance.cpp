// One line per acceptance criterion; numeric arguments select criteria, -v lists every check.
#include <cstdio>
#include <cstdlib>
#include <set>
#include <string>

#include "s3qd/verify.hpp"

using namespace s3qd;

int main(int argc, char** argv) {
  struct Item {
    int id;
    const char* title;
    Report (*run)(const VerifyOptions&);
  };
  const Item items[] = {
      {1, "torus census", verify_census},
      {2, "stabilizer algebra", verify_drinfeld},
      {3, "ribbon identities", verify_ribbon_identities},
      {4, "basis change", verify_basis_change},
      {5, "generalized ribbons", verify_generalized_ribbons},
      {6, "lattice logical initialization", verify_lattice_init},
      {7, "gate truth tables", verify_gate_tables},
      {8, "protocol statistics", verify_statistics},
      {9, "charge-transfer law", verify_charge_transfer},
      {10, "fusion-table consistency", verify_fusion},
  };
  std::set<int> pick;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "-v")
      verbose = true;
    else
      pick.insert(std::atoi(argv[i]));
  }

  VerifyOptions opts;
  opts.seed = 20240601;
  opts.trials = 10000;
  bool all_ok = true;
  for (const auto& it : items) {
    if (!pick.empty() && !pick.count(it.id)) continue;
    Report r = it.run(opts);
    all_ok = all_ok && r.ok();
    std::printf("criterion %2d: %s  %s (%d/%zu checks, %.1f s)\n", it.id, r.ok() ? "PASS" : "FAIL", it.title, r.passed(),
                r.checks.size(), r.seconds.value_or(0));
    for (const auto& c : r.checks)
      if (verbose || !c.pass) std::printf("    %s: %s: %s\n", c.pass ? "ok" : "failed", c.name.c_str(), c.detail.c_str());
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
