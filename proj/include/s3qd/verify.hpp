#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "s3qd/gates.hpp"

namespace s3qd {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string name;
  std::vector<Check> checks;
  std::optional<double> seconds;  // wall time, absent when timing is off

  void add(std::string check, bool pass, std::string detail = "");
  bool ok() const;
  int passed() const;
  int failed() const;
};
void to_json(nlohmann::json& j, const Check& c);
void to_json(nlohmann::json& j, const Report& r);

struct VerifyOptions {
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  long trials = 10000;
  Caps caps;
  bool timing = true;  // false drops runtime checks and wall times so output is byte-stable
};

// One report per acceptance item.
Report verify_census(const VerifyOptions& o);
Report verify_drinfeld(const VerifyOptions& o);
Report verify_ribbon_identities(const VerifyOptions& o);
Report verify_basis_change(const VerifyOptions& o);
Report verify_generalized_ribbons(const VerifyOptions& o);
Report verify_lattice_init(const VerifyOptions& o);
Report verify_gate_tables(const VerifyOptions& o);
Report verify_statistics(const VerifyOptions& o);
Report verify_charge_transfer(const VerifyOptions& o);
Report verify_fusion(const VerifyOptions& o);

// Suites for the command line: algebra, ribbon, gates, all.
std::vector<Report> verify_suite(std::string_view suite, const VerifyOptions& o);

struct McResult {
  std::string protocol;
  std::string description;
  long trials = 0;
  long hits = 0;
  double empirical = 0;
  double analytic = 0;
  double sigma = 0;  // binomial standard error at the analytic rate
  double z = 0;
  bool within = false;  // |z| <= 3
};
void to_json(nlohmann::json& j, const McResult& r);

// flux_c3, flux_c3_4rounds, flux_c2, x_step, x_residual, plus_prep, plus_prep_5, xi_prep,
// signflip_N<k> for odd k.
std::vector<std::string> mc_protocols();
// Throws InputError for an unknown protocol name or trials < 1.
McResult run_mc(std::string_view protocol, long trials, std::uint64_t seed, const Caps& caps);

}  // namespace s3qd
