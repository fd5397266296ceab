// Command-line front end: census, verify, mc, ribbon, circuit.
// Exit status: 0 pass, 1 invariant failure, 2 input error, 3 cap exhaustion.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "s3qd/logical.hpp"
#include "s3qd/verify.hpp"

using namespace s3qd;
using nlohmann::json;

namespace {

enum Exit { kPass = 0, kInvariant = 1, kInput = 2, kCap = 3 };

struct Global {
  std::uint64_t seed = 1;
  long trials = 10000;
  double tolerance = 1e-9;
  Caps caps;
  std::string format = "table";
  std::string out;
  bool no_timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// JSON goes to --out when given, else stdout; tables always go to stdout.
void emit(const Global& g, const json& j, const std::string& table) {
  std::string text = g.format == "json" ? j.dump(2) + "\n" : table;
  if (!g.out.empty()) {
    std::ofstream f(g.out);
    if (!f) throw InputError("cannot write " + g.out);
    f << j.dump(2) << "\n";
    if (g.format == "json") return;
  }
  std::fputs(text.c_str(), stdout);
}

VerifyOptions options(const Global& g) {
  VerifyOptions o;
  o.seed = g.seed;
  o.trials = g.trials;
  o.tolerance = g.tolerance;
  o.caps = g.caps;
  o.timing = !g.no_timing;
  return o;
}

// ---- census

int cmd_census(const Global& g) {
  Census c = census_1x1_torus();
  json rows = json::array();
  std::string table = fmt::format("ground={}\nexcited={}\n", c.ground, c.single_particle);
  for (const auto& r : c.rows) {
    rows.push_back({{"flux", class_name(r.flux)}, {"states", r.states}});
    table += fmt::format("  {} flux: {}\n", class_name(r.flux), r.states);
  }
  json comm = json::object();
  table += "torus flux g1 g2 g1^-1 g2^-1 (rows g1 horizontal, columns g2 vertical):\n     ";
  for (Elem b = 0; b < ORDER; ++b) table += fmt::format("{:>4}", name(b));
  table += "\n";
  for (Elem a = 0; a < ORDER; ++a) {
    table += fmt::format("{:>4} ", name(a));
    json row = json::object();
    for (Elem b = 0; b < ORDER; ++b) {
      row[std::string(name(b))] = std::string(name(c.flux[a][b]));
      table += fmt::format("{:>4}", name(c.flux[a][b]));
    }
    comm[std::string(name(a))] = row;
    table += "\n";
  }
  json j{{"ground", c.ground}, {"excited", c.single_particle}, {"rows", rows}, {"commutator", comm}};
  emit(g, j, table);
  bool ok = c.ground == 8 && c.single_particle == 28;
  for (const auto& r : c.rows) ok = ok && (r.flux != ClassLabel::C2 || r.states == 0);
  return ok ? kPass : kInvariant;
}

// ---- verify

int cmd_verify(const Global& g, const std::string& suite) {
  auto reports = verify_suite(suite, options(g));
  json j = json::array();
  std::string table;
  int passed = 0, failed = 0;
  for (const auto& r : reports) {
    j.push_back(r);
    passed += r.passed();
    failed += r.failed();
    table += fmt::format("{} {} ({}/{})\n", r.ok() ? "PASS" : "FAIL", r.name, r.passed(), r.checks.size());
    for (const auto& c : r.checks)
      table += fmt::format("  [{}] {}{}\n", c.pass ? "ok" : "FAIL", c.name, c.detail.empty() ? "" : ": " + c.detail);
  }
  table += fmt::format("{} checks passed, {} failed\n", passed, failed);
  emit(g, json{{"suite", suite}, {"passed", passed}, {"failed", failed}, {"reports", j}}, table);
  return failed == 0 ? kPass : kInvariant;
}

// ---- mc

int cmd_mc(const Global& g, const std::string& protocol) {
  std::vector<std::string> names = protocol == "all" ? mc_protocols() : std::vector<std::string>{protocol};
  json j = json::array();
  std::string table = fmt::format("{:<16} {:>8} {:>8} {:>10} {:>10} {:>7}\n", "protocol", "trials", "hits", "empirical",
                                  "analytic", "z");
  bool ok = true;
  for (const auto& n : names) {
    McResult m = run_mc(n, g.trials, g.seed, g.caps);
    ok = ok && m.within;
    j.push_back(m);
    table += fmt::format("{:<16} {:>8} {:>8} {:>10.5f} {:>10.5f} {:>+7.2f}{}\n", m.protocol, m.trials, m.hits,
                         m.empirical, m.analytic, m.z, m.within ? "" : "  outside 3 sigma");
  }
  emit(g, protocol == "all" ? j : j[0], table);
  return ok ? kPass : kInvariant;
}

// ---- ribbon

Lattice parse_lattice(const std::string& spec, bool torus) {
  int w = 0, h = 0;
  char x = 0;
  std::istringstream in(spec);
  if (!(in >> w >> x >> h) || x != 'x' || !in.eof() || w < 1 || h < 1)
    throw InputError("lattice must look like WxH, got '" + spec + "'");
  try {
    return Lattice(w, h, torus ? Boundary::Torus : Boundary::Open);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

// micro:<z>,<v> | anyon:<label> | flux:<c>
std::function<WaveFunction(const RibbonPath&, const WaveFunction&)> parse_ribbon_label(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw InputError("label needs a kind prefix (micro:, anyon:, flux:): " + s);
  std::string kind = s.substr(0, colon), body = s.substr(colon + 1);
  try {
    if (kind == "micro") {
      auto comma = body.find(',');
      if (comma == std::string::npos) throw InputError("micro label is micro:<z>,<v>: " + s);
      MicroLabel f{parse_elem(body.substr(0, comma)), parse_elem(body.substr(comma + 1))};
      return [f](const RibbonPath& r, const WaveFunction& w) { return apply_ribbon(f, r, w); };
    }
    if (kind == "anyon") {
      AnyonLabel a = parse_label(body);
      return [a](const RibbonPath& r, const WaveFunction& w) { return apply_anyon_ribbon(a, r, w); };
    }
    if (kind == "flux") {
      Elem c = parse_elem(body);
      c_index(c);
      return [c](const RibbonPath& r, const WaveFunction& w) { return apply_flux_ribbon(c, r, w); };
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string(e.what()) + ": " + s);
  }
  throw InputError("unknown label kind '" + kind + "'");
}

int cmd_ribbon(const Global& g, const std::string& lattice, bool torus, const std::vector<std::string>& files,
               const std::vector<std::string>& labels, const std::string& state_in, const std::string& state_out,
               bool readout) {
  if (files.size() != labels.size()) throw InputError("give one --label per ribbon file");
  Lattice L = parse_lattice(lattice, torus);
  WaveFunction psi = state_in.empty() ? ground_state(L, Config(L.num_edges(), E)) : parse_state(L, read_file(state_in));
  json applied = json::array();
  for (size_t i = 0; i < files.size(); ++i) {
    RibbonPath r;
    try {
      r = parse_ribbon(L, read_file(files[i]));
    } catch (const InputError& e) {
      throw InputError(files[i] + ": " + e.what());
    }
    psi = parse_ribbon_label(labels[i])(r, psi);
    applied.push_back({{"file", files[i]}, {"label", labels[i]}, {"triangles", r.triangles.size()}});
  }
  const double norm = psi.norm();
  json j{{"lattice", lattice}, {"boundary", torus ? "torus" : "open"}, {"ribbons", applied}, {"norm", norm}};
  std::string table = fmt::format("norm {:.12g}\n", norm);
  if (norm < 1e-12) {
    j["annihilated"] = true;
    table += "state annihilated\n";
  } else {
    psi.normalize();
    j["terms"] = psi.size();
    json vs = json::array();
    try {
      for (const auto& v : violations(psi, g.tolerance)) {
        const char* kind = v.kind == ViolationKind::Flux ? "flux" : "charge";
        vs.push_back({{"kind", kind}, {"id", v.id}});
        table += fmt::format("{} violation at {} {}\n", kind, v.kind == ViolationKind::Flux ? "plaquette" : "vertex", v.id);
      }
      j["violations"] = vs;
      if (vs.empty()) table += "no violations\n";
    } catch (const MixedSyndrome& e) {
      j["violations"] = "mixed";
      table += std::string("mixed syndrome: ") + e.what() + "\n";
    }
    if (readout) {
      LogicalPatch patch = default_logical_patch();
      if (L.width() != patch.lattice.width() || L.height() != patch.lattice.height() || L.torus())
        throw InputError("--readout needs the 3x1 open logical patch");
      WaveFunction gs = ground_state(L, Config(L.num_edges(), E));
      std::array<WaveFunction, 3> comp{init_computational(patch, gs, 0), init_computational(patch, gs, 1),
                                       init_computational(patch, gs, 2)};
      LogicalReadout rd = read_logical(patch, comp, psi);
      json amps = json::array(), flux = json::array();
      for (int a = 0; a < 3; ++a) amps.push_back({rd.amps(a).real(), rd.amps(a).imag()});
      for (const auto& [k, p] : rd.flux) flux.push_back({{"t1", name(k.first)}, {"t2", name(k.second)}, {"p", p}});
      j["readout"] = {{"amplitudes", amps}, {"captured", rd.captured}, {"end_fluxes", flux}};
      table += fmt::format("logical readout: captured {:.12f}\n", rd.captured);
      for (int a = 0; a < 3; ++a) table += fmt::format("  |{}>: {:+.9f} {:+.9f}i\n", a, rd.amps(a).real(), rd.amps(a).imag());
    }
  }
  if (!state_out.empty()) {
    std::ofstream f(state_out);
    if (!f) throw InputError("cannot write " + state_out);
    f << dump_state(psi);
  }
  emit(g, j, table);
  return kPass;
}

// ---- circuit

int cmd_circuit(const Global& g, const std::string& file, const std::string& mode_name) {
  json spec;
  try {
    spec = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw InputError(file + ": " + e.what());
  }
  Circuit c = parse_circuit(spec);
  Mode mode = mode_name == "exact" ? Mode::Exact : Mode::Sampled;
  RunOutput out;
  try {
    out = run_circuit(c, mode, g.seed, g.caps);
  } catch (const LeakageError& e) {
    throw InputError(std::string("leakage: ") + e.what());
  }
  json j = run_to_json(out, mode);
  std::string table = fmt::format("mode {}, {} gate(s), {} branch(es)\n", mode_name, out.results.size(), out.branches.size());
  double failed_mass = 0;
  int failed_count = 0;
  for (const auto& b : out.branches) {
    if (b.failed && mode == Mode::Exact) {
      failed_mass += b.p;
      ++failed_count;
      continue;
    }
    table += fmt::format("  p={:.9f}{}{}", b.p, b.failed ? " failed" : "", b.error ? " misassigned" : "");
    if (!b.outcomes.empty()) {
      table += " outcomes";
      for (int o : b.outcomes) table += " " + std::to_string(o);
    }
    table += "\n";
  }
  if (failed_count) table += fmt::format("  p={:.9f} in {} cap-exhausted branch(es)\n", failed_mass, failed_count);
  if (j.contains("residual_probability"))
    table += fmt::format("residual probability {:.3g}\n", j["residual_probability"].get<double>());
  if (out.cap_exhausted) table += "cap exhausted\n";
  emit(g, j, table);
  return out.cap_exhausted ? kCap : kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact small-lattice simulator of the S3 quantum double"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--trials", g.trials, "Monte Carlo trials")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--tolerance", g.tolerance, "numerical tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--cap-sign-flip", g.caps.sign_flip, "sign-flip repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--cap-prep", g.caps.prep, "preparation rounds")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--cap-compare", g.caps.compare, "flux comparisons per measurement")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--cap-x-steps", g.caps.x_steps, "X-basis measurement steps")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "table"}))->capture_default_str();
  app.add_option("--out", g.out, "write the JSON result to this path");
  app.add_flag("--no-timing", g.no_timing, "omit wall-clock checks and times (byte-stable output)");

  auto* census = app.add_subcommand("census", "1x1 torus ground and single-particle census");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run invariant suites");
  verify->add_option("suite", suite, "algebra | ribbon | gates | stats | all")
      ->required()
      ->check(CLI::IsMember({"algebra", "ribbon", "gates", "stats", "all"}));

  std::string protocol;
  auto* mc = app.add_subcommand("mc", "Monte Carlo protocol statistics");
  mc->add_option("protocol", protocol, "protocol name or 'all'")->required();

  std::string lattice = "3x1", state_in, state_out;
  std::vector<std::string> ribbon_files, labels;
  bool torus = false, readout = false;
  auto* ribbon = app.add_subcommand("ribbon", "apply ribbon operators to a lattice state");
  ribbon->add_option("--lattice", lattice, "WxH")->capture_default_str();
  ribbon->add_flag("--torus", torus, "periodic boundary");
  ribbon->add_option("--ribbon", ribbon_files, "ribbon file; repeat to apply several in order")->required();
  ribbon->add_option("--label", labels, "micro:<z>,<v> | anyon:<C>:<R>:<c>:<j>:<c'>:<j'> | flux:<c>, one per ribbon")
      ->required();
  ribbon->add_option("--state-in", state_in, "state dump (default: ground state)");
  ribbon->add_option("--state-out", state_out, "write the resulting normalized state dump");
  ribbon->add_flag("--readout", readout, "logical qutrit readout on the 3x1 patch");

  std::string circuit_file, mode = "exact";
  auto* circuit = app.add_subcommand("circuit", "run a gate circuit");
  circuit->add_option("file", circuit_file, "circuit JSON")->required();
  circuit->add_option("--mode", mode, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kInput;
  }

  try {
    if (*census) return cmd_census(g);
    if (*verify) return cmd_verify(g, suite);
    if (*mc) return cmd_mc(g, protocol);
    if (*ribbon) return cmd_ribbon(g, lattice, torus, ribbon_files, labels, state_in, state_out, readout);
    if (*circuit) return cmd_circuit(g, circuit_file, mode);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kInput;
  }
  return kInput;
}
