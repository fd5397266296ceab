#include "s3qd/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "s3qd/logical.hpp"

namespace s3qd {

void Report::add(std::string check, bool pass, std::string detail) {
  checks.push_back({std::move(check), pass, std::move(detail)});
}
bool Report::ok() const { return failed() == 0; }
int Report::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.pass; }));
}
int Report::failed() const { return static_cast<int>(checks.size()) - passed(); }

void to_json(nlohmann::json& j, const Check& c) {
  j = nlohmann::json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
}

void to_json(nlohmann::json& j, const Report& r) {
  j = nlohmann::json{{"name", r.name}, {"pass", r.ok()}, {"passed", r.passed()}, {"failed", r.failed()}};
  if (r.seconds) j["seconds"] = *r.seconds;
  j["checks"] = r.checks;
}

void to_json(nlohmann::json& j, const McResult& r) {
  j = nlohmann::json{{"protocol", r.protocol}, {"description", r.description}, {"trials", r.trials},
                     {"hits", r.hits},         {"empirical", r.empirical},     {"analytic", r.analytic},
                     {"sigma", r.sigma},       {"z", r.z},                     {"within_3sigma", r.within}};
}

namespace {

using Clock = std::chrono::steady_clock;

// Runs body on a fresh report and stamps the wall time.
template <class F>
Report timed(std::string name, const VerifyOptions& o, F&& body) {
  Report r;
  r.name = std::move(name);
  auto t0 = Clock::now();
  body(r);
  if (o.timing) r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void runtime_check(Report& r, const VerifyOptions& o, Clock::time_point t0, double limit, const std::string& label) {
  if (!o.timing) return;
  double secs = since(t0);
  r.add("runtime < " + label, secs < limit, fmt::format("{:.2f} s", secs));
}

std::string worst(double d) { return fmt::format("max |diff| = {:.3g}", d); }

constexpr Orientation kBoth[] = {Orientation::CCW, Orientation::CW};

std::vector<Site> all_sites(const Lattice& L) {
  std::vector<Site> out;
  for (int v = 0; v < L.num_vertices(); ++v)
    for (int p = 0; p < L.num_plaquettes(); ++p)
      if (L.is_site({v, p})) out.push_back({v, p});
  return out;
}

std::vector<RibbonPath> all_ribbons(const Lattice& L, std::string_view word, Orientation o) {
  std::vector<RibbonPath> out;
  for (const Site& s : all_sites(L)) {
    try {
      out.push_back(trace_ribbon(L, s, word, o));
    } catch (const std::invalid_argument&) {
    }
  }
  return out;
}

MicroLabel random_label(Rng& rng) { return {static_cast<Elem>(rng.below(ORDER)), static_cast<Elem>(rng.below(ORDER))}; }

std::set<int> flagged(const std::vector<Violation>& vs, ViolationKind k) {
  std::set<int> out;
  for (const auto& v : vs)
    if (v.kind == k) out.insert(v.id);
  return out;
}

std::string ids(const std::set<int>& s) {
  std::string out = "{";
  for (int i : s) out += (out.size() > 1 ? "," : "") + std::to_string(i);
  return out + "}";
}

// ---- register helpers for the gate tables

Eigen::VectorXcd embed(const Eigen::VectorXcd& v, int n) {
  long d = 1;
  for (int k = 0; k < n; ++k) d *= 3;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
  for (long bits = 0; bits < (1L << n); ++bits) {
    long idx = 0;
    for (int k = 0; k < n; ++k) idx = idx * 3 + ((bits >> (n - 1 - k)) & 1);
    out(idx) = v(bits);
  }
  return out;
}

Register qubits(const Eigen::VectorXcd& v, int n) {
  Register r;
  r.n = n;
  r.psi = embed(v, n);
  return r;
}

Eigen::VectorXcd unit(long d, long k) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
  v(k) = 1;
  return v;
}

Branches single(const Register& r) {
  Branch b;
  b.reg = r;
  return {b};
}

// The heralded-correct branch; nullptr unless exactly one exists.
const Branch* good(const Branches& bs) {
  const Branch* g = nullptr;
  for (const auto& b : bs) {
    if (b.failed || b.error) continue;
    if (g) return nullptr;
    g = &b;
  }
  return g;
}

// Largest entrywise error of got against want, or phase-insensitive when projective.
double deviation(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want, bool projective) {
  if (got.size() != want.size()) return INFINITY;
  if (!projective) return (got - want).cwiseAbs().maxCoeff();
  cplx ov = want.dot(got);
  if (std::abs(ov) < 1e-300) return INFINITY;
  return (got * (std::conj(ov) / std::abs(ov)) - want).cwiseAbs().maxCoeff();
}

using BranchGate = std::function<void(Branches&, Exec&)>;

// Runs gate on input in exact mode; returns the deviation of the surviving branch.
double branch_deviation(const BranchGate& gate, const Register& in, const Eigen::VectorXcd& want, bool projective) {
  Exec ex(Mode::Exact);
  Branches bs = single(in);
  gate(bs, ex);
  const Branch* g = good(bs);
  if (!g) return INFINITY;
  return deviation(g->reg.psi, want, projective);
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Eigen::VectorXcd random_vector(Rng& rng, long d) {
  Eigen::VectorXcd v(d);
  for (long k = 0; k < d; ++k) v(k) = cplx(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return v.normalized();
}

FluxTarget single_flux(Elem f) {
  FluxTarget t;
  t.flux = {f};
  t.amp = Eigen::VectorXcd::Ones(1);
  return t;
}

std::uint64_t protocol_seed(std::uint64_t seed, std::string_view protocol) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : protocol) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return splitmix64(seed ^ h);
}

}  // namespace

// ---------------------------------------------------------------- census

Report verify_census(const VerifyOptions& o) {
  return timed("census", o, [&](Report& r) {
    auto t0 = Clock::now();
    Census c = census_1x1_torus();
    r.add("ground states = 8", c.ground == 8, fmt::format("ground = {}", c.ground));
    r.add("single-particle states = 28", c.single_particle == 28, fmt::format("excited = {}", c.single_particle));
    int c2 = 0, total = 0;
    for (const auto& row : c.rows) {
      total += row.states;
      if (row.flux == ClassLabel::C2) c2 += row.states;
    }
    r.add("no C2-flux single-particle states", c2 == 0, fmt::format("C2 row = {}", c2));
    r.add("rows sum to the excited count", total == c.single_particle);
    auto derived = derived_subgroup();
    bool inside = true;
    for (Elem a = 0; a < ORDER; ++a)
      for (Elem b = 0; b < ORDER; ++b)
        inside = inside && std::find(derived.begin(), derived.end(), c.flux[a][b]) != derived.end();
    r.add("torus fluxes lie in the commutator subgroup", inside);
    runtime_check(r, o, t0, 1.0, "1 s");
  });
}

// ---------------------------------------------------------------- stabilizer algebra

Report verify_drinfeld(const VerifyOptions& o) {
  return timed("drinfeld", o, [&](Report& r) {
    Lattice L(2, 2, Boundary::Open);
    Rng rng(o.seed, 2);
    auto sites = all_sites(L);
    double aa = 0, bb = 0, ab = 0, complete = 0;
    auto t0 = Clock::now();
    for (int trial = 0; trial < 20; ++trial) {
      WaveFunction psi = random_state(L, rng, 40);
      for (int v = 0; v < L.num_vertices(); ++v) {
        std::array<WaveFunction, ORDER> a{WaveFunction(L), WaveFunction(L), WaveFunction(L),
                                          WaveFunction(L), WaveFunction(L), WaveFunction(L)};
        for (Elem g = 0; g < ORDER; ++g) a[g] = apply_vertex(g, v, psi);
        for (Elem g1 = 0; g1 < ORDER; ++g1)
          for (Elem g2 = 0; g2 < ORDER; ++g2)
            aa = std::max(aa, max_diff(apply_vertex(g1, v, a[g2]), a[mul(g1, g2)]));
      }
      for (const Site& s : sites) {
        WaveFunction sum(L);
        for (Elem h1 = 0; h1 < ORDER; ++h1) {
          WaveFunction b1 = apply_plaquette(h1, s, psi);
          sum = sum + b1;
          for (Elem h2 = 0; h2 < ORDER; ++h2) {
            WaveFunction want = h1 == h2 ? b1 : WaveFunction(L);
            bb = std::max(bb, max_diff(apply_plaquette(h2, s, b1), want));
          }
          for (Elem g = 0; g < ORDER; ++g)
            ab = std::max(ab, max_diff(apply_vertex(g, s.vertex, b1),
                                       apply_plaquette(conj(g, h1), s, apply_vertex(g, s.vertex, psi))));
        }
        complete = std::max(complete, max_diff(sum, psi));
      }
    }
    r.add("A^g1 A^g2 = A^(g1 g2)", aa <= o.tolerance, worst(aa));
    r.add("B^h1 B^h2 = delta(h1,h2) B^h1", bb <= o.tolerance, worst(bb));
    r.add("A^g B^h = B^(g h g^-1) A^g", ab <= o.tolerance, worst(ab));
    r.add("sum_h B^h = 1", complete <= o.tolerance, worst(complete));
    runtime_check(r, o, t0, 10.0, "10 s");
  });
}

// ---------------------------------------------------------------- ribbon identities

Report verify_ribbon_identities(const VerifyOptions& o) {
  return timed("ribbon", o, [&](Report& r) {
    Lattice L(3, 3, Boundary::Open);
    Rng rng(o.seed, 3);
    const double tol = o.tolerance;
    auto t0 = Clock::now();

    // (a) recursive vs constructive, with a one-edge extension at each end on every fourth tuple
    {
      auto sites = all_sites(L);
      int done = 0;
      double d = 0;
      while (done < 100) {
        Orientation ori = rng.below(2) ? Orientation::CW : Orientation::CCW;
        std::string word;
        for (int n = 2 + static_cast<int>(rng.below(5)); n > 0; --n) word += rng.below(2) ? 'D' : 'U';
        RibbonPath rb;
        try {
          rb = trace_ribbon(L, sites[rng.below(sites.size())], word, ori);
          rb = make_ribbon(L, rb.triangles);
        } catch (const std::invalid_argument&) {
          continue;
        }
        if (done % 4 == 0) {
          std::set<int> used;
          for (const auto& t : rb.triangles) used.insert(t.edge);
          int s = rb.start().vertex, e = rb.end().vertex;
          for (int edge : L.vertex_edges(s))
            if (!used.count(edge)) {
              rb.z_prefix = {{edge, L.head(edge) == s ? 1 : -1}};
              break;
            }
          for (int edge : L.vertex_edges(e))
            if (!used.count(edge)) {
              rb.z_suffix = {{edge, L.tail(edge) == e ? 1 : -1}};
              break;
            }
          rb = make_ribbon(L, rb.triangles, rb.z_prefix, rb.z_suffix);
        }
        WaveFunction psi = random_state(L, rng, 30);
        MicroLabel f = random_label(rng);
        d = std::max(d, max_diff(apply_ribbon(f, rb, psi), apply_ribbon_recursive(f, rb, psi)));
        ++done;
      }
      r.add("(a) recursive = constructive on 100 tuples", d <= tol, worst(d));
    }

    // (b) closed loops
    {
      const int p = L.plaquette(1, 1);
      double d = 0;
      for (int trial = 0; trial < 3; ++trial) {
        WaveFunction psi = random_state(L, rng, 30);
        for (Orientation ori : kBoth)
          for (int c : L.plaquette_corners(p)) {
            RibbonPath rb = direct_loop(L, {c, p}, ori);
            for (Elem z = 0; z < ORDER; ++z) {
              WaveFunction want = apply_plaquette(ori == Orientation::CCW ? inv(z) : z, {c, p}, psi);
              for (Elem v = 0; v < ORDER; ++v) d = std::max(d, max_diff(apply_ribbon({z, v}, rb, psi), want));
            }
          }
      }
      r.add("(b) closed direct loop = plaquette projector, all labels", d <= tol,
            worst(d) + "; ccw reads B^(z^-1), cw reads B^z");
      const int s = L.vertex(1, 1);
      double dv = 0, dz = 0;
      for (int trial = 0; trial < 3; ++trial) {
        WaveFunction psi = random_state(L, rng, 30);
        for (Orientation ori : kBoth)
          for (int q : {L.plaquette(0, 0), L.plaquette(1, 0), L.plaquette(1, 1), L.plaquette(0, 1)}) {
            RibbonPath rb = dual_loop(L, {s, q}, ori);
            for (Elem v = 0; v < ORDER; ++v) {
              dv = std::max(dv, max_diff(apply_ribbon({E, v}, rb, psi),
                                         apply_vertex(ori == Orientation::CCW ? v : inv(v), s, psi)));
              for (Elem z = 1; z < ORDER; ++z) dz = std::max(dz, apply_ribbon({z, v}, rb, psi).norm());
            }
          }
      }
      r.add("(b) closed dual loop = vertex operator, all labels", dv <= tol && dz <= tol,
            fmt::format("z = e: {}; z != e: max norm {:.3g}", worst(dv), dz));
    }

    // (c) start/end commutation relations and composition
    for (Orientation ori : kBoth) {
      const bool ccw = ori == Orientation::CCW;
      const std::string tag = ccw ? "ccw" : "cw";
      RibbonPath rb = trace_ribbon(L, {ccw ? L.vertex(0, 1) : L.vertex(0, 2), L.plaquette(0, 1)}, "DUDUD", ori);
      double sv = 0, ev = 0, sp = 0, ep = 0, printed = 0;
      auto F = [&](MicroLabel f, const WaveFunction& w) { return apply_ribbon(f, rb, w); };
      for (int trial = 0; trial < 2; ++trial) {
        WaveFunction psi = random_state(L, rng, 40);
        for (Elem z = 0; z < ORDER; ++z)
          for (Elem v = 0; v < ORDER; ++v) {
            WaveFunction Fpsi = F({z, v}, psi);
            const Elem w = mul(mul(inv(z), inv(v)), z);
            for (Elem g = 0; g < ORDER; ++g) {
              const Elem gb = inv(g);
              sv = std::max(sv, max_diff(apply_vertex(g, rb.start().vertex, Fpsi),
                                         F({mul(g, z), mul(mul(g, v), gb)}, apply_vertex(g, rb.start().vertex, psi))));
              ev = std::max(ev, max_diff(apply_vertex(g, rb.end().vertex, Fpsi),
                                         F({mul(z, gb), v}, apply_vertex(g, rb.end().vertex, psi))));
              const Elem h = g;
              sp = std::max(sp, max_diff(apply_plaquette(h, rb.start(), Fpsi),
                                         F({z, v}, apply_plaquette(ccw ? mul(h, v) : mul(v, h), rb.start(), psi))));
              WaveFunction lhs = apply_plaquette(h, rb.end(), Fpsi);
              ep = std::max(ep, max_diff(lhs, F({z, v}, apply_plaquette(ccw ? mul(w, h) : mul(h, w), rb.end(), psi))));
              const Elem hp = ccw ? mul(w, inv(h)) : mul(mul(mul(inv(z), v), z), h);
              printed = std::max(printed, max_diff(lhs, F({z, v}, apply_plaquette(hp, rb.end(), psi))));
            }
          }
      }
      r.add("(c) start vertex relation, " + tag, sv <= tol, worst(sv));
      r.add("(c) end vertex relation, " + tag, ev <= tol, worst(ev));
      r.add("(c) start plaquette relation, " + tag, sp <= tol, worst(sp));
      r.add("(c) end plaquette relation as printed, " + tag, printed <= tol,
            fmt::format("{}; the form {} holds with {}", worst(printed),
                        ccw ? "B^h F = F B^(z^-1 v^-1 z h)" : "B^h F = F B^(h z^-1 v^-1 z)", worst(ep)));
      r.add("(c) end plaquette relation, corrected form, " + tag, ep <= tol, worst(ep));

      double comp = 0;
      for (const char* word : {"DUDUD", "UDUD", "DDUU"}) {
        RibbonPath cr = all_ribbons(L, word, ori).front();
        WaveFunction psi = random_state(L, rng, 40);
        for (int t = 0; t < 40; ++t) {
          MicroLabel f1 = random_label(rng), f2 = random_label(rng);
          WaveFunction lhs = apply_ribbon(f1, cr, apply_ribbon(f2, cr, psi));
          WaveFunction rhs(L);
          if (f1.z == f2.z) rhs = apply_ribbon({f1.z, ccw ? mul(f1.v, f2.v) : mul(f2.v, f1.v)}, cr, psi);
          comp = std::max(comp, max_diff(lhs, rhs));
        }
      }
      r.add("(c) composition on one ribbon, " + tag, comp <= tol, worst(comp));
    }

    // (d) exchange lemma
    for (Orientation ori : kBoth) {
      std::vector<RibbonPath> rs;
      for (const char* w : {"DU", "UD", "DUD", "UDU", "DUDU", "UDUD"})
        for (auto& rb : all_ribbons(L, w, ori)) rs.push_back(rb);
      int pairs = 0;
      double d = 0;
      for (const auto& t1 : rs) {
        for (const auto& t2 : rs) {
          if (pairs >= 12) break;
          try {
            check_exchange_geometry(t1, t2);
          } catch (const std::invalid_argument&) {
            continue;
          }
          ++pairs;
          WaveFunction psi = random_state(L, rng, 30);
          for (int t = 0; t < 20; ++t) {
            MicroLabel f1 = random_label(rng), f2 = random_label(rng);
            d = std::max(d, max_diff(apply_ribbon(f2, t2, apply_ribbon(f1, t1, psi)),
                                     apply_ribbon(exchange_label(ori, f1, f2), t1, apply_ribbon(f2, t2, psi))));
          }
        }
      }
      r.add(std::string("(d) exchange lemma, ") + (ori == Orientation::CCW ? "ccw" : "cw"), pairs == 12 && d <= tol,
            fmt::format("{} ribbon pairs, {}", pairs, worst(d)));
    }

    runtime_check(r, o, t0, 60.0, "60 s");
  });
}

// ---------------------------------------------------------------- basis change

Report verify_basis_change(const VerifyOptions& o) {
  return timed("basis_change", o, [](Report& r) {
    double unit_err = 0, support = 0;
    for (Elem wf = 0; wf < ORDER; ++wf) {
      Eigen::MatrixXcd M = basis_change(wf);
      unit_err = std::max(unit_err, (M.adjoint() * M - Eigen::MatrixXcd::Identity(M.cols(), M.cols())).cwiseAbs().maxCoeff());
      auto labels = sector_labels(wf);
      for (long k = 0; k < M.cols(); ++k)
        for (Elem z = 0; z < ORDER; ++z)
          if (conj(z, wf) != labels[k].c) support = std::max(support, std::abs(M(z, k)));
    }
    r.add("unitary in every sector", unit_err <= 1e-12, worst(unit_err));
    r.add("columns carry the labelled local flux", support <= 1e-12, worst(support));

    const double s = 1 / std::sqrt(3.0);
    const cplx w = omega(), wb = std::conj(w);
    struct Printed {
      const char* name;
      AnyonLabel label;
      Elem wf;
      std::map<Elem, cplx> amps;
    };
    const std::vector<Printed> printed{
        {"[1] (u,u)", {ClassLabel::C3, "1", MU, 1, MU, 1}, MU, {{E, s}, {MU, s}, {MUB, s}}},
        {"[1] (U,U)", {ClassLabel::C3, "1", MUB, 1, MUB, 1}, MUB, {{E, s}, {MU, s}, {MUB, s}}},
        {"[1] (U,u)", {ClassLabel::C3, "1", MUB, 1, MU, 1}, MU, {{SIG, s}, {MUBSIG, s}, {MUSIG, s}}},
        {"[1] (u,U)", {ClassLabel::C3, "1", MU, 1, MUB, 1}, MUB, {{SIG, s}, {MUBSIG, s}, {MUSIG, s}}},
        {"[w] (u,u)", {ClassLabel::C3, "w", MU, 1, MU, 1}, MU, {{E, s}, {MU, w * s}, {MUB, wb * s}}},
    };
    for (const auto& p : printed) {
      auto got = anyon_to_micro({{p.label, 1.0}});
      double d = 0;
      for (Elem z = 0; z < ORDER; ++z)
        for (Elem wf = 0; wf < ORDER; ++wf) {
          cplx have = 0;
          for (const auto& t : got)
            if (t.z == z && t.w == wf) have += t.amp;
          cplx want = (wf == p.wf && p.amps.count(z)) ? p.amps.at(z) : cplx(0);
          d = std::max(d, std::abs(have - want));
        }
      r.add(std::string("printed C3 state ") + p.name, d <= 1e-12, worst(d));
    }
  });
}

// ---------------------------------------------------------------- generalized ribbons

Report verify_generalized_ribbons(const VerifyOptions& o) {
  return timed("generalized_ribbons", o, [&](Report& r) {
    Lattice L(2, 1, Boundary::Open);
    WaveFunction gs = ground_state(L, Config(L.num_edges(), E));
    RibbonPath base = trace_ribbon(L, {L.vertex(0, 0), 0}, "DUD", Orientation::CCW);
    const std::set<int> ends{base.start().plaquette, base.end().plaquette};
    struct Case {
      const char* name;
      std::vector<SignedEdge> prefix, suffix;
    };
    const std::vector<Case> cases{
        {"one-edge extension at each end", {{L.vedge(0, 0), -1}}, {{L.vedge(2, 0), 1}}},
        {"two-edge prefix", {{L.hedge(0, 1), -1}, {L.vedge(0, 0), -1}}, {}},
        {"two-edge suffix", {}, {{L.vedge(2, 0), 1}, {L.hedge(1, 1), -1}}},
    };
    for (const auto& c : cases) {
      RibbonPath ext = make_ribbon(L, base.triangles, c.prefix, c.suffix);
      const std::set<int> want_charge{ext.start_vertex(L), ext.end_vertex(L)};
      bool ok = true;
      std::string bad;
      for (Elem z = 0; z < ORDER; ++z)
        for (Elem v = 0; v < ORDER; ++v) {
          auto vs = violations(apply_ribbon({z, v}, ext, gs), o.tolerance);
          auto ch = flagged(vs, ViolationKind::Charge), fl = flagged(vs, ViolationKind::Flux);
          const std::set<int> want_flux = v == E ? std::set<int>{} : ends;
          if (ch != want_charge || fl != want_flux) {
            if (ok) bad = fmt::format("(z,v)=({},{}): charge {} flux {}", name(z), name(v), ids(ch), ids(fl));
            ok = false;
          }
        }
      r.add(std::string(c.name) + ": violations only at the end plaquettes and extended end vertices", ok,
            ok ? fmt::format("charge at {}, flux at {} for v != e", ids(want_charge), ids(ends)) : bad);
    }
    // prepending direct edges moves the start charge and nothing else
    RibbonPath ext = make_ribbon(L, base.triangles, {{L.vedge(0, 0), -1}}, {});
    bool moved = true;
    for (Elem z = 0; z < ORDER; ++z)
      for (Elem v : {MU, SIG}) {
        auto plain = violations(apply_ribbon({z, v}, base, gs), o.tolerance);
        auto shifted = violations(apply_ribbon({z, v}, ext, gs), o.tolerance);
        moved = moved && flagged(plain, ViolationKind::Charge) == std::set<int>{L.vertex(0, 0), L.vertex(2, 0)} &&
                flagged(shifted, ViolationKind::Charge) == std::set<int>{L.vertex(0, 1), L.vertex(2, 0)} &&
                flagged(shifted, ViolationKind::Flux) == flagged(plain, ViolationKind::Flux);
      }
    r.add("prepended edge relocates the start charge from vertex (0,0) to (0,1)", moved);
  });
}

// ---------------------------------------------------------------- lattice initialization

Report verify_lattice_init(const VerifyOptions& o) {
  return timed("lattice_init", o, [](Report& r) {
    LogicalPatch patch = default_logical_patch();
    WaveFunction gs = ground_state(patch.lattice, Config(patch.lattice.num_edges(), E));
    std::array<WaveFunction, 3> comp{init_computational(patch, gs, 0), init_computational(patch, gs, 1),
                                     init_computational(patch, gs, 2)};
    const double tol = 1e-9;
    for (int a = 0; a < 3; ++a) {
      LogicalReadout rd = read_logical(patch, comp, comp[a]);
      double d = fidelity_deficit(rd, ket(a));
      bool labels = rd.flux.size() == 1 && rd.flux.begin()->first == std::pair{c_flux(a), c_flux(a)};
      r.add(fmt::format("|{}> readout", a), d <= tol && labels,
            fmt::format("fidelity deficit {:.3g}; end fluxes ({},{})", d, name(rd.flux.begin()->first.first),
                        name(rd.flux.begin()->first.second)));
    }
    for (int i = 0; i < 3; ++i) {
      LogicalReadout rd = read_logical(patch, comp, init_dual(comp, i));
      double d = fidelity_deficit(rd, dual_ket(i));
      r.add(fmt::format("|{}~> readout", i), d <= tol, fmt::format("fidelity deficit {:.3g}, captured {:.12f}", d, rd.captured));
    }
    WaveFunction s = comp[0];
    s.normalize();
    auto vs = violations(s);
    auto fl = flagged(vs, ViolationKind::Flux);
    r.add("flux only at the two end plaquettes", fl == std::set<int>{patch.t1.end().plaquette, patch.t2.end().plaquette},
          "flux at " + ids(fl));
  });
}

// ---------------------------------------------------------------- gate truth tables

Report verify_gate_tables(const VerifyOptions& o) {
  return timed("gate_tables", o, [&](Report& r) {
    const double tol = o.tolerance;
    const Caps caps = o.caps;
    auto mod3 = [](int x) { return ((x % 3) + 3) % 3; };

    auto two_qutrit = [&](const char* label, const std::function<void(Register&)>& g, const std::function<int(int, int)>& out) {
      double d = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          Register reg = Register::product({ket(a), ket(b)});
          g(reg);
          d = std::max(d, deviation(reg.psi, unit(9, 3 * a + out(a, b)), false));
        }
      r.add(label, d <= tol, worst(d) + " over 9 entries");
    };
    two_qutrit("U |a,b> = |a,-a-b>", [](Register& g) { gate_U(g, 0, 1); }, [&](int a, int b) { return mod3(-a - b); });
    two_qutrit("U+ |a,b> = |a,b+a>", [](Register& g) { gate_U_plus(g, 0, 1); }, [&](int a, int b) { return mod3(a + b); });
    two_qutrit("U- |a,b> = |a,b-a>", [](Register& g) { gate_U_minus(g, 0, 1); }, [&](int a, int b) { return mod3(b - a); });

    {
      double d = 0;
      for (int a = 0; a < 3; ++a) {
        Register reg = Register::product({ket(a)});
        qutrit_Z(reg, 0);
        d = std::max(d, deviation(reg.psi, std::pow(omega(), a) * ket(a), false));
      }
      r.add("qutrit Z |a> = w^a |a>", d <= tol, worst(d));
    }

    {
      // sign flip sigma_which on each basis state, and on the uniform superposition for the relative sign
      double d = 0;
      double fail = 0;
      for (int which = 0; which < 3; ++which) {
        auto gate = [&](Branches& bs, Exec& ex) { fail = std::max(fail, sign_flip(bs, 0, which, ex, caps).residual_error); };
        for (int a = 0; a < 3; ++a)
          d = std::max(d, branch_deviation(gate, Register::product({ket(a)}), ket(a), true));
        Qutrit u = Qutrit::Ones() / std::sqrt(3.0), want = u;
        want(which) = -want(which);
        d = std::max(d, branch_deviation(gate, Register::product({u}), want, true));
      }
      r.add("sign flips sigma_0, sigma_1, sigma_2", d <= tol,
            fmt::format("{} over 3x3 entries; cap-exhaustion residual {:.3g}", worst(d), fail));
    }

    {
      double d = 0;
      for (int x = 0; x < 2; ++x) {
        Register reg = Register::product({ket(x)});
        qubit_X(reg, 0);
        d = std::max(d, deviation(reg.psi, ket(1 - x), false));
      }
      r.add("qubit X", d <= tol, worst(d) + " over 2 entries");
    }

    auto bits_of = [](int bits, int n) {
      std::vector<Qutrit> qs;
      for (int k = n - 1; k >= 0; --k) qs.push_back(ket((bits >> k) & 1));
      return Register::product(qs);
    };

    Eigen::MatrixXcd czm = Eigen::MatrixXcd::Identity(4, 4), cczm = Eigen::MatrixXcd::Identity(8, 8);
    czm(3, 3) = -1;
    cczm(7, 7) = -1;
    {
      double d = 0;
      auto gate = [&](Branches& bs, Exec& ex) { cz(bs, 0, 1, ex, caps); };
      for (int bits = 0; bits < 4; ++bits)
        d = std::max(d, branch_deviation(gate, bits_of(bits, 2), embed(czm.col(bits), 2), false));
      r.add("CZ", d <= tol, worst(d) + " over 4 entries");
    }
    {
      double d = 0;
      auto gate = [&](Branches& bs, Exec& ex) { ccz(bs, 0, 1, 2, ex, caps); };
      for (int bits = 0; bits < 8; ++bits)
        d = std::max(d, branch_deviation(gate, bits_of(bits, 3), embed(cczm.col(bits), 3), false));
      r.add("CCZ", d <= tol, worst(d) + " over 8 entries");
    }
    {
      // the operator CCZ (X x I x I) CCZ, column by column, against X x CZ
      Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(2, 2);
      X(0, 1) = X(1, 0) = 1;
      Eigen::MatrixXcd want = kron(X, czm);
      Eigen::MatrixXcd got = Eigen::MatrixXcd::Zero(8, 8);
      bool complete = true;
      for (int bits = 0; bits < 8; ++bits) {
        Exec ex(Mode::Exact);
        Branches bs = single(bits_of(bits, 3));
        ccz(bs, 0, 1, 2, ex, caps);
        for (auto& b : bs)
          if (!b.failed) qubit_X(b.reg, 0);
        ccz(bs, 0, 1, 2, ex, caps);
        const Branch* g = good(bs);
        if (!g) {
          complete = false;
          continue;
        }
        for (int k = 0; k < 8; ++k) got(k, bits) = embed(unit(8, k), 3).dot(g->reg.psi);
      }
      double d = complete ? (got - want).cwiseAbs().maxCoeff() : INFINITY;
      r.add("CCZ (X x I x I) CCZ = X x CZ as an 8x8 operator", d <= tol, worst(d));
    }

    Eigen::Matrix2cd H, S;
    H << 1, 1, 1, -1;
    H /= std::sqrt(2.0);
    S << 1, 0, 0, cplx(0, 1);
    Rng rng(o.seed, 7);
    auto qubit_gate = [&](const char* label, const BranchGate& gate, const Eigen::Matrix2cd& m) {
      double d = 0, residual = 0;
      auto gate_r = [&](Branches& bs, Exec& ex) {
        gate(bs, ex);
        double live = 0, bad = 0;
        for (const auto& b : bs) {
          live += b.p;
          if (b.failed || b.error) bad += b.p;
        }
        residual = std::max(residual, bad / live);
      };
      for (int x = 0; x < 2; ++x)
        d = std::max(d, branch_deviation(gate_r, bits_of(x, 1), embed(m.col(x), 1), true));
      // relative phase between the columns
      for (int t = 0; t < 4; ++t) {
        Eigen::VectorXcd v = random_vector(rng, 2);
        d = std::max(d, branch_deviation(gate_r, qubits(v, 1), embed(m * v, 1), true));
      }
      r.add(label, d <= tol,
            fmt::format("{} over 2 entries and 4 superpositions (projective); misassignment residual {:.3g}", worst(d),
                        residual));
    };
    qubit_gate("H", [&](Branches& bs, Exec& ex) { hadamard(bs, 0, ex, caps); }, H);
    qubit_gate("S", [&](Branches& bs, Exec& ex) { phase_s(bs, 0, ex, caps); }, S);
  });
}

// ---------------------------------------------------------------- protocol statistics

std::vector<std::string> mc_protocols() {
  return {"flux_c3",     "flux_c3_4rounds", "flux_c2", "x_step",        "x_residual",
          "plus_prep",   "plus_prep_5",     "xi_prep", "signflip_N1",   "signflip_N11",
          "signflip_N35"};
}

McResult run_mc(std::string_view protocol, long trials, std::uint64_t seed, const Caps& caps_in) {
  if (trials < 1) throw InputError("trials must be at least 1");
  McResult res;
  res.protocol = std::string(protocol);
  res.trials = trials;
  Exec ex(Mode::Sampled, protocol_seed(seed, protocol));
  Caps caps = caps_in;
  std::function<bool()> trial;

  if (protocol == "flux_c3" || protocol == "flux_c3_4rounds") {
    const int rounds = protocol == "flux_c3" ? 1 : 4;
    res.description = fmt::format("C3 flux read as vacuum in {} consecutive round(s)", rounds);
    res.analytic = std::pow(0.25, rounds);
    trial = [&ex, rounds] {
      auto run = measure_flux_channel(single_flux(MU), rounds, ex.rng());
      return std::all_of(run.outcomes.begin(), run.outcomes.end(), [](FluxOutcome x) { return x == FluxOutcome::Vacuum; });
    };
  } else if (protocol == "flux_c2") {
    res.description = "C2 flux remnant is [2]+ (versus [2]-)";
    res.analytic = 0.5;
    trial = [&ex] { return measure_flux_channel(single_flux(SIG), 1, ex.rng()).outcomes[0] == FluxOutcome::TwoPlus; };
  } else if (protocol == "x_step" || protocol == "x_residual") {
    const bool step = protocol == "x_step";
    if (step) caps.x_steps = 1;
    res.description = step ? "one dual-basis step on |+> answers yes"
                           : fmt::format("|+> misread as |-> after {} steps", caps.x_steps);
    res.analytic = step ? 8.0 / 9.0 : std::pow(1.0 / 9.0, caps.x_steps);
    trial = [&ex, &caps, step] {
      Branch b;
      b.reg = Register::product({plus_ket()});
      auto kids = measure_qubit_x(b, 0, ex, caps);
      return step ? kids.front().first == 0 : kids.front().second.error;
    };
  } else if (protocol == "plus_prep" || protocol == "plus_prep_5") {
    caps.prep = protocol == "plus_prep" ? 1 : 5;
    res.description = fmt::format("|+> prepared within {} round(s)", caps.prep);
    res.analytic = 1 - std::pow(1.0 / 3.0, caps.prep);
    trial = [&ex, &caps] { return !prepare_plus(ex, caps).front().failed; };
  } else if (protocol == "xi_prep") {
    res.description = "xi prepared on the first attempt";
    res.analytic = 0.25;
    trial = [&ex, &caps] {
      const Branch& b = prepare_xi(ex, caps).front();
      return !b.failed && b.reps == 1;
    };
  } else if (protocol.substr(0, 10) == "signflip_N") {
    int n = 0;
    try {
      size_t used = 0;
      n = std::stoi(std::string(protocol.substr(10)), &used);
      if (used != protocol.size() - 10) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
    if (n < 1 || n % 2 == 0) throw InputError("signflip_N<k> needs odd k >= 1: " + std::string(protocol));
    caps.sign_flip = n;
    res.description = fmt::format("sign flip sigma_2 concludes within {} repetitions", n);
    res.analytic = sign_flip_success(n);
    trial = [&ex, &caps] {
      Branches bs = single(Register::product({ket(0)}));
      sign_flip(bs, 0, 2, ex, caps);
      return !bs.front().failed;
    };
  } else {
    throw InputError("unknown protocol: " + std::string(protocol));
  }

  for (long t = 0; t < trials; ++t) res.hits += trial();
  res.empirical = double(res.hits) / trials;
  res.sigma = std::sqrt(res.analytic * (1 - res.analytic) / trials);
  res.z = res.sigma > 0 ? (res.empirical - res.analytic) / res.sigma : (res.empirical == res.analytic ? 0 : INFINITY);
  res.within = std::abs(res.z) <= 3;
  return res;
}

Report verify_statistics(const VerifyOptions& o) {
  return timed("statistics", o, [&](Report& r) {
    auto t0 = Clock::now();
    for (const auto& p : mc_protocols()) {
      McResult m = run_mc(p, o.trials, o.seed, o.caps);
      r.add(p + ": " + m.description, m.within,
            fmt::format("{}/{} = {:.5f}, analytic {:.5f}, z = {:+.2f}", m.hits, m.trials, m.empirical, m.analytic, m.z));
    }
    r.add("(1/4)^4 < 0.5%", std::pow(0.25, 4) < 0.005);
    Caps c = o.caps;
    r.add("X-basis residual (1/9)^n < 1%", std::pow(1.0 / 9.0, c.x_steps) < 0.01, fmt::format("n = {}", c.x_steps));
    r.add("1 - (1/3)^5 >= 99%", 1 - std::pow(1.0 / 3.0, 5) >= 0.99);
    r.add("p(35) >= 0.99", sign_flip_success(35) >= 0.99, fmt::format("p(35) = {:.5f}", sign_flip_success(35)));
    runtime_check(r, o, t0, 300.0, "5 min");
  });
}

// ---------------------------------------------------------------- charge transfer

Report verify_charge_transfer(const VerifyOptions& o) {
  return timed("charge_transfer", o, [](Report& r) {
    for (const Irrep& R : irreps(GroupKind::S3))
      for (Elem a = 0; a < ORDER; ++a) {
        double law = std::norm(character(R, a) / double(R.dim));
        double sim = simulated_charge_transfer(R, a);
        double tab = charge_transfer_prob(R, class_of(a));
        double d = std::max(std::abs(sim - law), std::abs(tab - law));
        r.add(fmt::format("[{}] around {}", R.label, name(a)), d <= 1e-12,
              fmt::format("Prob(0) = {:.6f}, simulated {:.6f}", law, sim));
      }
  });
}

// ---------------------------------------------------------------- fusion

Report verify_fusion(const VerifyOptions& o) {
  return timed("fusion", o, [](Report& r) {
    const auto& types = anyon_types();
    int asym = 0, dim_bad = 0, dsum = 0;
    for (const auto& a : types) {
      dsum += a.qdim * a.qdim;
      for (const auto& b : types) {
        auto ab = fuse(a.letter, b.letter);
        if (ab != fuse(b.letter, a.letter)) ++asym;
        int s = 0;
        for (char c : ab) s += anyon(c).qdim;
        if (s != a.qdim * b.qdim) ++dim_bad;
      }
    }
    r.add("a x b = b x a for all 64 pairs", asym == 0, fmt::format("{} asymmetric pairs", asym));
    r.add("d_a d_b = sum_c d_c for all 64 pairs", dim_bad == 0, fmt::format("{} mismatches", dim_bad));
    r.add("sum d^2 = 36", dsum == 36, fmt::format("sum = {}", dsum));
  });
}

std::vector<Report> verify_suite(std::string_view suite, const VerifyOptions& o) {
  using Fn = Report (*)(const VerifyOptions&);
  std::vector<Fn> fns;
  if (suite == "algebra" || suite == "all")
    for (Fn f : {verify_census, verify_drinfeld, verify_basis_change, verify_charge_transfer, verify_fusion}) fns.push_back(f);
  if (suite == "ribbon" || suite == "all")
    for (Fn f : {verify_ribbon_identities, verify_generalized_ribbons, verify_lattice_init}) fns.push_back(f);
  if (suite == "gates" || suite == "all") fns.push_back(verify_gate_tables);
  if (suite == "stats" || suite == "all") fns.push_back(verify_statistics);
  if (fns.empty()) throw InputError("unknown suite: " + std::string(suite) + " (algebra, ribbon, gates, stats, all)");
  std::vector<Report> out;
  for (Fn f : fns) out.push_back(f(o));
  return out;
}

}  // namespace s3qd
