#include "s3qd/state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace s3qd {

WaveFunction::WaveFunction(const Lattice& L) : lat_(L) {
  if (L.num_edges() > kMaxEdges) throw std::invalid_argument("lattice has too many edges for packed keys");
}

WaveFunction WaveFunction::basis(const Lattice& L, const Config& c) {
  WaveFunction w(L);
  w.add(c, 1.0);
  return w;
}

Key WaveFunction::encode(const Config& c) const {
  if (static_cast<int>(c.size()) != num_edges()) throw std::invalid_argument("configuration size mismatch");
  Key k = 0;
  for (Elem g : c) {
    if (g >= ORDER) throw std::invalid_argument("bad group element in configuration");
    k = (k << 3) | Key(g);
  }
  return k;
}

Config WaveFunction::decode(Key k) const {
  Config c(num_edges());
  for (int e = 0; e < num_edges(); ++e) c[e] = get(k, e);
  return c;
}

cplx WaveFunction::amplitude(const Config& c) const { return amplitude(encode(c)); }

cplx WaveFunction::amplitude(Key k) const {
  auto it = amps_.find(k);
  return it == amps_.end() ? cplx(0) : it->second;
}

double WaveFunction::norm() const {
  double s = 0;
  for (auto& [k, a] : amps_) s += std::norm(a);
  return std::sqrt(s);
}

WaveFunction& WaveFunction::normalize() {
  double n = norm();
  if (n == 0) throw std::domain_error("cannot normalize the zero state");
  for (auto& [k, a] : amps_) a /= n;
  return prune();
}

WaveFunction& WaveFunction::prune(double eps) {
  std::erase_if(amps_, [eps](const auto& kv) { return std::abs(kv.second) < eps; });
  return *this;
}

WaveFunction& WaveFunction::scale(cplx a) {
  for (auto& [k, v] : amps_) v *= a;
  return prune();
}

std::vector<std::pair<Key, cplx>> WaveFunction::sorted() const {
  std::vector<std::pair<Key, cplx>> v(amps_.begin(), amps_.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return v;
}

cplx inner(const WaveFunction& a, const WaveFunction& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  cplx s = 0;
  for (auto& [k, x] : small.terms()) {
    cplx y = large.amplitude(k);
    s += &small == &a ? std::conj(x) * y : std::conj(y) * x;
  }
  return s;
}

WaveFunction operator+(const WaveFunction& a, const WaveFunction& b) {
  WaveFunction r = a;
  for (auto& [k, x] : b.terms()) r.add(k, x);
  return r.prune();
}

WaveFunction operator-(const WaveFunction& a, const WaveFunction& b) {
  WaveFunction r = a;
  for (auto& [k, x] : b.terms()) r.add(k, -x);
  return r.prune();
}

WaveFunction operator*(cplx s, const WaveFunction& a) {
  WaveFunction r = a;
  return r.scale(s);
}

double max_diff(const WaveFunction& a, const WaveFunction& b) {
  double m = 0;
  for (auto& [k, x] : a.terms()) m = std::max(m, std::abs(x - b.amplitude(k)));
  for (auto& [k, y] : b.terms())
    if (!a.terms().count(k)) m = std::max(m, std::abs(y));
  return m;
}

WaveFunction map_terms(const WaveFunction& psi, const std::function<std::pair<Key, cplx>(Key)>& f) {
  WaveFunction out(psi.lattice());
  for (auto& [k, a] : psi.terms()) {
    auto [k2, ph] = f(k);
    if (ph != cplx(0)) out.add(k2, ph * a);
  }
  return out.prune();
}

WaveFunction filter_terms(const WaveFunction& psi, const std::function<bool(Key)>& keep) {
  WaveFunction out(psi.lattice());
  for (auto& [k, a] : psi.terms())
    if (keep(k)) out.add(k, a);
  return out;
}

Elem path_product(const WaveFunction& psi, Key k, const std::vector<SignedEdge>& path) {
  Elem x = E;
  for (const auto& s : path) {
    Elem g = psi.get(k, s.edge);
    x = mul(x, s.sign > 0 ? g : inv(g));
  }
  return x;
}

namespace {

struct StarEdge {
  int edge;
  bool out, in;
};

std::vector<StarEdge> star(const Lattice& L, int s) {
  std::vector<StarEdge> st;
  for (int e : L.vertex_edges(s)) st.push_back({e, L.tail(e) == s, L.head(e) == s});
  return st;
}

Key act_vertex(const WaveFunction& psi, const std::vector<StarEdge>& st, Elem g, Key k) {
  Elem gb = inv(g);
  for (const auto& se : st) {
    Elem x = psi.get(k, se.edge);
    if (se.out) x = mul(g, x);
    if (se.in) x = mul(x, gb);
    k = psi.set(k, se.edge, x);
  }
  return k;
}

}  // namespace

WaveFunction apply_vertex(Elem g, int s, const WaveFunction& psi) {
  const Lattice& L = psi.lattice();
  L.check_vertex(s);
  auto st = star(L, s);
  return map_terms(psi, [&](Key k) { return std::pair<Key, cplx>{act_vertex(psi, st, g, k), 1.0}; });
}

Elem holonomy(const WaveFunction& psi, Key k, const Site& site) {
  return path_product(psi, k, psi.lattice().boundary_cycle(site));
}

WaveFunction apply_plaquette(Elem h, const Site& site, const WaveFunction& psi) {
  if (!psi.lattice().is_site(site)) throw std::invalid_argument("invalid site");
  auto cyc = psi.lattice().boundary_cycle(site);
  Elem target = inv(h);
  return filter_terms(psi, [&](Key k) { return path_product(psi, k, cyc) == target; });
}

WaveFunction vertex_projector(int s, const WaveFunction& psi) {
  WaveFunction out(psi.lattice());
  for (Elem g = 0; g < ORDER; ++g) {
    WaveFunction moved = apply_vertex(g, s, psi);
    for (auto& [k, a] : moved.terms()) out.add(k, a / double(ORDER));
  }
  return out.prune();
}

WaveFunction plaquette_projector(int p, const WaveFunction& psi) {
  return apply_plaquette(E, {psi.lattice().plaquette_corners(p)[0], p}, psi);
}

WaveFunction ground_state(const Lattice& L, const Config& rep) {
  WaveFunction seed = WaveFunction::basis(L, rep);
  Key k0 = seed.encode(rep);
  for (int p = 0; p < L.num_plaquettes(); ++p)
    if (holonomy(seed, k0, {L.plaquette_corners(p)[0], p}) != E)
      throw std::invalid_argument("representative carries flux at plaquette " + std::to_string(p));

  std::vector<std::vector<StarEdge>> stars;
  for (int v = 0; v < L.num_vertices(); ++v) stars.push_back(star(L, v));

  // Gauge moves at different vertices commute, so the orbit is built one vertex at a time.
  std::vector<Key> orbit{k0}, next;
  for (int v = 0; v < L.num_vertices(); ++v) {
    next.clear();
    next.reserve(orbit.size() * ORDER);
    for (Key k : orbit)
      for (Elem g = 0; g < ORDER; ++g) next.push_back(act_vertex(seed, stars[v], g, k));
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    orbit.swap(next);
  }
  WaveFunction out(L);
  const double a = 1.0 / std::sqrt(static_cast<double>(orbit.size()));
  out.reserve(orbit.size());
  for (Key k : orbit) out.add(k, a);
  return out;
}

WaveFunction random_state(const Lattice& L, Rng& rng, int terms) {
  WaveFunction out(L);
  Config c(L.num_edges());
  for (int t = 0; t < terms; ++t) {
    for (auto& g : c) g = static_cast<Elem>(rng.below(ORDER));
    out.add(c, cplx(rng.uniform() - 0.5, rng.uniform() - 0.5));
  }
  return out.normalize();
}

SiteExpectations site_expectations(const WaveFunction& psi) {
  const Lattice& L = psi.lattice();
  const double n2 = psi.norm() * psi.norm();
  SiteExpectations out;
  for (int v = 0; v < L.num_vertices(); ++v) {
    auto st = star(L, v);
    cplx s = 0;
    for (auto& [k, a] : psi.terms())
      for (Elem g = 0; g < ORDER; ++g) s += std::conj(psi.amplitude(act_vertex(psi, st, g, k))) * a;
    out.vertex.push_back(s.real() / ORDER / n2);
  }
  for (int p = 0; p < L.num_plaquettes(); ++p) {
    auto cyc = L.boundary_cycle({L.plaquette_corners(p)[0], p});
    double s = 0;
    for (auto& [k, a] : psi.terms())
      if (path_product(psi, k, cyc) == E) s += std::norm(a);
    out.plaquette.push_back(s / n2);
  }
  return out;
}

std::vector<Violation> violations(const WaveFunction& psi, double tol) {
  const Lattice& L = psi.lattice();
  auto ex = site_expectations(psi);
  std::vector<Violation> out;
  for (int p = 0; p < L.num_plaquettes(); ++p) {
    double b = ex.plaquette[p];
    if (b > tol && b < 1 - tol)
      throw MixedSyndrome("plaquette " + std::to_string(p) + " has <B> = " + std::to_string(b));
    if (b <= tol) out.push_back({ViolationKind::Flux, p});
  }
  // Micro ribbons leave superpositions of charge sectors at their ends, so a
  // fractional <A> is a violation, not a mixed syndrome.
  for (int v = 0; v < L.num_vertices(); ++v)
    if (ex.vertex[v] < 1 - tol) out.push_back({ViolationKind::Charge, v});
  return out;
}

namespace {

std::vector<int> region_vertices(const Lattice& L, const Region& r) {
  std::vector<int> vs;
  for (int y = r.y0; y <= r.y1; ++y)
    for (int x = r.x0; x <= r.x1; ++x) vs.push_back(L.vertex(x, y));
  return vs;
}

}  // namespace

WaveFunction apply_global_vertex(Elem g, const Region& r, const WaveFunction& psi) {
  WaveFunction out = psi;
  for (int v : region_vertices(psi.lattice(), r)) out = apply_vertex(g, v, out);
  return out;
}

std::vector<SignedEdge> region_boundary(const Lattice& L, const Region& r) {
  std::vector<SignedEdge> w;
  if (r.x1 <= r.x0 || r.y1 <= r.y0) return w;
  for (int x = r.x0; x < r.x1; ++x) w.push_back({L.hedge(x, r.y0), 1});
  for (int y = r.y0; y < r.y1; ++y) w.push_back({L.vedge(r.x1, y), 1});
  for (int x = r.x1 - 1; x >= r.x0; --x) w.push_back({L.hedge(x, r.y1), -1});
  for (int y = r.y1 - 1; y >= r.y0; --y) w.push_back({L.vedge(r.x0, y), -1});
  return w;
}

Neutrality global_neutrality(const WaveFunction& psi, const Region& r, double tol) {
  Neutrality n;
  const double nrm = psi.norm();
  n.charge = true;
  for (Elem g = 0; g < ORDER; ++g)
    if (max_diff(apply_global_vertex(g, r, psi), psi) > tol * nrm) n.charge = false;
  auto walk = region_boundary(psi.lattice(), r);
  double off = 0;
  for (auto& [k, a] : psi.terms())
    if (path_product(psi, k, walk) != E) off += std::norm(a);
  n.flux = off <= tol * nrm * nrm;
  return n;
}

Census census_1x1_torus() {
  Lattice L(1, 1, Boundary::Torus);
  // dense operators on the 36-dimensional space, built from the sparse actions
  const int dim = ORDER * ORDER;
  auto index = [](Elem a, Elem b) { return a * ORDER + b; };
  Eigen::MatrixXcd PA = Eigen::MatrixXcd::Zero(dim, dim), PB = Eigen::MatrixXcd::Zero(dim, dim);
  Census c;
  for (Elem a = 0; a < ORDER; ++a)
    for (Elem b = 0; b < ORDER; ++b) {
      WaveFunction in = WaveFunction::basis(L, {a, b});
      WaveFunction pa = vertex_projector(0, in), pb = plaquette_projector(0, in);
      for (auto& [k, x] : pa.terms()) {
        Config cf = in.decode(k);
        PA(index(cf[0], cf[1]), index(a, b)) += x;
      }
      for (auto& [k, x] : pb.terms()) {
        Config cf = in.decode(k);
        PB(index(cf[0], cf[1]), index(a, b)) += x;
      }
      c.flux[a][b] = commutator(a, b);
    }
  c.ground = static_cast<int>(std::lround((PA * PB).trace().real()));
  c.single_particle = dim - c.ground;
  std::array<int, 3> by_class{};
  for (Elem a = 0; a < ORDER; ++a)
    for (Elem b = 0; b < ORDER; ++b) ++by_class[static_cast<int>(class_of(c.flux[a][b]))];
  by_class[0] -= c.ground;
  for (auto cl : {ClassLabel::C1, ClassLabel::C2, ClassLabel::C3}) c.rows.push_back({cl, by_class[static_cast<int>(cl)]});
  return c;
}

std::string dump_state(const WaveFunction& psi) {
  std::ostringstream os;
  char buf[64];
  for (auto& [k, a] : psi.sorted()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", a.real(), a.imag());
    os << buf;
    for (int e = 0; e < psi.num_edges(); ++e) os << ' ' << name(psi.get(k, e));
    os << '\n';
  }
  return os.str();
}

WaveFunction parse_state(const Lattice& L, std::string_view text) {
  WaveFunction out(L);
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string s; ls >> s;) tok.push_back(s);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (static_cast<int>(tok.size()) != 2 + L.num_edges())
      throw InputError("expected " + std::to_string(2 + L.num_edges()) + " fields", line);
    double re, im;
    try {
      size_t p1, p2;
      re = std::stod(tok[0], &p1);
      im = std::stod(tok[1], &p2);
      if (p1 != tok[0].size() || p2 != tok[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InputError("bad amplitude", line);
    }
    Config c;
    for (size_t i = 2; i < tok.size(); ++i) {
      try {
        c.push_back(parse_elem(tok[i]));
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what(), line);
      }
    }
    out.add(c, cplx(re, im));
  }
  return out;
}

}  // namespace s3qd
