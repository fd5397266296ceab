#include "s3qd/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace s3qd {

namespace {

int wrap(int a, int n) { return ((a % n) + n) % n; }

// Corner offsets from the plaquette centre in doubled coordinates: SW, SE, NE, NW.
constexpr std::array<Vec2, 4> kCornerOffset{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
// (tail corner, head corner) of bottom, right, top, left.
constexpr std::array<std::array<int, 2>, 4> kEdgeCorners{{{0, 1}, {1, 2}, {3, 2}, {0, 3}}};

int cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

int from_vertex(const Lattice& L, const SignedEdge& s) { return s.sign > 0 ? L.tail(s.edge) : L.head(s.edge); }
int to_vertex(const Lattice& L, const SignedEdge& s) { return s.sign > 0 ? L.head(s.edge) : L.tail(s.edge); }

}  // namespace

Lattice::Lattice(int width, int height, Boundary boundary) : w_(width), h_(height), b_(boundary) {
  if (width < 1 || height < 1) throw std::invalid_argument("lattice dimensions must be at least 1");
}

int Lattice::num_vertices() const { return torus() ? w_ * h_ : (w_ + 1) * (h_ + 1); }
int Lattice::num_edges() const { return torus() ? 2 * w_ * h_ : w_ * (h_ + 1) + (w_ + 1) * h_; }
int Lattice::num_plaquettes() const { return w_ * h_; }

int Lattice::vertex(int x, int y) const {
  if (torus()) return wrap(y, h_) * w_ + wrap(x, w_);
  if (x < 0 || x > w_ || y < 0 || y > h_) throw std::out_of_range("vertex outside patch");
  return y * (w_ + 1) + x;
}

Vec2 Lattice::vertex_xy(int v) const {
  check_vertex(v);
  int row = torus() ? w_ : w_ + 1;
  return {v % row, v / row};
}

int Lattice::hedge(int x, int y) const {
  if (torus()) return wrap(y, h_) * w_ + wrap(x, w_);
  if (x < 0 || x >= w_ || y < 0 || y > h_) throw std::out_of_range("horizontal edge outside patch");
  return y * w_ + x;
}

int Lattice::vedge(int x, int y) const {
  if (torus()) return w_ * h_ + wrap(y, h_) * w_ + wrap(x, w_);
  if (x < 0 || x > w_ || y < 0 || y >= h_) throw std::out_of_range("vertical edge outside patch");
  return w_ * (h_ + 1) + y * (w_ + 1) + x;
}

int Lattice::plaquette(int x, int y) const {
  if (torus()) return wrap(y, h_) * w_ + wrap(x, w_);
  if (x < 0 || x >= w_ || y < 0 || y >= h_) throw std::out_of_range("plaquette outside patch");
  return y * w_ + x;
}

Vec2 Lattice::plaquette_xy(int p) const {
  check_plaquette(p);
  return {p % w_, p / w_};
}

int Lattice::num_horizontal() const { return torus() ? w_ * h_ : w_ * (h_ + 1); }

bool Lattice::horizontal(int e) const {
  check_edge(e);
  return e < num_horizontal();
}

Vec2 Lattice::edge_xy(int e) const {
  if (horizontal(e)) return {e % w_, e / w_};
  int k = e - num_horizontal();
  int row = torus() ? w_ : w_ + 1;
  return {k % row, k / row};
}

int Lattice::tail(int e) const {
  auto [x, y] = edge_xy(e);
  return vertex(x, y);
}

int Lattice::head(int e) const {
  auto [x, y] = edge_xy(e);
  return horizontal(e) ? vertex(x + 1, y) : vertex(x, y + 1);
}

std::vector<int> Lattice::edge_plaquettes(int e) const {
  auto [x, y] = edge_xy(e);
  std::vector<int> out;
  if (horizontal(e)) {
    if (torus() || y >= 1) out.push_back(plaquette(x, y - 1));
    if (torus() || y < h_) out.push_back(plaquette(x, y));
  } else {
    if (torus() || x >= 1) out.push_back(plaquette(x - 1, y));
    if (torus() || x < w_) out.push_back(plaquette(x, y));
  }
  return out;
}

std::vector<int> Lattice::vertex_edges(int v) const {
  auto [x, y] = vertex_xy(v);
  std::vector<int> out;
  auto add = [&](int e) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  if (torus() || x < w_) add(hedge(x, y));
  if (torus() || x >= 1) add(hedge(x - 1, y));
  if (torus() || y < h_) add(vedge(x, y));
  if (torus() || y >= 1) add(vedge(x, y - 1));
  return out;
}

std::array<int, 4> Lattice::plaquette_edges(int p) const {
  auto [x, y] = plaquette_xy(p);
  return {hedge(x, y), vedge(x + 1, y), hedge(x, y + 1), vedge(x, y)};
}

std::array<int, 4> Lattice::plaquette_corners(int p) const {
  auto [x, y] = plaquette_xy(p);
  return {vertex(x, y), vertex(x + 1, y), vertex(x + 1, y + 1), vertex(x, y + 1)};
}

bool Lattice::is_site(const Site& s) const {
  if (s.vertex < 0 || s.vertex >= num_vertices() || s.plaquette < 0 || s.plaquette >= num_plaquettes())
    return false;
  auto c = plaquette_corners(s.plaquette);
  return std::find(c.begin(), c.end(), s.vertex) != c.end();
}

std::vector<SignedEdge> Lattice::boundary_cycle(const Site& s) const {
  if (!is_site(s)) throw std::invalid_argument("not a site");
  auto c = plaquette_corners(s.plaquette);
  auto e = plaquette_edges(s.plaquette);
  const std::array<SignedEdge, 4> ring{{{e[0], 1}, {e[1], 1}, {e[2], -1}, {e[3], -1}}};
  int k = static_cast<int>(std::find(c.begin(), c.end(), s.vertex) - c.begin());
  std::vector<SignedEdge> out;
  for (int i = 0; i < 4; ++i) out.push_back(ring[(k + i) % 4]);
  return out;
}

Vec2 Lattice::vertex_pos(int v) const {
  auto [x, y] = vertex_xy(v);
  return {2 * x, 2 * y};
}

Vec2 Lattice::plaquette_pos(int p) const {
  auto [x, y] = plaquette_xy(p);
  return {2 * x + 1, 2 * y + 1};
}

Vec2 Lattice::edge_dir(int e) const { return horizontal(e) ? Vec2{1, 0} : Vec2{0, 1}; }

Vec2 Lattice::displacement(const Vec2& a, const Vec2& b) const {
  Vec2 d{b[0] - a[0], b[1] - a[1]};
  if (torus()) {
    const int px = 2 * w_, py = 2 * h_;
    d[0] = wrap(d[0], px);
    d[1] = wrap(d[1], py);
    if (d[0] > w_) d[0] -= px;
    if (d[1] > h_) d[1] -= py;
  }
  return d;
}

void Lattice::check_vertex(int v) const {
  if (v < 0 || v >= num_vertices()) throw std::out_of_range("vertex id out of range");
}
void Lattice::check_edge(int e) const {
  if (e < 0 || e >= num_edges()) throw std::out_of_range("edge id out of range");
}
void Lattice::check_plaquette(int p) const {
  if (p < 0 || p >= num_plaquettes()) throw std::out_of_range("plaquette id out of range");
}

Triangle classify_triangle(const Lattice& L, TriKind kind, int edge, const Site& start) {
  L.check_edge(edge);
  if (!L.is_site(start)) throw std::invalid_argument("start is not a site");
  if (L.tail(edge) == L.head(edge)) throw std::invalid_argument("edge is a loop; lattice too small");

  Triangle t;
  t.kind = kind;
  t.edge = edge;
  t.start = start;

  // locate the edge on the start plaquette and the corner it shares with the start vertex
  auto edges = L.plaquette_edges(start.plaquette);
  auto corners = L.plaquette_corners(start.plaquette);
  int side = -1, from = -1, to = -1;
  for (int i = 0; i < 4 && side < 0; ++i) {
    if (edges[i] != edge) continue;
    auto [tc, hc] = kEdgeCorners[i];
    if (corners[tc] == start.vertex) {
      side = i, from = tc, to = hc;
    } else if (corners[hc] == start.vertex) {
      side = i, from = hc, to = tc;
    }
  }
  if (side < 0) throw std::invalid_argument("edge does not touch the start site");

  if (kind == TriKind::Direct) {
    t.end = {corners[to], start.plaquette};
    t.alignment = L.tail(edge) == start.vertex ? Alignment::Aligned : Alignment::Opposite;
    t.orientation = cross(kCornerOffset[from], kCornerOffset[to]) > 0 ? Orientation::CCW : Orientation::CW;
    return t;
  }

  auto ps = L.edge_plaquettes(edge);
  if (ps.size() != 2 || ps[0] == ps[1]) throw std::invalid_argument("dual triangle needs two distinct plaquettes");
  Vec2 perp = L.horizontal(edge) ? Vec2{0, 2} : Vec2{2, 0};
  Vec2 step;
  if (ps[0] == start.plaquette) {
    t.end = {start.vertex, ps[1]};
    step = perp;
  } else {
    t.end = {start.vertex, ps[0]};
    step = {-perp[0], -perp[1]};
  }
  Vec2 d = L.edge_dir(edge);
  Vec2 dual{-d[1], d[0]};
  t.alignment = step[0] * dual[0] + step[1] * dual[1] > 0 ? Alignment::Aligned : Alignment::Opposite;
  t.orientation = cross(kCornerOffset[from], step) > 0 ? Orientation::CCW : Orientation::CW;
  return t;
}

int RibbonPath::start_vertex(const Lattice& L) const {
  return z_prefix.empty() ? start().vertex : from_vertex(L, z_prefix.front());
}

int RibbonPath::end_vertex(const Lattice& L) const {
  return z_suffix.empty() ? end().vertex : to_vertex(L, z_suffix.back());
}

RibbonPath make_ribbon(const Lattice& L, std::vector<Triangle> tris, std::vector<SignedEdge> prefix,
                       std::vector<SignedEdge> suffix, bool allow_self_crossing) {
  if (tris.empty()) throw std::invalid_argument("ribbon has no triangles");
  std::set<std::pair<int, int>> used;
  for (size_t k = 0; k < tris.size(); ++k) {
    const Triangle& t = tris[k];
    if (classify_triangle(L, t.kind, t.edge, t.start) != t)
      throw std::invalid_argument("triangle " + std::to_string(k) + " is inconsistent with the lattice");
    if (k > 0 && !(tris[k - 1].end == t.start))
      throw std::invalid_argument("triangle " + std::to_string(k) + " does not continue the ribbon");
    if (t.orientation != tris.front().orientation)
      throw std::invalid_argument("mixed local orientations");
    if (!used.insert({static_cast<int>(t.kind), t.edge}).second && !allow_self_crossing)
      throw std::invalid_argument("ribbon crosses itself at edge " + std::to_string(t.edge));
  }
  auto check_walk = [&](const std::vector<SignedEdge>& walk) {
    for (size_t k = 0; k < walk.size(); ++k) {
      L.check_edge(walk[k].edge);
      if (walk[k].sign != 1 && walk[k].sign != -1) throw std::invalid_argument("edge sign must be +1 or -1");
      if (k > 0 && to_vertex(L, walk[k - 1]) != from_vertex(L, walk[k]))
        throw std::invalid_argument("disconnected extension");
    }
  };
  check_walk(prefix);
  check_walk(suffix);
  if (!allow_self_crossing) {
    for (const auto& w : {prefix, suffix})
      for (const auto& se : w) used.insert({static_cast<int>(TriKind::Direct), se.edge});
    for (const auto& [kind, e] : used)
      if (kind == static_cast<int>(TriKind::Dual) && used.count({static_cast<int>(TriKind::Direct), e}))
        throw std::invalid_argument("edge " + std::to_string(e) + " is used as both direct and dual");
  }
  if (!prefix.empty() && to_vertex(L, prefix.back()) != tris.front().start.vertex)
    throw std::invalid_argument("disconnected extension: prefix must end at the ribbon start vertex");
  if (!suffix.empty() && from_vertex(L, suffix.front()) != tris.back().end.vertex)
    throw std::invalid_argument("disconnected extension: suffix must leave the ribbon end vertex");

  RibbonPath r;
  r.orientation = tris.front().orientation;
  r.triangles = std::move(tris);
  r.z_prefix = std::move(prefix);
  r.z_suffix = std::move(suffix);
  return r;
}

RibbonPath trace_ribbon(const Lattice& L, const Site& start, std::string_view word, Orientation o) {
  std::vector<Triangle> tris;
  Site at = start;
  for (char c : word) {
    TriKind kind;
    if (c == 'D')
      kind = TriKind::Direct;
    else if (c == 'U')
      kind = TriKind::Dual;
    else
      throw std::invalid_argument(std::string("unknown triangle letter ") + c);
    bool found = false;
    for (int e : L.plaquette_edges(at.plaquette)) {
      if (L.tail(e) != at.vertex && L.head(e) != at.vertex) continue;
      try {
        Triangle t = classify_triangle(L, kind, e, at);
        if (t.orientation != o) continue;
        tris.push_back(t);
        at = t.end;
        found = true;
        break;
      } catch (const std::invalid_argument&) {
      }
    }
    if (!found) throw std::invalid_argument("ribbon leaves the lattice");
  }
  return make_ribbon(L, std::move(tris));
}

namespace {

void write_walk(std::ostringstream& os, const char* tag, const std::vector<SignedEdge>& w) {
  if (w.empty()) return;
  os << tag;
  for (const auto& s : w) os << ' ' << (s.sign > 0 ? '+' : '-') << s.edge;
  os << '\n';
}

int parse_int(std::string_view tok, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) throw InputError("expected integer, got '" + std::string(tok) + "'", line);
  return v;
}

}  // namespace

std::string serialize_ribbon(const RibbonPath& r) {
  std::ostringstream os;
  write_walk(os, "ZPRE", r.z_prefix);
  for (const auto& t : r.triangles)
    os << (t.kind == TriKind::Direct ? 'D' : 'U') << ' ' << t.edge << ' ' << t.start.vertex << ' '
       << t.start.plaquette << '\n';
  write_walk(os, "ZSUF", r.z_suffix);
  return os.str();
}

RibbonPath parse_ribbon(const Lattice& L, std::string_view text) {
  std::vector<Triangle> tris;
  std::vector<SignedEdge> pre, suf;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string s; ls >> s;) tok.push_back(s);
    if (tok.empty()) continue;
    if (tok[0] == "ZPRE" || tok[0] == "ZSUF") {
      auto& walk = tok[0] == "ZPRE" ? pre : suf;
      for (size_t i = 1; i < tok.size(); ++i) {
        const std::string& s = tok[i];
        if (s.size() < 2 || (s[0] != '+' && s[0] != '-')) throw InputError("signed edge expected, got '" + s + "'", line);
        int e = parse_int(std::string_view(s).substr(1), line);
        if (e < 0 || e >= L.num_edges()) throw InputError("edge id out of range", line);
        walk.push_back({e, s[0] == '+' ? 1 : -1});
      }
      continue;
    }
    if (tok[0] != "D" && tok[0] != "U") throw InputError("unknown record '" + tok[0] + "'", line);
    if (tok.size() != 4) throw InputError("triangle line needs 4 fields", line);
    int e = parse_int(tok[1], line), v = parse_int(tok[2], line), p = parse_int(tok[3], line);
    if (e < 0 || e >= L.num_edges()) throw InputError("edge id out of range", line);
    try {
      Triangle t = classify_triangle(L, tok[0] == "D" ? TriKind::Direct : TriKind::Dual, e, {v, p});
      if (!tris.empty() && !(tris.back().end == t.start)) throw InputError("triangle does not continue the ribbon", line);
      tris.push_back(t);
    } catch (const std::invalid_argument& ex) {
      throw InputError(ex.what(), line);
    }
  }
  try {
    return make_ribbon(L, std::move(tris), std::move(pre), std::move(suf));
  } catch (const std::invalid_argument& ex) {
    throw InputError(ex.what());
  }
}

std::vector<Site> ribbon_endpoints(const RibbonPath& r) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : r.triangles) {
    ++count[{t.start.vertex, t.start.plaquette}];
    ++count[{t.end.vertex, t.end.plaquette}];
  }
  std::vector<Site> out;
  for (auto& [k, n] : count)
    if (n % 2) out.push_back({k.first, k.second});
  return out;
}

}  // namespace s3qd
