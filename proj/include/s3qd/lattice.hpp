#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace s3qd {

// Malformed user input; line is 1-based, 0 if not tied to a line.
struct InputError : std::runtime_error {
  int line = 0;
  InputError(const std::string& msg, int line_ = 0)
      : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg), line(line_) {}
};

enum class Boundary { Torus, Open };

struct Site {
  int vertex = 0;
  int plaquette = 0;
  bool operator==(const Site&) const = default;
};

struct SignedEdge {
  int edge = 0;
  int sign = 1;  // +1 along the edge orientation, -1 against
  bool operator==(const SignedEdge&) const = default;
};

using Vec2 = std::array<int, 2>;

// Square lattice with horizontal edges pointing +x and vertical edges pointing +y.
//
// Open W x H patch: vertex (x,y) = y(W+1)+x for 0<=x<=W, 0<=y<=H;
// horizontal edge h(x,y) = yW+x for y<=H; vertical edge v(x,y) = W(H+1)+y(W+1)+x for y<H;
// plaquette (x,y) = yW+x with SW corner at vertex (x,y).
// Torus: coordinates wrap, vertex = yW+x, h(x,y) = yW+x, v(x,y) = WH+yW+x.
class Lattice {
 public:
  Lattice(int width, int height, Boundary boundary);

  int width() const { return w_; }
  int height() const { return h_; }
  Boundary boundary() const { return b_; }
  bool torus() const { return b_ == Boundary::Torus; }

  int num_vertices() const;
  int num_edges() const;
  int num_plaquettes() const;
  int num_horizontal() const;

  int vertex(int x, int y) const;
  Vec2 vertex_xy(int v) const;
  int hedge(int x, int y) const;
  int vedge(int x, int y) const;
  int plaquette(int x, int y) const;
  Vec2 plaquette_xy(int p) const;

  bool horizontal(int e) const;
  Vec2 edge_xy(int e) const;  // (x,y) of h(x,y) or v(x,y)
  int tail(int e) const;
  int head(int e) const;
  // Plaquettes bordering e: below/above for horizontal, left/right for vertical.
  std::vector<int> edge_plaquettes(int e) const;
  std::vector<int> vertex_edges(int v) const;

  // bottom, right, top, left
  std::array<int, 4> plaquette_edges(int p) const;
  // SW, SE, NE, NW
  std::array<int, 4> plaquette_corners(int p) const;

  bool is_site(const Site& s) const;
  // Counterclockwise boundary walk of s.plaquette starting at s.vertex.
  std::vector<SignedEdge> boundary_cycle(const Site& s) const;

  // Positions in doubled integer coordinates: vertices at even, plaquette centres at odd points.
  Vec2 vertex_pos(int v) const;
  Vec2 plaquette_pos(int p) const;
  Vec2 edge_dir(int e) const;
  // b - a, minimal image on the torus.
  Vec2 displacement(const Vec2& a, const Vec2& b) const;

  void check_vertex(int v) const;
  void check_edge(int e) const;
  void check_plaquette(int p) const;

 private:
  int w_, h_;
  Boundary b_;
};

enum class TriKind { Direct, Dual };
enum class Alignment { Aligned, Opposite };
enum class Orientation { CW, CCW };

struct Triangle {
  TriKind kind = TriKind::Direct;
  int edge = 0;
  Site start;
  Site end;
  Alignment alignment = Alignment::Aligned;
  Orientation orientation = Orientation::CCW;
  bool operator==(const Triangle&) const = default;
};

// Fills end site, alignment and local orientation. Direct triangles keep the
// plaquette and move the vertex along `edge`; dual triangles keep the vertex and
// move the plaquette across `edge`. Throws std::invalid_argument if not embeddable.
Triangle classify_triangle(const Lattice& L, TriKind kind, int edge, const Site& start);

struct RibbonPath {
  std::vector<Triangle> triangles;
  std::vector<SignedEdge> z_prefix;  // walk ending at the start vertex
  std::vector<SignedEdge> z_suffix;  // walk leaving the end vertex
  Orientation orientation = Orientation::CCW;

  Site start() const { return triangles.front().start; }
  Site end() const { return triangles.back().end; }
  bool closed() const { return start() == end(); }
  int start_vertex(const Lattice& L) const;  // after the prefix is prepended
  int end_vertex(const Lattice& L) const;    // after the suffix is appended
  bool operator==(const RibbonPath&) const = default;
};

// Validates continuity, a single local orientation, and extension walks.
// Repeated use of an edge by triangles of one kind, or as both a direct edge (triangle
// or extension) and a dual edge, is rejected unless allowed.
RibbonPath make_ribbon(const Lattice& L, std::vector<Triangle> tris, std::vector<SignedEdge> prefix = {},
                       std::vector<SignedEdge> suffix = {}, bool allow_self_crossing = false);

// Builds a ribbon from a word over {D,U}: at fixed local orientation each site has
// exactly one direct and one dual continuation.
RibbonPath trace_ribbon(const Lattice& L, const Site& start, std::string_view word,
                        Orientation o = Orientation::CCW);

// Line format: "D|U <edge> <start-vertex> <start-plaquette>", optional "ZPRE"/"ZSUF"
// lines of signed edge ids such as "+3 -5". '#' starts a comment.
std::string serialize_ribbon(const RibbonPath& r);
RibbonPath parse_ribbon(const Lattice& L, std::string_view text);

// Sites touched an odd number of times as triangle endpoints (two for open ribbons, none for closed).
std::vector<Site> ribbon_endpoints(const RibbonPath& r);

}  // namespace s3qd
