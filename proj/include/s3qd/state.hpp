#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "s3qd/group.hpp"
#include "s3qd/lattice.hpp"
#include "s3qd/rng.hpp"

namespace s3qd {

using Config = std::vector<Elem>;
// Packed configuration: 3 bits per edge, edge 0 in the most significant position,
// so numeric order of keys is lexicographic order of configurations.
using Key = unsigned __int128;

constexpr int kMaxEdges = 42;
constexpr double kPrune = 1e-12;

struct KeyHash {
  std::size_t operator()(Key k) const noexcept {
    auto lo = static_cast<std::uint64_t>(k), hi = static_cast<std::uint64_t>(k >> 64);
    return splitmix64(lo ^ splitmix64(hi));
  }
};

class WaveFunction {
 public:
  using Map = std::unordered_map<Key, cplx, KeyHash>;

  explicit WaveFunction(const Lattice& L);
  static WaveFunction basis(const Lattice& L, const Config& c);

  const Lattice& lattice() const { return lat_; }
  int num_edges() const { return lat_.num_edges(); }
  std::size_t size() const { return amps_.size(); }
  bool empty() const { return amps_.empty(); }
  const Map& terms() const { return amps_; }

  Key encode(const Config& c) const;
  Config decode(Key k) const;
  Elem get(Key k, int e) const { return static_cast<Elem>((k >> shift(e)) & 7u); }
  Key set(Key k, int e, Elem g) const {
    int s = shift(e);
    return (k & ~(Key(7) << s)) | (Key(g) << s);
  }

  cplx amplitude(const Config& c) const;
  cplx amplitude(Key k) const;
  void add(const Config& c, cplx a) { add(encode(c), a); }
  void add(Key k, cplx a) { amps_[k] += a; }
  void reserve(std::size_t n) { amps_.reserve(n); }

  double norm() const;
  WaveFunction& normalize();
  WaveFunction& prune(double eps = kPrune);
  WaveFunction& scale(cplx a);

  // Terms in ascending key order.
  std::vector<std::pair<Key, cplx>> sorted() const;

 private:
  int shift(int e) const { return 3 * (lat_.num_edges() - 1 - e); }
  Lattice lat_;
  Map amps_;
};

cplx inner(const WaveFunction& a, const WaveFunction& b);  // <a|b>
WaveFunction operator+(const WaveFunction& a, const WaveFunction& b);
WaveFunction operator-(const WaveFunction& a, const WaveFunction& b);
WaveFunction operator*(cplx s, const WaveFunction& a);
// Largest entrywise |a - b|.
double max_diff(const WaveFunction& a, const WaveFunction& b);

// Map every basis term through f (key -> key, phase); the result is pruned.
WaveFunction map_terms(const WaveFunction& psi, const std::function<std::pair<Key, cplx>(Key)>& f);
WaveFunction filter_terms(const WaveFunction& psi, const std::function<bool(Key)>& keep);

// Ordered product of signed edges (inverse for sign -1), left to right.
Elem path_product(const WaveFunction& psi, Key k, const std::vector<SignedEdge>& path);

// A^g_s: out-edges x -> g x, in-edges x -> x g^-1.
WaveFunction apply_vertex(Elem g, int s, const WaveFunction& psi);
// B^h at site (s,p): keeps terms whose counterclockwise product from s equals h^-1.
WaveFunction apply_plaquette(Elem h, const Site& site, const WaveFunction& psi);
// (1/|G|) sum_g A^g_s
WaveFunction vertex_projector(int s, const WaveFunction& psi);
// B^e at p
WaveFunction plaquette_projector(int p, const WaveFunction& psi);
// Counterclockwise holonomy of p read from s.
Elem holonomy(const WaveFunction& psi, Key k, const Site& site);

// Normalized gauge-orbit superposition of rep. Throws std::invalid_argument if rep carries flux.
WaveFunction ground_state(const Lattice& L, const Config& rep);

// Random normalized state on `terms` random configurations with random complex amplitudes.
WaveFunction random_state(const Lattice& L, Rng& rng, int terms);

enum class ViolationKind { Charge, Flux };

struct Violation {
  ViolationKind kind;
  int id;  // vertex for charge, plaquette for flux
  bool operator==(const Violation&) const = default;
};

// Raised when a state is a superposition of different syndromes.
struct MixedSyndrome : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SiteExpectations {
  std::vector<double> vertex;     // <A_s>
  std::vector<double> plaquette;  // <B^e_p>
};
SiteExpectations site_expectations(const WaveFunction& psi);

std::vector<Violation> violations(const WaveFunction& psi, double tol = 1e-9);

// Region: the closed rectangle of vertices [x0,x1] x [y0,y1].
struct Region {
  int x0, y0, x1, y1;
};

struct Neutrality {
  bool charge = false;  // A^g over the region fixes psi for all g
  bool flux = false;    // boundary holonomy is e on every term
};

// Product of A^g_v over the region's vertices.
WaveFunction apply_global_vertex(Elem g, const Region& r, const WaveFunction& psi);
// Counterclockwise boundary walk of the region starting at its SW corner.
std::vector<SignedEdge> region_boundary(const Lattice& L, const Region& r);
Neutrality global_neutrality(const WaveFunction& psi, const Region& r, double tol = 1e-9);

struct CensusRow {
  ClassLabel flux;
  int states;  // dimension of the excited subspace with this flux class
};

struct Census {
  int ground = 0;
  int single_particle = 0;
  std::vector<CensusRow> rows;  // excited states by flux class (C1 = pure charge)
  // commutator g1 g2 g1^-1 g2^-1 per basis configuration (horizontal, vertical)
  std::array<std::array<Elem, ORDER>, ORDER> flux{};
};

Census census_1x1_torus();

// "<re> <im> <edge values>" per term in key order.
std::string dump_state(const WaveFunction& psi);
WaveFunction parse_state(const Lattice& L, std::string_view text);

}  // namespace s3qd
