#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimers/laurent.hpp"

namespace dimers {

struct Offset {
  int x = 0;
  int y = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
  friend auto operator<=>(const Offset&, const Offset&) = default;
  Offset operator+(const Offset& o) const { return {x + o.x, y + o.y}; }
  Offset operator-(const Offset& o) const { return {x - o.x, y - o.y}; }
  Offset operator-() const { return {-x, -y}; }
};

enum class Color { white, black };

struct VertexRef {
  Color color = Color::white;
  int index = 0;
  Offset offset;
  friend bool operator==(const VertexRef&, const VertexRef&) = default;
  friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
};

struct EdgeSpec {
  std::string id;
  int white = 0;
  int black = 0;
  Offset offset;  // black vertex domain relative to the white vertex domain
  double weight = 1.0;
  cplx sign = 1.0;

  // Real-space Kasteleyn entry K(w,b).
  cplx entry() const { return sign * weight; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Realization {
  std::vector<Point> white;
  std::vector<Point> black;
  std::array<Point, 2> periods;  // translation for offset (1,0) and (0,1)
};

struct Face {
  // Edge indices in traversal order, starting with an edge traversed white -> black.
  std::vector<int> edges;
  std::vector<Offset> edge_offsets;  // translate of each edge along the face
  cplx alternating_product = 1.0;
};

struct GraphSpec {
  std::string name;
  int n = 0;  // vertices per color
  std::vector<EdgeSpec> edges;
  Realization realization;  // rescaled to unit fundamental area
  double scale_factor = 1.0;  // applied to the user's realization on load
  std::vector<Face> faces;
  std::uint64_t hash = 0;

  int edge_index(const std::string& id) const;
  Point white_position(int i, Offset o) const;
  Point black_position(int i, Offset o) const;
  Point lattice_point(Offset o) const;
};

class SpecError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Loads a graph spec from JSON text. Validates and rescales the realization.
GraphSpec load_graph_spec(const std::string& text);
GraphSpec load_graph_spec_file(const std::string& path);
// Re-validates after programmatic edits (weights, signs) and recomputes the hash.
GraphSpec finalize_graph_spec(GraphSpec g);
std::string graph_spec_to_json(const GraphSpec& g);

// Built-in constructors used by tests and the CLI.
GraphSpec make_z2(double a, double b, double c, double d);
GraphSpec make_honeycomb(double a, double b, double c);
GraphSpec make_square_octagon(double connector_weight = 1.0, double square_weight = 1.0);

struct PatternEdge {
  int edge = 0;  // index into GraphSpec::edges
  Offset offset;  // translate of the white end's domain
  friend bool operator==(const PatternEdge&, const PatternEdge&) = default;
  friend auto operator<=>(const PatternEdge&, const PatternEdge&) = default;
};

struct Pattern {
  std::vector<PatternEdge> edges;
  VertexRef marked;

  Pattern translated(Offset o) const;
};

VertexRef white_end(const GraphSpec& g, const PatternEdge& e);
VertexRef black_end(const GraphSpec& g, const PatternEdge& e);

Pattern validate_pattern(const GraphSpec& g, const Pattern& p);
Pattern load_pattern(const GraphSpec& g, const std::string& text);
// Single edge at offset zero, marked at its white end.
Pattern edge_pattern(const GraphSpec& g, const std::string& edge_id, Offset o = {});
Pattern edge_pattern(const GraphSpec& g, int edge, Offset o = {});

// Faces traced from the rotation system of the realization on the torus quotient.
std::vector<Face> trace_faces(const GraphSpec& g);

struct EnumerationResult {
  double partition_function = 0.0;
  std::vector<double> marginals;  // per edge class, averaged over translates
  std::int64_t matchings = 0;
};

// Brute-force perfect matchings on the Lx x Ly torus quotient.
EnumerationResult enumerate_torus(const GraphSpec& g, int Lx, int Ly,
                                  const std::vector<std::pair<PatternEdge, bool>>& constraint = {},
                                  int budget = 36);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace dimers
