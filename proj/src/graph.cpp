#include "dimers/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dimers {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int GraphSpec::edge_index(const std::string& id) const {
  for (size_t i = 0; i < edges.size(); ++i)
    if (edges[i].id == id) return int(i);
  throw SpecError("unknown edge id '" + id + "'");
}

Point GraphSpec::lattice_point(Offset o) const {
  auto& p = realization.periods;
  return {o.x * p[0].x + o.y * p[1].x, o.x * p[0].y + o.y * p[1].y};
}

Point GraphSpec::white_position(int i, Offset o) const {
  Point t = lattice_point(o);
  return {realization.white[i].x + t.x, realization.white[i].y + t.y};
}

Point GraphSpec::black_position(int i, Offset o) const {
  Point t = lattice_point(o);
  return {realization.black[i].x + t.x, realization.black[i].y + t.y};
}

namespace {

Point parse_point(const json& j) {
  if (!j.is_array() || j.size() != 2) throw SpecError("parse error: point must be [x,y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

cplx parse_sign(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw SpecError("parse error: sign must be a number or [re,im]");
}

json sign_to_json(cplx s) {
  if (s.imag() == 0.0) return s.real();
  return json::array({s.real(), s.imag()});
}

struct HalfEdge {
  int edge;
  bool from_white;
  double angle;
};

}  // namespace

std::vector<Face> trace_faces(const GraphSpec& g) {
  const int n = g.n;
  // Vertex ids: white i -> i, black j -> n + j.
  std::vector<std::vector<HalfEdge>> rot(2 * n);
  for (int e = 0; e < int(g.edges.size()); ++e) {
    auto& E = g.edges[e];
    Point pw = g.white_position(E.white, {0, 0});
    Point pb = g.black_position(E.black, E.offset);
    double dx = pb.x - pw.x, dy = pb.y - pw.y;
    if (dx * dx + dy * dy == 0.0) throw SpecError("realization places edge '" + E.id + "' at zero length");
    rot[E.white].push_back({e, true, std::atan2(dy, dx)});
    rot[n + E.black].push_back({e, false, std::atan2(-dy, -dx)});
  }
  for (auto& r : rot) std::sort(r.begin(), r.end(), [](auto& a, auto& b) { return a.angle < b.angle; });

  // Position of each half-edge within its source rotation.
  std::map<std::pair<int, bool>, std::pair<int, int>> where;  // (edge, from_white) -> (vertex, slot)
  for (int v = 0; v < 2 * n; ++v)
    for (int s = 0; s < int(rot[v].size()); ++s) where[{rot[v][s].edge, rot[v][s].from_white}] = {v, s};

  std::set<std::pair<int, bool>> used;
  std::vector<Face> faces;
  for (int e = 0; e < int(g.edges.size()); ++e) {
    std::pair<int, bool> start{e, true};
    if (used.count(start)) continue;
    Face f;
    Offset pos{0, 0};  // domain of the current source vertex
    auto h = start;
    std::vector<std::pair<int, bool>> walk;
    while (true) {
      if (used.count(h)) {
        if (h != start) throw SpecError("face tracing failed: rotation system is inconsistent");
        break;
      }
      used.insert(h);
      walk.push_back(h);
      auto& E = g.edges[h.first];
      Offset step = h.second ? E.offset : -E.offset;
      Offset edge_translate = h.second ? pos : pos - E.offset;
      f.edges.push_back(h.first);
      f.edge_offsets.push_back(edge_translate);
      pos = pos + step;
      // Twin half-edge at the target, then the next one clockwise.
      auto [v, slot] = where.at({h.first, !h.second});
      int deg = int(rot[v].size());
      int nslot = (slot - 1 + deg) % deg;
      h = {rot[v][nslot].edge, rot[v][nslot].from_white};
    }
    if (pos != Offset{0, 0})
      throw SpecError("realization is not planar: a face boundary does not close in the plane");
    cplx prod = 1.0;
    for (size_t i = 0; i < f.edges.size(); ++i) {
      cplx s = g.edges[f.edges[i]].sign;
      prod *= (i % 2 == 0) ? s : std::conj(s);
    }
    f.alternating_product = prod;
    faces.push_back(std::move(f));
  }
  // Faces starting with a black -> white half-edge are covered as well, since
  // every face of a bipartite graph contains a white -> black half-edge.
  for (int e = 0; e < int(g.edges.size()); ++e)
    if (!used.count({e, false})) throw SpecError("face tracing failed: unvisited half-edge");
  int V = 2 * n, E = int(g.edges.size()), F = int(faces.size());
  if (V - E + F != 0)
    throw SpecError("realization is not a torus embedding: V - E + F = " + std::to_string(V - E + F));
  return faces;
}

GraphSpec finalize_graph_spec(GraphSpec g) {
  if (g.n <= 0) throw SpecError("graph must have at least one vertex per color");
  if (int(g.realization.white.size()) != g.n || int(g.realization.black.size()) != g.n)
    throw SpecError("realization must list one point per vertex");
  std::vector<int> deg_w(g.n, 0), deg_b(g.n, 0);
  std::set<std::string> ids;
  for (auto& e : g.edges) {
    if (e.white < 0 || e.white >= g.n || e.black < 0 || e.black >= g.n)
      throw SpecError("edge '" + e.id + "' has vertex index out of range");
    if (!(e.weight > 0.0)) throw SpecError("nonpositive weight on edge '" + e.id + "'");
    if (std::abs(std::abs(e.sign) - 1.0) > 1e-12) throw SpecError("sign of edge '" + e.id + "' is not unimodular");
    if (!ids.insert(e.id).second) throw SpecError("duplicate edge id '" + e.id + "'");
    deg_w[e.white]++;
    deg_b[e.black]++;
  }
  for (int i = 0; i < g.n; ++i)
    if (deg_w[i] == 0 || deg_b[i] == 0) throw SpecError("vertex of degree 0 in fundamental domain");

  auto& P = g.realization.periods;
  double area = std::abs(P[0].x * P[1].y - P[0].y * P[1].x);
  if (area <= 0.0) throw SpecError("degenerate periods");
  double s = 1.0 / std::sqrt(area);
  if (std::abs(s - 1.0) > 1e-14) {
    for (auto& p : g.realization.white) p = {p.x * s, p.y * s};
    for (auto& p : g.realization.black) p = {p.x * s, p.y * s};
    for (auto& p : P) p = {p.x * s, p.y * s};
    g.scale_factor *= s;
  }

  g.faces = trace_faces(g);
  for (size_t f = 0; f < g.faces.size(); ++f) {
    auto& F = g.faces[f];
    int k = int(F.edges.size()) / 2;
    double expect = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^(k+1)
    if (std::abs(F.alternating_product - expect) > 1e-9) {
      std::ostringstream os;
      os << "Kasteleyn flatness violation on face " << f << " (" << 2 * k << " edges:";
      for (size_t i = 0; i < F.edges.size(); ++i)
        os << " " << g.edges[F.edges[i]].id << "@(" << F.edge_offsets[i].x << "," << F.edge_offsets[i].y << ")";
      os << "): alternating sign product " << F.alternating_product.real();
      if (F.alternating_product.imag() != 0.0) os << (F.alternating_product.imag() < 0 ? "-" : "+")
                                                    << std::abs(F.alternating_product.imag()) << "i";
      os << ", expected " << expect;
      throw SpecError(os.str());
    }
  }
  g.hash = fnv1a64(graph_spec_to_json(g));
  return g;
}

GraphSpec load_graph_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw SpecError(std::string("parse error: ") + ex.what());
  }
  GraphSpec g;
  try {
    g.name = j.value("name", std::string("unnamed"));
    int nw = j.at("vertices").at("white").get<int>();
    int nb = j.at("vertices").at("black").get<int>();
    if (nw != nb) throw SpecError("n_white != n_black (" + std::to_string(nw) + " vs " + std::to_string(nb) + ")");
    g.n = nw;
    auto& r = j.at("realization");
    for (auto& p : r.at("white")) g.realization.white.push_back(parse_point(p));
    for (auto& p : r.at("black")) g.realization.black.push_back(parse_point(p));
    auto& per = r.at("periods");
    if (per.size() != 2) throw SpecError("parse error: periods must be two vectors");
    g.realization.periods = {parse_point(per[0]), parse_point(per[1])};
    for (auto& e : j.at("edges")) {
      EdgeSpec E;
      E.id = e.at("id").get<std::string>();
      E.white = e.at("w").get<int>();
      E.black = e.at("b").get<int>();
      auto& o = e.at("offset");
      E.offset = {o.at(0).get<int>(), o.at(1).get<int>()};
      E.weight = e.at("weight").get<double>();
      E.sign = e.contains("sign") ? parse_sign(e.at("sign")) : cplx(1.0);
      g.edges.push_back(E);
    }
  } catch (const json::exception& ex) {
    throw SpecError(std::string("parse error: ") + ex.what());
  }
  return finalize_graph_spec(std::move(g));
}

GraphSpec load_graph_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open graph spec '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_graph_spec(ss.str());
}

std::string graph_spec_to_json(const GraphSpec& g) {
  json j;
  j["name"] = g.name;
  j["vertices"] = {{"white", g.n}, {"black", g.n}};
  json wr = json::array(), br = json::array();
  for (auto& p : g.realization.white) wr.push_back({p.x, p.y});
  for (auto& p : g.realization.black) br.push_back({p.x, p.y});
  auto& P = g.realization.periods;
  j["realization"] = {{"white", wr}, {"black", br}, {"periods", {{P[0].x, P[0].y}, {P[1].x, P[1].y}}}};
  json es = json::array();
  for (auto& e : g.edges)
    es.push_back({{"id", e.id}, {"w", e.white}, {"b", e.black}, {"offset", {e.offset.x, e.offset.y}},
                  {"weight", e.weight}, {"sign", sign_to_json(e.sign)}});
  j["edges"] = es;
  return j.dump();
}

GraphSpec make_z2(double a, double b, double c, double d) {
  GraphSpec g;
  g.name = "z2";
  g.n = 1;
  // White at the origin, black one step east; the a,b,c,d edges point E,N,W,S.
  g.realization.white = {{0.0, 0.0}};
  g.realization.black = {{1.0, 0.0}};
  g.realization.periods = {Point{1.0, -1.0}, Point{1.0, 1.0}};
  g.edges = {{"a", 0, 0, {0, 0}, a, 1.0},
             {"b", 0, 0, {-1, 0}, b, 1.0},
             {"c", 0, 0, {-1, -1}, c, -1.0}};
  if (d > 0.0) g.edges.push_back({"d", 0, 0, {0, -1}, d, 1.0});
  return finalize_graph_spec(std::move(g));
}

GraphSpec make_honeycomb(double a, double b, double c) {
  GraphSpec g = make_z2(a, b, c, 0.0);
  g.name = "honeycomb";
  return finalize_graph_spec(std::move(g));
}

GraphSpec make_square_octagon(double connector_weight, double square_weight) {
  GraphSpec g;
  g.name = "square_octagon";
  g.n = 4;
  const double r = 1.0 / (2.0 + std::numbers::sqrt2);  // half-diagonal of the small squares
  // Square {w2,b1,w4,b3} centred at the origin; the other square type sits at
  // (-1,0) and its translates.
  g.realization.white = {{-1.0 + r, 0.0}, {0.0, r}, {1.0 - r, 0.0}, {0.0, -r}};
  g.realization.black = {{-r, 0.0}, {0.0, 1.0 - r}, {r, 0.0}, {0.0, r - 1.0}};
  g.realization.periods = {Point{1.0, 1.0}, Point{-1.0, 1.0}};
  const double c = connector_weight, s = square_weight;
  g.edges = {{"w1b1", 0, 0, {0, 0}, c, 1.0},   {"w1b2", 0, 1, {-1, 0}, s, 1.0},
             {"w1b4", 0, 3, {0, 1}, s, -1.0},  {"w2b1", 1, 0, {0, 0}, s, 1.0},
             {"w2b2", 1, 1, {0, 0}, c, 1.0},   {"w2b3", 1, 2, {0, 0}, s, 1.0},
             {"w3b2", 2, 1, {0, -1}, s, 1.0},  {"w3b3", 2, 2, {0, 0}, c, 1.0},
             {"w3b4", 2, 3, {1, 0}, s, 1.0},   {"w4b1", 3, 0, {0, 0}, s, -1.0},
             {"w4b3", 3, 2, {0, 0}, s, 1.0},   {"w4b4", 3, 3, {0, 0}, c, 1.0}};
  return finalize_graph_spec(std::move(g));
}

Pattern Pattern::translated(Offset o) const {
  Pattern p = *this;
  for (auto& e : p.edges) e.offset = e.offset + o;
  p.marked.offset = p.marked.offset + o;
  return p;
}

VertexRef white_end(const GraphSpec& g, const PatternEdge& e) {
  return {Color::white, g.edges[e.edge].white, e.offset};
}

VertexRef black_end(const GraphSpec& g, const PatternEdge& e) {
  return {Color::black, g.edges[e.edge].black, e.offset + g.edges[e.edge].offset};
}

Pattern validate_pattern(const GraphSpec& g, const Pattern& p) {
  if (p.edges.empty()) throw SpecError("pattern has no edges");
  std::set<PatternEdge> seen;
  std::set<VertexRef> verts;
  for (auto& e : p.edges) {
    if (e.edge < 0 || e.edge >= int(g.edges.size())) throw SpecError("pattern references unknown edge");
    if (!seen.insert(e).second) throw SpecError("duplicate edge in pattern");
  }
  for (auto& e : p.edges) {
    if (!verts.insert(white_end(g, e)).second || !verts.insert(black_end(g, e)).second)
      throw SpecError("shared vertex in pattern");
  }
  if (p.marked.index < 0 || p.marked.index >= g.n) throw SpecError("marked vertex index out of range");
  return p;
}

Pattern edge_pattern(const GraphSpec& g, int edge, Offset o) {
  Pattern p;
  p.edges = {{edge, o}};
  p.marked = {Color::white, g.edges[edge].white, o};
  return validate_pattern(g, p);
}

Pattern edge_pattern(const GraphSpec& g, const std::string& edge_id, Offset o) {
  return edge_pattern(g, g.edge_index(edge_id), o);
}

Pattern load_pattern(const GraphSpec& g, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw SpecError(std::string("pattern parse error: ") + ex.what());
  }
  Pattern p;
  try {
    for (auto& e : j.at("edges")) {
      Offset o{0, 0};
      if (e.contains("offset")) o = {e["offset"].at(0).get<int>(), e["offset"].at(1).get<int>()};
      p.edges.push_back({g.edge_index(e.at("id").get<std::string>()), o});
    }
    if (p.edges.empty()) throw SpecError("pattern has no edges");
    if (j.contains("marked")) {
      auto& m = j["marked"];
      std::string col = m.value("color", std::string("white"));
      if (col != "white" && col != "black") throw SpecError("marked color must be white or black");
      p.marked.color = col == "white" ? Color::white : Color::black;
      p.marked.index = m.value("index", 0);
      if (m.contains("offset")) p.marked.offset = {m["offset"].at(0).get<int>(), m["offset"].at(1).get<int>()};
    } else {
      p.marked = white_end(g, p.edges.front());
    }
  } catch (const json::exception& ex) {
    throw SpecError(std::string("pattern parse error: ") + ex.what());
  }
  return validate_pattern(g, p);
}

}  // namespace dimers
