#include <algorithm>
#include <map>

#include "dimers/graph.hpp"

namespace dimers {

namespace {

struct TorusEdge {
  int cls;
  int black;
  double weight;
};

struct Enumerator {
  std::vector<std::vector<TorusEdge>> adj;  // per torus white vertex
  std::vector<char> black_used;
  std::vector<int> counts;
  std::vector<double> acc;
  double Z = 0.0;
  std::int64_t n_match = 0;

  void run(size_t w, double weight) {
    if (w == adj.size()) {
      Z += weight;
      ++n_match;
      for (size_t c = 0; c < counts.size(); ++c) acc[c] += weight * counts[c];
      return;
    }
    for (auto& e : adj[w]) {
      if (black_used[e.black]) continue;
      black_used[e.black] = 1;
      counts[e.cls]++;
      run(w + 1, weight * e.weight);
      counts[e.cls]--;
      black_used[e.black] = 0;
    }
  }
};

int wrap(int v, int L) { return ((v % L) + L) % L; }

}  // namespace

EnumerationResult enumerate_torus(const GraphSpec& g, int Lx, int Ly,
                                  const std::vector<std::pair<PatternEdge, bool>>& constraint, int budget) {
  if (Lx <= 0 || Ly <= 0) throw SpecError("torus size must be positive");
  const int cells = Lx * Ly;
  if (2 * g.n * cells > budget)
    throw SpecError("enumeration budget exceeded: " + std::to_string(2 * g.n * cells) + " vertices > " +
                    std::to_string(budget));
  auto cell = [&](Offset o) { return wrap(o.x, Lx) + Lx * wrap(o.y, Ly); };

  // Reduce constraints to the quotient: (class, cell) -> required state.
  std::map<std::pair<int, int>, bool> forced;
  for (auto& [pe, present] : constraint) forced[{pe.edge, cell(pe.offset)}] = present;

  Enumerator en;
  en.adj.resize(g.n * cells);
  en.black_used.assign(g.n * cells, 0);
  en.counts.assign(g.edges.size(), 0);
  en.acc.assign(g.edges.size(), 0.0);
  for (int y = 0; y < Ly; ++y)
    for (int x = 0; x < Lx; ++x)
      for (int e = 0; e < int(g.edges.size()); ++e) {
        auto& E = g.edges[e];
        int c = cell({x, y});
        auto it = forced.find({e, c});
        if (it != forced.end() && !it->second) continue;
        int wv = E.white + g.n * c;
        int bv = E.black + g.n * cell(Offset{x, y} + E.offset);
        en.adj[wv].push_back({e, bv, E.weight});
      }
  // A forced dimer removes every other choice at its white end and every
  // competing edge at its black end.
  for (auto& [key, present] : forced) {
    if (!present) continue;
    auto& E = g.edges[key.first];
    int wv = E.white + g.n * key.second;
    int cx = key.second % Lx, cy = key.second / Lx;
    int bv = E.black + g.n * cell(Offset{cx, cy} + E.offset);
    auto& lst = en.adj[wv];
    lst.erase(std::remove_if(lst.begin(), lst.end(), [&](const TorusEdge& t) { return t.cls != key.first; }),
              lst.end());
    for (int w = 0; w < int(en.adj.size()); ++w) {
      if (w == wv) continue;
      auto& l2 = en.adj[w];
      l2.erase(std::remove_if(l2.begin(), l2.end(), [&](const TorusEdge& t) { return t.black == bv; }), l2.end());
    }
  }
  en.run(0, 1.0);

  EnumerationResult r;
  r.partition_function = en.Z;
  r.matchings = en.n_match;
  r.marginals.assign(g.edges.size(), 0.0);
  if (en.Z > 0.0)
    for (size_t c = 0; c < g.edges.size(); ++c) r.marginals[c] = en.acc[c] / (en.Z * cells);
  return r;
}

}  // namespace dimers
