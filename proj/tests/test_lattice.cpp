#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dimers/graph.hpp"
#include "dimers/laurent.hpp"

using namespace dimers;

namespace {
std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kZ2 = R"({"name":"t","vertices":{"white":1,"black":1},
  "realization":{"white":[[0,0]],"black":[[1,0]],"periods":[[1,-1],[1,1]]},
  "edges":[{"id":"a","w":0,"b":0,"offset":[0,0],"weight":1},
           {"id":"b","w":0,"b":0,"offset":[-1,0],"weight":1},
           {"id":"c","w":0,"b":0,"offset":[-1,-1],"weight":1,"sign":-1},
           {"id":"d","w":0,"b":0,"offset":[0,-1],"weight":1}]})";
}  // namespace

TEST_CASE("laurent arithmetic and evaluation") {
  auto z = Laurent2::monomial(1.0, 1, 0), w = Laurent2::monomial(1.0, 0, 1), winv = Laurent2::monomial(1.0, 0, -1);
  Laurent2 P = Laurent2(1.0) + z + winv - z * winv;
  cplx z0(0.3, 0.8), w0(-0.6, 0.2);
  CHECK(std::abs(P.eval(z0, w0) - (1.0 + z0 + 1.0 / w0 - z0 / w0)) < 1e-14);
  double h = 1e-6;
  CHECK(std::abs(P.dz(z0, w0) - (P.eval(z0 + h, w0) - P.eval(z0 - h, w0)) / (2 * h)) < 1e-8);
  CHECK(std::abs(P.dw(z0, w0) - (P.eval(z0, w0 + h) - P.eval(z0, w0 - h)) / (2 * h)) < 1e-8);
  CHECK(P.zmin() == 0);
  CHECK(P.zmax() == 1);
  CHECK(P.wmin() == -1);
  CHECK(P.wmax() == 0);
  auto wc = P.w_coeffs(z0);
  cplx acc = 0.0;
  for (int k = 0; k < int(wc.size()); ++k) acc += wc[k] * ipow(w0, P.wmin() + k);
  CHECK(std::abs(acc - P.eval(z0, w0)) < 1e-14);
  Laurent2 zero = P - P;
  zero.prune(1e-15);
  CHECK(zero.is_zero());
  CHECK((w * winv).coeff(0, 0) == cplx(1.0));
}

TEST_CASE("graph spec loading, rescaling and hashing") {
  auto g = load_graph_spec(kZ2);
  CHECK(g.n == 1);
  CHECK(g.edges.size() == 4);
  auto p = g.realization.periods;
  CHECK(std::abs(p[0].x * p[1].y - p[0].y * p[1].x) == doctest::Approx(1.0));
  CHECK(g.faces.size() == 2);
  auto g2 = load_graph_spec(kZ2);
  CHECK(g.hash == g2.hash);
  auto g3 = load_graph_spec(graph_spec_to_json(g));
  CHECK(g3.hash == g.hash);
  CHECK(make_square_octagon().faces.size() == 4);
  CHECK(make_honeycomb(1, 1, 1).faces.size() == 1);
  CHECK(load_graph_spec_file(SPECS_DIR "/square_octagon.spec").hash == make_square_octagon().hash);
}

TEST_CASE("graph spec errors") {
  std::string unequal = R"({"vertices":{"white":2,"black":1},"realization":{"white":[[0,0],[1,1]],"black":[[1,0]],
    "periods":[[1,0],[0,1]]},"edges":[]})";
  CHECK_THROWS_WITH_AS(load_graph_spec(unequal), doctest::Contains("n_white != n_black"), SpecError);
  std::string flipped = kZ2;
  flipped.replace(flipped.find("\"sign\":-1"), 9, "\"sign\":1");
  CHECK_THROWS_WITH_AS(load_graph_spec(flipped), doctest::Contains("Kasteleyn flatness violation"), SpecError);
  std::string neg = kZ2;
  neg.replace(neg.find("\"weight\":1"), 10, "\"weight\":0");
  CHECK_THROWS_AS(load_graph_spec(neg), SpecError);
  CHECK_THROWS_AS(load_graph_spec("{not json"), SpecError);
  CHECK_THROWS_AS(load_graph_spec_file("/nonexistent/file.spec"), SpecError);
}

TEST_CASE("patterns") {
  auto g = make_square_octagon();
  auto p = edge_pattern(g, "w1b1", {2, -1});
  CHECK(p.edges.size() == 1);
  CHECK(white_end(g, p.edges[0]).offset == Offset{2, -1});
  Pattern bad;
  bad.edges = {{g.edge_index("w1b1"), {0, 0}}, {g.edge_index("w1b2"), {0, 0}}};
  CHECK_THROWS_WITH_AS(validate_pattern(g, bad), doctest::Contains("shared vertex"), SpecError);
  Pattern ok;
  ok.edges = {{g.edge_index("w1b1"), {0, 0}}, {g.edge_index("w3b3"), {0, 0}}};
  CHECK_NOTHROW(validate_pattern(g, ok));
  auto z = make_z2(1, 1, 1, 1);
  auto pf = load_pattern(z, read(SPECS_DIR "/a_edge.pattern"));
  CHECK(pf.edges[0].edge == z.edge_index("a"));
  auto t = pf.translated({3, 4});
  CHECK(t.edges[0].offset == Offset{3, 4});
}

TEST_CASE("torus enumeration") {
  auto g = make_z2(1, 1, 1, 1);
  auto r = enumerate_torus(g, 2, 2);
  CHECK(r.matchings == 24);
  for (double m : r.marginals) CHECK(m == doctest::Approx(0.25).epsilon(1e-14));
  auto h = make_z2(2, 1, 1, 1);
  auto r3 = enumerate_torus(h, 3, 3);
  double s = 0.0;
  for (double m : r3.marginals) s += m;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(enumerate_torus(g, 5, 5), SpecError);
}
