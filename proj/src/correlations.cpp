#include "dimers/correlations.hpp"

#include <algorithm>
#include <set>

namespace dimers {

cplx kernel_between(const KernelTable& t, const VertexRef& b, const VertexRef& w) {
  return t.at(b.index, w.index, b.offset - w.offset);
}

PatternAnalysis pattern_probability(const KernelTable& t, const GraphSpec& g, const Pattern& p,
                                    const SpectralData* s) {
  validate_pattern(g, p);
  PatternAnalysis pa;
  pa.pattern = p;
  const int k = int(p.edges.size());
  pa.E.resize(k, k);
  cplx kprod = 1.0;
  for (int a = 0; a < k; ++a) {
    kprod *= g.edges[p.edges[a].edge].entry();
    for (int b = 0; b < k; ++b) pa.E(a, b) = kernel_between(t, black_end(g, p.edges[a]), white_end(g, p.edges[b]));
  }
  pa.det_E = pa.E.determinant();
  cplx pr = kprod * pa.det_E;
  pa.probability = pr.real();
  double emax = pa.E.cwiseAbs().maxCoeff();
  pa.invertible = std::abs(pa.det_E) > 1e-13 * std::pow(std::max(emax, 1e-300), k) && pa.probability > 1e-14;
  if (!pa.invertible) {
    pa.probability = std::max(pa.probability, 0.0);
    if (std::abs(pa.det_E) <= 1e-13 * std::pow(std::max(emax, 1e-300), k)) pa.probability = 0.0;
    return pa;
  }
  pa.Einv = pa.E.inverse();
  if (s && s->phase == Phase::liquid_generic && s->liquid) {
    auto& L = *s->liquid;
    pa.liquid = true;
    pa.Qblock.resize(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        VertexRef vb = black_end(g, p.edges[a]), vw = white_end(g, p.edges[b]);
        Offset d = vb.offset - vw.offset;
        pa.Qblock(a, b) = ipow(L.z0, -d.y) * ipow(L.w0, d.x) * L.Q0(vb.index, vw.index);
      }
    Eigen::MatrixXcd X = pa.Einv * pa.Qblock;
    pa.trace_EinvQ = X.trace();
    pa.dipole2 = (X * X).trace();
  }
  return pa;
}

double edge_set_probability(const KernelTable& t, const GraphSpec& g, std::vector<PatternEdge> edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::set<VertexRef> seen;
  for (auto& e : edges)
    if (!seen.insert(white_end(g, e)).second || !seen.insert(black_end(g, e)).second) return 0.0;
  const int k = int(edges.size());
  if (k == 0) return 1.0;
  cplx kprod = 1.0;
  if (k == 1) {
    auto& e = edges[0];
    return (g.edges[e.edge].entry() * kernel_between(t, black_end(g, e), white_end(g, e))).real();
  }
  Eigen::MatrixXcd E(k, k);
  for (int a = 0; a < k; ++a) {
    kprod *= g.edges[edges[a].edge].entry();
    for (int b = 0; b < k; ++b) E(a, b) = kernel_between(t, black_end(g, edges[a]), white_end(g, edges[b]));
  }
  return (kprod * E.determinant()).real();
}

double joint_probability(const KernelTable& t, const GraphSpec& g, const std::vector<Pattern>& patterns) {
  std::vector<PatternEdge> all;
  for (auto& p : patterns) all.insert(all.end(), p.edges.begin(), p.edges.end());
  return edge_set_probability(t, g, all);
}

double pattern_covariance(const KernelTable& t, const GraphSpec& g, const Pattern& p1, const Pattern& p2, Offset o,
                          double pbar1, double pbar2) {
  std::vector<PatternEdge> all = p1.edges;
  for (auto e : p2.edges) {
    e.offset = e.offset + o;
    all.push_back(e);
  }
  return edge_set_probability(t, g, all) - pbar1 * pbar2;
}

double centered_correlation(const KernelTable& t, const GraphSpec& g, const std::vector<PatternEdge>& edges) {
  const int k = int(edges.size());
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (edges[i] == edges[j])
        throw std::invalid_argument("centered_correlation: repeated edge; use moment-level handling for powers");
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(k, k);
  cplx kprod = 1.0;
  for (int i = 0; i < k; ++i) {
    kprod *= g.edges[edges[i].edge].entry();
    for (int j = 0; j < k; ++j)
      if (i != j) M(i, j) = kernel_between(t, black_end(g, edges[i]), white_end(g, edges[j]));
  }
  return (kprod * M.determinant()).real();
}

ConditionalKernel::ConditionalKernel(const KernelTable& t, const GraphSpec& g, const std::vector<PatternEdge>& edges) {
  const int m = int(edges.size());
  L_.resize(m, m);
  for (int i = 0; i < m; ++i) {
    cplx ke = g.edges[edges[i].edge].entry();
    for (int j = 0; j < m; ++j) L_(i, j) = ke * kernel_between(t, black_end(g, edges[i]), white_end(g, edges[j]));
  }
  done_.assign(m, 0);
}

double ConditionalKernel::condition(int i, bool present, double pivot_tol) {
  if (done_[i]) throw std::logic_error("edge already conditioned");
  cplx p = L_(i, i);
  cplx piv = present ? p : p - 1.0;
  if (std::abs(piv) < pivot_tol) throw SamplerError("pivot below tolerance while conditioning");
  const int m = size();
  for (int j = 0; j < m; ++j) {
    if (j == i || done_[j]) continue;
    cplx f = L_(j, i) / piv;
    for (int k = 0; k < m; ++k)
      if (k != i && !done_[k]) L_(j, k) -= f * L_(i, k);
  }
  done_[i] = 1;
  return present ? p.real() : 1.0 - p.real();
}

double inclusion_exclusion_check(const KernelTable& t, const GraphSpec& g, const PatternEdge& e1,
                                 const PatternEdge& e2) {
  if (e1 == e2) throw std::invalid_argument("inclusion_exclusion_check requires distinct edges");
  double p1 = edge_set_probability(t, g, {e1});
  double p12 = edge_set_probability(t, g, {e1, e2});
  ConditionalKernel ck(t, g, {e1, e2});
  double p_not2 = ck.condition(1, false);
  double p1_not2 = p_not2 * ck.probability(0);
  return p1 - p12 - p1_not2;
}

}  // namespace dimers
