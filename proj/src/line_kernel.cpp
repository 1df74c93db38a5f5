#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dimers/kernel.hpp"
#include "dimers/quadrature.hpp"

namespace dimers {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Roots of sum_t c[t] z^t.
std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
  const int d = int(c.size()) - 1;
  std::vector<cplx> r;
  if (d <= 0) return r;
  if (d == 1) {
    r.push_back(-c[0] / c[1]);
  } else if (d == 2) {
    cplx disc = std::sqrt(c[1] * c[1] - 4.0 * c[2] * c[0]);
    cplx q = -0.5 * (c[1] + (std::real(std::conj(c[1]) * disc) >= 0 ? disc : -disc));
    r.push_back(q / c[2]);
    r.push_back(c[0] / q);
  } else {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) C(i, d - 1) = -c[i] / c[d];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    for (int i = 0; i < d; ++i) r.push_back(es.eigenvalues()(i));
  }
  for (auto& z : r)
    for (int it = 0; it < 2; ++it) {
      cplx p = 0.0, dp = 0.0;
      for (int t = d; t >= 0; --t) {
        dp = dp * z + p;
        p = p * z + c[t];
      }
      if (std::abs(dp) > 0.0) z -= p / dp;
    }
  return r;
}

// Coefficient of z^k in the power series of num/den (den[0] != 0).
cplx series_coeff(const std::vector<cplx>& num, const std::vector<cplx>& den, int k) {
  std::vector<cplx> q(k + 1, 0.0);
  for (int i = 0; i <= k; ++i) {
    cplx v = i < int(num.size()) ? num[i] : cplx(0.0);
    for (int j = 1; j <= i && j < int(den.size()); ++j) v -= den[j] * q[i - j];
    q[i] = v / den[0];
  }
  return q[k];
}

}  // namespace

KernelTable kernel_table_line(const SpectralData& s, const GraphSpec& g, int xmin, int xmax, int ymin, int ymax,
                              double node_factor) {
  if (s.phase == Phase::solid) throw std::runtime_error("kernel coefficients undefined in the solid phase");
  const int n = s.n;
  KernelTable t;
  t.n = n;
  t.xmin = xmin;
  t.xmax = xmax;
  t.ymin = ymin;
  t.ymax = ymax;
  t.method = KernelMethod::refined;
  t.graph_hash = g.hash;
  t.resonant = s.phase == Phase::liquid_nongeneric;
  const int nx = t.nx(), ny = t.ny();
  t.data.assign(size_t(n) * n * nx * ny, 0.0);

  // Arcs in the w-angle, split where a root in z crosses the unit circle.
  std::vector<double> cuts;
  for (auto& r : s.roots) cuts.push_back(std::remainder(r.phi, kTwoPi));
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> arcs;
  if (cuts.empty()) {
    arcs.push_back({0.0, kTwoPi});
  } else {
    for (size_t i = 0; i < cuts.size(); ++i) {
      double a = cuts[i], b = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + kTwoPi;
      if (b - a > 1e-12) arcs.push_back({a, b});
    }
  }
  const int span = std::max({std::abs(xmin), std::abs(xmax), std::abs(ymin), std::abs(ymax)});
  int per_arc = int(std::ceil(node_factor * span)) + 80;
  per_arc += per_arc % 2;  // even count keeps nodes off arc midpoints
  t.grid = per_arc;

  std::vector<double> phi, wt;
  for (auto& [a, b] : arcs) {
    QuadRule q = gauss_legendre(per_arc, a, b);
    phi.insert(phi.end(), q.x.begin(), q.x.end());
    wt.insert(wt.end(), q.w.begin(), q.w.end());
  }
  const int M = int(phi.size());

  const int kmin = s.P.zmin(), kmax = s.P.zmax();
  Laurent2 dPz;  // z-derivative as a Laurent polynomial
  for (auto& [k, c] : s.P.terms())
    if (k.first != 0) dPz += Laurent2::monomial(c * double(k.first), k.first - 1, k.second);

  // G[pair](node, y): inner contour integral in z at fixed w.
  std::vector<Eigen::MatrixXcd> G(n * n, Eigen::MatrixXcd::Zero(M, ny));
  for (int j = 0; j < M; ++j) {
    cplx w = std::polar(1.0, phi[j]);
    auto pc = s.P.z_coeffs(w);
    auto roots = poly_roots(pc);
    std::vector<cplx> dp(roots.size());
    std::vector<Eigen::MatrixXcd> qv(roots.size());
    for (size_t r = 0; r < roots.size(); ++r) {
      dp[r] = dPz.eval(roots[r], w);
      qv[r] = s.Q_at(roots[r], w);
    }
    for (int b = 0; b < n; ++b)
      for (int wi = 0; wi < n; ++wi) {
        const Laurent2& q = s.Q[b][wi];
        if (q.is_zero()) continue;
        const int qmin = q.zmin(), qmax = q.zmax();
        auto& Gp = G[b * n + wi];
        std::vector<cplx> qc;
        for (int yi = 0; yi < ny; ++yi) {
          const int y = ymin + yi;
          cplx acc = 0.0;
          if (y >= qmax - kmax + 1) {
            for (size_t r = 0; r < roots.size(); ++r)
              if (std::abs(roots[r]) > 1.0)
                acc -= std::exp(double(-y - 1) * std::log(roots[r])) * qv[r](b, wi) / dp[r];
          } else {
            for (size_t r = 0; r < roots.size(); ++r)
              if (std::abs(roots[r]) <= 1.0)
                acc += std::exp(double(-y - 1) * std::log(roots[r])) * qv[r](b, wi) / dp[r];
            int order = y + kmin - qmin;
            if (order >= 0) {
              if (qc.empty()) qc = q.z_coeffs(w);
              acc += series_coeff(qc, pc, order);
            }
          }
          Gp(j, yi) = acc;
        }
      }
  }

  // Outer integral (1/2pi) sum_j wt_j w_j^x G(j, y), in row chunks.
  const int chunk = 128;
  Eigen::MatrixXcd E(chunk, M);
  for (int x0 = xmin; x0 <= xmax; x0 += chunk) {
    const int rows = std::min(chunk, xmax - x0 + 1);
    for (int j = 0; j < M; ++j) {
      cplx step = std::polar(1.0, phi[j]);
      cplx v = std::polar(wt[j] / kTwoPi, double(x0) * phi[j]);
      for (int r = 0; r < rows; ++r) {
        E(r, j) = v;
        v *= step;
      }
    }
    for (int p = 0; p < n * n; ++p) {
      Eigen::MatrixXcd C = E.topRows(rows) * G[p];
      const int b = p / n, wi = p % n;
      for (int r = 0; r < rows; ++r)
        for (int yi = 0; yi < ny; ++yi) t.data[t.index(b, wi, {x0 + r, ymin + yi})] = C(r, yi);
    }
  }
  return t;
}

}  // namespace dimers
