#include "dimers/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <functional>
#include <limits>
#include <numeric>
#include <tuple>

namespace dimers {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Determinant of a Laurent matrix by permutation expansion; rows/cols select a minor.
Laurent2 perm_det(const std::vector<std::vector<Laurent2>>& K, const std::vector<int>& rows,
                  const std::vector<int>& cols) {
  const int m = int(rows.size());
  if (m == 0) return Laurent2(1.0);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Laurent2 det;
  do {
    int inv = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (perm[i] > perm[j]) ++inv;
    Laurent2 prod(inv % 2 ? -1.0 : 1.0);
    bool zero = false;
    for (int i = 0; i < m && !zero; ++i) {
      auto& e = K[rows[i]][cols[perm[i]]];
      if (e.is_zero())
        zero = true;
      else
        prod = prod * e;
    }
    if (!zero) det += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

struct Range {
  int lo, hi;
};

// Recover Laurent coefficients of f from samples on a shifted torus grid.
Laurent2 sample_laurent(const std::function<cplx(cplx, cplx)>& f, Range rz, Range rw) {
  const int Nz = rz.hi - rz.lo + 1, Nw = rw.hi - rw.lo + 1;
  const double dz = 0.3183098861837907, dw = 0.2718281828459045;  // shifts avoid special torus points
  std::vector<cplx> vals(Nz * Nw);
  for (int j = 0; j < Nz; ++j)
    for (int k = 0; k < Nw; ++k)
      vals[j * Nw + k] = f(std::polar(1.0, kTwoPi * j / Nz + dz), std::polar(1.0, kTwoPi * k / Nw + dw));
  Laurent2 out;
  for (int a = rz.lo; a <= rz.hi; ++a)
    for (int b = rw.lo; b <= rw.hi; ++b) {
      cplx c = 0.0;
      for (int j = 0; j < Nz; ++j)
        for (int k = 0; k < Nw; ++k)
          c += vals[j * Nw + k] * std::polar(1.0, -(a * (kTwoPi * j / Nz + dz) + b * (kTwoPi * k / Nw + dw)));
      c /= double(Nz * Nw);
      out += Laurent2::monomial(c, a, b);
    }
  out.prune(1e-13);
  return out;
}

Eigen::MatrixXcd numeric_adjugate(const Eigen::MatrixXcd& K) {
  const int n = int(K.rows());
  if (n == 1) return Eigen::MatrixXcd::Ones(1, 1);
  // adj(K) = det(K) K^{-1} via SVD, stable when K is close to singular.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(K, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& S = svd.singularValues();
  cplx detU = svd.matrixU().determinant(), detV = svd.matrixV().determinant();
  Eigen::MatrixXcd adj = Eigen::MatrixXcd::Zero(n, n);
  // adj = V diag(prod_{j != i} s_j) U^H * det(U) conj(det(V))
  for (int i = 0; i < n; ++i) {
    cplx p = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) p *= S(j);
    adj += p * svd.matrixV().col(i) * svd.matrixU().col(i).adjoint();
  }
  return adj * (detU * std::conj(detV));
}

}  // namespace

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::solid:
      return "solid";
    case Phase::liquid_generic:
      return "liquid_generic";
    case Phase::liquid_nongeneric:
      return "liquid_nongeneric";
    case Phase::gaseous:
      return "gaseous";
  }
  return "?";
}

Eigen::MatrixXcd SpectralData::K_at(cplx z, cplx w) const {
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = K[i][j].eval(z, w);
  return M;
}

Eigen::MatrixXcd SpectralData::Q_at(cplx z, cplx w) const {
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = Q[i][j].eval(z, w);
  return M;
}

SpectralData build_spectral(const GraphSpec& g, int exact_limit) {
  SpectralData s;
  s.n = g.n;
  const int n = g.n;
  s.K.assign(n, std::vector<Laurent2>(n));
  for (auto& e : g.edges) s.K[e.white][e.black] += Laurent2::monomial(e.entry(), -e.offset.y, e.offset.x);

  s.Q.assign(n, std::vector<Laurent2>(n));
  if (n <= exact_limit) {
    s.exact = true;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    s.P = perm_det(s.K, all, all);
    for (int b = 0; b < n; ++b)
      for (int w = 0; w < n; ++w) {
        std::vector<int> rows, cols;
        for (int i = 0; i < n; ++i)
          if (i != w) rows.push_back(i);
        for (int j = 0; j < n; ++j)
          if (j != b) cols.push_back(j);
        Laurent2 m = perm_det(s.K, rows, cols);
        s.Q[b][w] = ((b + w) % 2) ? m * cplx(-1.0) : m;
      }
  } else {
    s.exact = false;
    std::vector<Range> rz(n), rw(n);
    for (int i = 0; i < n; ++i) {
      rz[i] = {1 << 20, -(1 << 20)};
      rw[i] = {1 << 20, -(1 << 20)};
      for (int j = 0; j < n; ++j) {
        if (s.K[i][j].is_zero()) continue;
        rz[i] = {std::min(rz[i].lo, s.K[i][j].zmin()), std::max(rz[i].hi, s.K[i][j].zmax())};
        rw[i] = {std::min(rw[i].lo, s.K[i][j].wmin()), std::max(rw[i].hi, s.K[i][j].wmax())};
      }
    }
    auto sum_except = [&](const std::vector<Range>& r, int skip) {
      Range t{0, 0};
      for (int i = 0; i < n; ++i)
        if (i != skip) t = {t.lo + r[i].lo, t.hi + r[i].hi};
      return t;
    };
    s.P = sample_laurent([&](cplx z, cplx w) { return s.K_at(z, w).determinant(); }, sum_except(rz, -1),
                         sum_except(rw, -1));
    for (int b = 0; b < n; ++b)
      for (int w = 0; w < n; ++w)
        s.Q[b][w] = sample_laurent([&](cplx z, cplx ww) { return numeric_adjugate(s.K_at(z, ww))(b, w); },
                                   sum_except(rz, w), sum_except(rw, w));
  }
  s.scale = std::max(s.P.l1_norm(), 1e-300);
  return s;
}

std::vector<TorusRoot> find_torus_roots(const SpectralData& s, const RootOptions& opt,
                                        std::vector<std::string>* dropped) {
  const int G = std::max(opt.grid, 64);
  const double h = kTwoPi / G;
  std::vector<double> mag(G * G);
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) mag[i * G + j] = std::abs(s.P.eval(std::polar(1.0, i * h), std::polar(1.0, j * h)));

  // Bound on |grad P| in the torus angles, to decide which minima are worth polishing.
  double gbound = 0.0;
  for (auto& [k, c] : s.P.terms()) gbound += std::abs(c) * (std::abs(k.first) + std::abs(k.second));
  const double seed_thresh = 2.0 * gbound * h + 1e-12 * s.scale;

  auto f_and_grad = [&](double th, double ph, cplx& f, cplx& ft, cplx& fp) {
    cplx z = std::polar(1.0, th), w = std::polar(1.0, ph);
    f = s.P.eval(z, w);
    ft = cplx(0, 1) * z * s.P.dz(z, w);
    fp = cplx(0, 1) * w * s.P.dw(z, w);
  };

  std::vector<TorusRoot> roots;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      double m = mag[i * G + j];
      if (m > seed_thresh) continue;
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (!di && !dj) continue;
          double o = mag[((i + di + G) % G) * G + (j + dj + G) % G];
          if (o < m || (o == m && (di * G + dj) < 0)) {
            is_min = false;
            break;
          }
        }
      if (!is_min) continue;

      // Damped Newton in (theta, phi); trying a doubled step recovers fast
      // convergence at double roots.
      double th = i * h, ph = j * h;
      cplx f, ft, fp;
      f_and_grad(th, ph, f, ft, fp);
      for (int it = 0; it < 300 && std::abs(f) > 1e-15 * s.scale; ++it) {
        Eigen::Matrix2d J;
        J << ft.real(), fp.real(), ft.imag(), fp.imag();
        Eigen::Vector2d rhs(-f.real(), -f.imag());
        Eigen::Vector2d d = J.completeOrthogonalDecomposition().solve(rhs);
        if (!d.allFinite()) break;
        double best = std::abs(f), bth = th, bph = ph;
        for (double t : {2.0, 1.0, 0.5, 0.25, 0.125, 0.0625}) {
          double nth = th + t * d(0), nph = ph + t * d(1);
          double v = std::abs(s.P.eval(std::polar(1.0, nth), std::polar(1.0, nph)));
          if (v < best) {
            best = v;
            bth = nth;
            bph = nph;
          }
        }
        if (bth == th && bph == ph) break;
        th = bth;
        ph = bph;
        f_and_grad(th, ph, f, ft, fp);
      }
      if (std::abs(f) > opt.tol * s.scale) {
        if (dropped)
          dropped->push_back("seed (" + std::to_string(i * h) + "," + std::to_string(j * h) +
                             ") did not converge: |P| = " + std::to_string(std::abs(f)));
        continue;
      }
      th = std::remainder(th, kTwoPi);
      ph = std::remainder(ph, kTwoPi);
      bool dup = false;
      for (auto& r : roots) {
        double dt = std::abs(std::remainder(r.theta - th, kTwoPi));
        double dp = std::abs(std::remainder(r.phi - ph, kTwoPi));
        if (std::hypot(dt, dp) < opt.dedup) dup = true;
      }
      if (dup) continue;
      TorusRoot r;
      r.theta = th;
      r.phi = ph;
      r.z = std::polar(1.0, th);
      r.w = std::polar(1.0, ph);
      r.residual = std::abs(f);
      r.grad_norm = std::sqrt(std::norm(ft) + std::norm(fp));
      // The zero is degenerate when the real 2x2 Jacobian of (Re P, Im P) in
      // (theta, phi) is singular, i.e. the two curves Re P = 0, Im P = 0 touch.
      r.jacobian = (std::conj(ft) * fp).imag();
      r.double_root = std::abs(r.jacobian) < opt.double_tol * s.scale * s.scale;
      roots.push_back(r);
    }
  std::sort(roots.begin(), roots.end(), [](auto& a, auto& b) {
    return std::tie(a.theta, a.phi) < std::tie(b.theta, b.phi);
  });
  return roots;
}

Phase classify_phase(const SpectralData& s, const std::vector<TorusRoot>& roots, std::string* note) {
  auto say = [&](const std::string& m) {
    if (note) *note = m;
  };
  if (s.P.is_zero()) {
    say("P vanishes identically");
    return Phase::solid;
  }
  if (roots.empty()) {
    say("no torus roots");
    return Phase::gaseous;
  }
  if (roots.size() == 1) {
    auto& r = roots[0];
    bool real = std::abs(r.z.imag()) < 1e-6 && std::abs(r.w.imag()) < 1e-6;
    if (r.double_root && real) {
      say("one double real root (boundary of the liquid region)");
      return Phase::liquid_nongeneric;
    }
    if (real)
      throw std::runtime_error("ambiguous root structure: single real root with gradient " +
                               std::to_string(r.grad_norm) + " could be liquid_nongeneric or liquid_generic");
    throw std::runtime_error("ambiguous root structure: a single non-real torus root");
  }
  if (roots.size() == 2) {
    auto& a = roots[0];
    auto& b = roots[1];
    bool conj = std::abs(a.z - std::conj(b.z)) < 1e-7 && std::abs(a.w - std::conj(b.w)) < 1e-7;
    double sep = std::abs(a.z - b.z) + std::abs(a.w - b.w);
    if (conj && !a.double_root && !b.double_root) {
      if (sep < 1e-4)
        throw std::runtime_error("ambiguous root structure: conjugate roots separated by " + std::to_string(sep) +
                                 "; liquid_generic or liquid_nongeneric");
      say("two simple conjugate roots");
      return Phase::liquid_generic;
    }
    throw std::runtime_error("ambiguous root structure: two roots that are not a simple conjugate pair; "
                             "liquid_generic or solid");
  }
  say(std::to_string(roots.size()) + " torus roots; degenerate spectral curve, unsupported");
  return Phase::solid;
}

SpectralData analyze_spectral(const GraphSpec& g, const RootOptions& opt, int exact_limit) {
  SpectralData s = build_spectral(g, exact_limit);
  s.roots = find_torus_roots(s, opt);
  s.phase = classify_phase(s, s.roots, &s.phase_note);
  // Minimum of |P| on a grid, reported by the phase command.
  const int G = 256;
  s.min_abs_P = std::numeric_limits<double>::infinity();
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      double th = kTwoPi * i / G, ph = kTwoPi * j / G;
      double v = std::abs(s.P.eval(std::polar(1.0, th), std::polar(1.0, ph)));
      if (v < s.min_abs_P) {
        s.min_abs_P = v;
        s.min_theta = th;
        s.min_phi = ph;
      }
    }
  for (auto& r : s.roots)
    if (r.residual < s.min_abs_P) {
      s.min_abs_P = r.residual;
      s.min_theta = r.theta;
      s.min_phi = r.phi;
    }
  if (s.phase == Phase::liquid_generic) {
    LiquidData best;
    bool found = false;
    for (auto& r : s.roots) {
      cplx a = s.P.dz(r.z, r.w), b = s.P.dw(r.z, r.w);
      double im = (r.w * b / (r.z * a)).imag();
      if (im > 1e-12) {
        best.z0 = r.z;
        best.w0 = r.w;
        best.alpha = a;
        best.beta = b;
        found = true;
      }
    }
    if (!found) throw std::runtime_error("degenerate frame: no root satisfies the direct-frame condition");
    best.xhat = cplx(0, 1) * best.z0 * best.alpha;
    best.yhat = cplx(0, 1) * best.w0 * best.beta;
    best.Q0 = s.Q_at(best.z0, best.w0);
    s.liquid = best;
  }
  return s;
}

std::vector<cplx> DualGeometry::dual_edge() const {
  std::vector<cplx> out(omega.size());
  for (size_t i = 0; i < omega.size(); ++i) out[i] = nu * omega[i];
  return out;
}

DualGeometry liquid_geometry(const SpectralData& s, const GraphSpec& g) {
  if (s.phase != Phase::liquid_generic || !s.liquid) throw std::runtime_error("liquid_geometry: phase is not liquid_generic");
  auto& L = *s.liquid;
  DualGeometry d;
  d.xhat = L.xhat;
  d.yhat = L.yhat;
  d.area = (std::conj(L.xhat) * L.yhat).imag();
  if (!(d.area > 0.0)) throw std::runtime_error("degenerate frame: dual area is not positive");
  d.nu = 1.0 / std::sqrt(d.area);
  std::vector<cplx> div_w(g.n, 0.0), div_b(g.n, 0.0);
  cplx xs = 0.0, ys = 0.0;
  for (auto& e : g.edges) {
    cplx mono = ipow(L.z0, -e.offset.y) * ipow(L.w0, e.offset.x);
    cplx om = cplx(0, 1) * e.entry() * mono * L.Q0(e.black, e.white);
    d.omega.push_back(om);
    div_w[e.white] += om;
    div_b[e.black] += om;
    xs -= double(e.offset.y) * om;
    ys += double(e.offset.x) * om;
  }
  d.xhat_crossing = xs;
  d.yhat_crossing = ys;
  for (int i = 0; i < g.n; ++i)
    d.divergence_residual = std::max({d.divergence_residual, std::abs(div_w[i]), std::abs(div_b[i])});
  return d;
}

cplx embed_offset(const GraphSpec& g, const SpectralData& s, Offset o) {
  if (s.phase == Phase::liquid_generic && s.liquid) {
    auto& L = *s.liquid;
    double area = (std::conj(L.xhat) * L.yhat).imag();
    return (double(o.x) * L.xhat + double(o.y) * L.yhat) / std::sqrt(area);
  }
  Point p = g.lattice_point(o);
  return {p.x, p.y};
}

}  // namespace dimers
