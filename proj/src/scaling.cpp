#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "cov_internal.hpp"
#include "dimers/quadrature.hpp"
#include "dimers/scaling.hpp"
#include "dimers/simd.hpp"

namespace dimers {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kStepLo = 2.5;  // bump cutoff starts (in widths)
constexpr double kStepHi = 3.0;  // bump support radius (in widths)

double flat(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// C-infinity step: 1 for s <= 0, 0 for s >= 1.
void smooth_step(double s, double& val, double& deriv) {
  if (s <= 0.0) {
    val = 1.0;
    deriv = 0.0;
    return;
  }
  if (s >= 1.0) {
    val = 0.0;
    deriv = 0.0;
    return;
  }
  double a = flat(1.0 - s), b = flat(s);
  val = a / (a + b);
  deriv = -a * b * (1.0 / ((1.0 - s) * (1.0 - s)) + 1.0 / (s * s)) / ((a + b) * (a + b));
}

double bspline(double t) {
  t = std::abs(t);
  if (t < 1.0) return 2.0 / 3.0 - t * t + 0.5 * t * t * t;
  if (t < 2.0) return (2.0 - t) * (2.0 - t) * (2.0 - t) / 6.0;
  return 0.0;
}

double bspline_d(double t) {
  double a = std::abs(t), sg = t < 0.0 ? -1.0 : 1.0;
  if (a < 1.0) return -2.0 * t + 1.5 * t * a;
  if (a < 2.0) return -sg * 0.5 * (2.0 - a) * (2.0 - a);
  return 0.0;
}

const QuadRule& base_rule(int n) {
  thread_local std::vector<QuadRule> cache(512);
  if (n >= int(cache.size())) cache.resize(n + 1);
  if (cache[n].x.empty()) cache[n] = gauss_legendre(n);
  return cache[n];
}

struct Node {
  cplx u;
  double w;
};

// Cubature adapted to the pieces of f: polar rings split at the bump cutoff,
// or tensor panels on the spline knots.
std::vector<Node> cubature(const TestFunction& f, double level) {
  std::vector<Node> out;
  if (f.kind() == TestFunction::Kind::zero) return out;
  const cplx c = f.center();
  if (f.kind() == TestFunction::Kind::gaussian_bump) {
    const double w = f.support_radius() / kStepHi;
    const int nr = int(std::lround(16 * level)), nt = int(std::lround(32 * level));
    for (auto [lo, hi] : {std::pair{0.0, kStepLo * w}, std::pair{kStepLo * w, kStepHi * w}}) {
      auto q = gauss_legendre(nr, lo, hi);
      for (size_t i = 0; i < q.x.size(); ++i)
        for (int k = 0; k < nt; ++k) {
          double th = 2.0 * kPi * k / nt;
          out.push_back({c + q.x[i] * std::polar(1.0, th), q.w[i] * q.x[i] * 2.0 * kPi / nt});
        }
    }
    return out;
  }
  const double h = f.support_radius() / (2.0 * std::sqrt(2.0));
  const int n = std::max(4, int(std::lround(4 * level)));
  std::vector<double> xs, ws;
  for (int p = -2; p < 2; ++p) {
    auto q = gauss_legendre(n, p * h, (p + 1) * h);
    xs.insert(xs.end(), q.x.begin(), q.x.end());
    ws.insert(ws.end(), q.w.begin(), q.w.end());
  }
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < xs.size(); ++j) out.push_back({c + cplx(xs[i], xs[j]), ws[i] * ws[j]});
  return out;
}

// Points along the ray u + r e where the smoothness of f changes, in [0, inf).
std::vector<double> ray_breaks(const TestFunction& f, cplx u, cplx e) {
  std::vector<double> br;
  const cplx d = u - f.center();
  if (f.kind() == TestFunction::Kind::gaussian_bump) {
    const double w = f.support_radius() / kStepHi;
    double b = (std::conj(e) * d).real(), cc = std::norm(d);
    for (double R : {kStepLo * w, kStepHi * w}) {
      double disc = b * b - (cc - R * R);
      if (disc <= 0.0) continue;
      double s = std::sqrt(disc);
      for (double r : {-b - s, -b + s})
        if (r > 0.0) br.push_back(r);
    }
  } else if (f.kind() == TestFunction::Kind::tensor_spline) {
    const double h = f.support_radius() / (2.0 * std::sqrt(2.0));
    for (int k = -2; k <= 2; ++k) {
      if (std::abs(e.real()) > 1e-14) {
        double r = (k * h - d.real()) / e.real();
        double y = d.imag() + r * e.imag();
        if (r > 0.0 && std::abs(y) <= 2.0 * h) br.push_back(r);
      }
      if (std::abs(e.imag()) > 1e-14) {
        double r = (k * h - d.imag()) / e.imag();
        double x = d.real() + r * e.real();
        if (r > 0.0 && std::abs(x) <= 2.0 * h) br.push_back(r);
      }
    }
  }
  std::sort(br.begin(), br.end());
  return br;
}

// int_0^inf g(u + r e) dr, with g the directional derivative of f along v.
double ray_integral(const TestFunction& f, cplx v, cplx u, cplx e, int nr) {
  auto br = ray_breaks(f, u, e);
  if (br.empty()) return 0.0;
  // Start inside the support when u is inside it.
  double start = std::abs(u - f.center()) < f.support_radius() ? 0.0 : br.front();
  double total = 0.0, lo = start;
  for (double b : br) {
    if (b <= lo + 1e-15) continue;
    const auto& q = base_rule(nr);
    double mid = 0.5 * (lo + b), half = 0.5 * (b - lo);
    for (size_t i = 0; i < q.x.size(); ++i) total += half * q.w[i] * f.directional(u + (mid + half * q.x[i]) * e, v);
    lo = b;
  }
  return total;
}

// int d_{v1,u} G(u,v) g2(v) dv in polar coordinates about u; the 1/r of the
// kernel cancels the area element.
double gradient_potential(const TestFunction& f2, cplx v2, cplx v1, cplx u, double level) {
  const int nr = int(std::lround(16 * level));
  const int nt = int(std::lround(128 * level));
  const double d = std::abs(u - f2.center()), R = f2.support_radius();
  double total = 0.0;
  if (d < R) {
    for (int k = 0; k < nt; ++k) {
      cplx e = std::polar(1.0, 2.0 * kPi * (k + 0.5) / nt);
      total += (std::conj(v1) * e).real() * ray_integral(f2, v2, u, e, nr);
    }
    total *= 2.0 * kPi / nt;
  } else {
    double c = std::arg(f2.center() - u), half = std::asin(std::min(1.0, R / d));
    auto q = gauss_legendre(nt, c - half, c + half);
    for (size_t k = 0; k < q.x.size(); ++k) {
      cplx e = std::polar(1.0, q.x[k]);
      total += q.w[k] * (std::conj(v1) * e).real() * ray_integral(f2, v2, u, e, nr);
    }
  }
  return total / (2.0 * kPi);
}

const double kLevels[] = {1.0, 1.5, 2.0, 3.0, 4.0, 6.0};

}  // namespace

TestFunction TestFunction::zero() { return {}; }

TestFunction TestFunction::gaussian_bump(cplx center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width must be positive");
  TestFunction f;
  f.kind_ = Kind::gaussian_bump;
  f.center_ = center;
  f.scale_ = width;
  return f;
}

TestFunction TestFunction::tensor_spline(cplx center, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("tensor_spline: scale must be positive");
  TestFunction f;
  f.kind_ = Kind::tensor_spline;
  f.center_ = center;
  f.scale_ = h;
  return f;
}

double TestFunction::operator()(cplx u) const {
  cplx d = u - center_;
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::gaussian_bump: {
      double r = std::abs(d) / scale_;
      if (r >= kStepHi) return 0.0;
      double chi, dchi;
      smooth_step((r - kStepLo) / (kStepHi - kStepLo), chi, dchi);
      return std::exp(-0.5 * r * r) * chi;
    }
    case Kind::tensor_spline:
      return bspline(d.real() / scale_) * bspline(d.imag() / scale_);
  }
  return 0.0;
}

cplx TestFunction::grad(cplx u) const {
  cplx d = u - center_;
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::gaussian_bump: {
      double r = std::abs(d) / scale_;
      if (r >= kStepHi || r == 0.0) return 0.0;
      double chi, dchi;
      smooth_step((r - kStepLo) / (kStepHi - kStepLo), chi, dchi);
      double g = std::exp(-0.5 * r * r);
      double dr = (-r * g * chi + g * dchi / (kStepHi - kStepLo)) / scale_;
      return dr * d / std::abs(d);
    }
    case Kind::tensor_spline: {
      double x = d.real() / scale_, y = d.imag() / scale_;
      return cplx(bspline_d(x) * bspline(y), bspline(x) * bspline_d(y)) / scale_;
    }
  }
  return 0.0;
}

double TestFunction::support_radius() const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::gaussian_bump:
      return kStepHi * scale_;
    case Kind::tensor_spline:
      return 2.0 * std::sqrt(2.0) * scale_;
  }
  return 0.0;
}

std::string TestFunction::id() const {
  char buf[128];
  switch (kind_) {
    case Kind::zero:
      return "zero";
    case Kind::gaussian_bump:
      std::snprintf(buf, sizeof buf, "gaussian:%g,%g,%g", center_.real(), center_.imag(), scale_);
      return buf;
    case Kind::tensor_spline:
      std::snprintf(buf, sizeof buf, "spline:%g,%g,%g", center_.real(), center_.imag(), scale_);
      return buf;
  }
  return "";
}

std::string TestFunction::smoothness() const {
  switch (kind_) {
    case Kind::zero:
      return "C_inf";
    case Kind::gaussian_bump:
      return "C_inf";
    case Kind::tensor_spline:
      return "C2";
  }
  return "";
}

TestFunction parse_test_function(const std::string& s) {
  auto colon = s.find(':');
  std::string kind = s.substr(0, colon);
  if (kind == "zero") return TestFunction::zero();
  if (colon == std::string::npos) throw std::invalid_argument("test function needs parameters: " + s);
  std::vector<double> v;
  std::string rest = s.substr(colon + 1);
  size_t pos = 0;
  while (pos <= rest.size()) {
    size_t comma = rest.find(',', pos);
    std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number '" + tok + "' in test function " + s);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (v.size() != 3) throw std::invalid_argument("test function expects cx,cy,scale: " + s);
  if (kind == "gaussian") return TestFunction::gaussian_bump({v[0], v[1]}, v[2]);
  if (kind == "spline") return TestFunction::tensor_spline({v[0], v[1]}, v[2]);
  throw std::invalid_argument("unknown test function family: " + kind);
}

double integrate_square(const TestFunction& f, double rel_tol) {
  if (f.kind() == TestFunction::Kind::zero) return 0.0;
  double prev = 0.0;
  for (int L = 0; L < 6; ++L) {
    double s = 0.0;
    for (auto& nd : cubature(f, kLevels[L])) {
      double v = f(nd.u);
      s += nd.w * v * v;
    }
    if (L > 0 && std::abs(s - prev) <= rel_tol * std::abs(s)) return s;
    prev = s;
  }
  throw std::runtime_error("integrate_square: tolerance not reached");
}

double green_pairing(const TestFunction& f1, cplx v1, const TestFunction& f2, cplx v2, double rel_tol,
                     int max_level) {
  if (f1.kind() == TestFunction::Kind::zero || f2.kind() == TestFunction::Kind::zero) return 0.0;
  if (v1 == 0.0 || v2 == 0.0) return 0.0;
  max_level = std::clamp(max_level, 1, 5);
  double prev = 0.0;
  for (int L = 0; L <= max_level; ++L) {
    double s = 0.0, mag = 0.0;
    for (auto& nd : cubature(f1, kLevels[L])) {
      double a = f1(nd.u);
      if (a == 0.0) continue;
      double term = nd.w * a * gradient_potential(f2, v2, v1, nd.u, kLevels[L]);
      s += term;
      mag += std::abs(term);
    }
    // Integration by parts moved the v1 derivative onto the kernel.
    s = -s / kPi;
    mag /= kPi;
    if (L > 0 && std::abs(s - prev) <= rel_tol * std::max(std::abs(s), 1e-3 * mag)) return s;
    prev = s;
  }
  throw std::runtime_error("green_pairing: requested tolerance unreachable within budget");
}

cplx dipole_vector(const PatternAnalysis& pa) {
  if (!pa.liquid) throw std::invalid_argument("dipole_vector requires a liquid_generic pattern analysis");
  cplx r = std::sqrt(pa.dipole2);
  if (r.real() < 0.0 || (r.real() == 0.0 && r.imag() < 0.0)) r = -r;
  return r;
}

cplx normalized_dipole(const PatternAnalysis& pa, const DualGeometry& geo) {
  if (!pa.liquid) throw std::invalid_argument("normalized_dipole requires a liquid_generic pattern analysis");
  return cplx(0.0, geo.nu) * pa.probability * pa.trace_EinvQ;
}

cplx scaled_position(const GraphSpec& g, const SpectralData& s, Offset o, double eps) {
  return eps * embed_offset(g, s, o);
}

double covariance_lattice_sum(const KernelTable& t, const GraphSpec& g, const SpectralData& s, const Pattern& p1,
                              const Pattern& p2, const TestFunction& psi, double eps) {
  if (t.resonant || s.phase == Phase::liquid_nongeneric)
    throw std::runtime_error("resonant: sum diverges as log(1/eps)");
  if (psi.kind() == TestFunction::Kind::zero) return 0.0;
  detail::PairCovariance cov(t, g, p1, p2);
  // Lattice radius covering the support of psi at scale eps.
  cplx e1 = embed_offset(g, s, {1, 0}), e2 = embed_offset(g, s, {0, 1});
  double area = std::abs((std::conj(e1) * e2).imag());
  double shortest = area / std::max(std::abs(e1), std::abs(e2));
  int R = int(std::ceil((psi.support_radius() + std::abs(psi.center())) / (eps * shortest))) + 1;
  if (R + cov.reach() > t.radius())
    throw std::out_of_range("covariance_lattice_sum: kernel radius " + std::to_string(t.radius()) + " below required " +
                            std::to_string(R + cov.reach()));
  double total = 0.0;
  for (int y = -R; y <= R; ++y) {
    double row = 0.0;
    for (int x = -R; x <= R; ++x) {
      double w = psi(scaled_position(g, s, {x, y}, eps));
      if (w != 0.0) row += cov({x, y}) * w;
    }
    total += row;
  }
  return total;
}

double covariance_sum_limit(double amplitude, double gff_coefficient, cplx d1, cplx d2, const TestFunction& psi,
                            double rel_tol) {
  if (psi.kind() == TestFunction::Kind::zero) return 0.0;
  double point = amplitude * psi(0.0);
  if (gff_coefficient == 0.0 || d1 == 0.0 || d2 == 0.0) return point;
  // One derivative moved onto psi: -(1/2pi) int d1.grad log|u| d2.grad psi.
  double prev = 0.0;
  for (int L = 0; L < 6; ++L) {
    double field = -gff_coefficient * gradient_potential(psi, d2, d1, 0.0, 2.0 * kLevels[L]);
    if (L > 0 && std::abs(field - prev) <= rel_tol * std::max(std::abs(field), std::abs(point))) return point + field;
    prev = field;
  }
  throw std::runtime_error("covariance_sum_limit: tolerance not reached");
}

double free_energy(const SpectralData& s, int N) {
  // Half-shifted nodes never land on torus roots of a real-coefficient curve at angle 0 or pi.
  const auto& K = simd::kernels();
  std::vector<double> wre(N), wim(N), pre(N), pim(N), rows(N);
  for (int j = 0; j < N; ++j) {
    wre[j] = std::cos(2.0 * kPi * (j + 0.5) / N);
    wim[j] = std::sin(2.0 * kPi * (j + 0.5) / N);
  }
  for (int i = 0; i < N; ++i) {
    cplx z = std::polar(1.0, 2.0 * kPi * (i + 0.5) / N);
    auto pc = s.P.w_coeffs(z);
    K.laurent_row(pc.data(), int(pc.size()), s.P.wmin(), wre.data(), wim.data(), pre.data(), pim.data(), N);
    rows[i] = 0.5 * K.sum_log_abs2(pre.data(), pim.data(), N);
  }
  return std::accumulate(rows.begin(), rows.end(), 0.0) / (double(N) * N);
}

double free_energy(const GraphSpec& g, int N) { return free_energy(build_spectral(g), N); }

namespace {

GraphSpec scaled_weights(const GraphSpec& g, const std::vector<std::pair<int, double>>& log_shift) {
  GraphSpec h = g;
  for (auto [e, d] : log_shift) h.edges[e].weight *= std::exp(d);
  return h;
}

}  // namespace

GaseousAmplitude white_noise_gaseous(const GraphSpec& g, const SpectralData& s, int edge, int N, double h,
                                     double max_mismatch) {
  if (s.phase != Phase::gaseous) throw std::invalid_argument("white_noise_gaseous requires the gaseous phase");
  if (edge < 0 || edge >= int(g.edges.size())) throw std::out_of_range("edge index out of range");
  const auto& e = g.edges[edge];
  double first = 0.0, second = 0.0;
  for (int i = 0; i < N; ++i) {
    cplx z = std::polar(1.0, 2.0 * kPi * (i + 0.5) / N);
    double f1 = 0.0, f2 = 0.0;
    for (int j = 0; j < N; ++j) {
      cplx w = std::polar(1.0, 2.0 * kPi * (j + 0.5) / N);
      cplx T = e.entry() * ipow(z, -e.offset.y) * ipow(w, e.offset.x) * s.Q[e.black][e.white].eval(z, w);
      cplx r = T / s.P.eval(z, w);
      f1 += r.real();
      f2 += (r - r * r).real();
    }
    first += f1;
    second += f2;
  }
  GaseousAmplitude out;
  out.probability = first / (double(N) * N);
  out.value = second / (double(N) * N);
  double fp = free_energy(scaled_weights(g, {{edge, h}}), N);
  double f0 = free_energy(s, N);
  double fm = free_energy(scaled_weights(g, {{edge, -h}}), N);
  out.finite_diff = (fp - 2.0 * f0 + fm) / (h * h);
  out.mismatch = std::abs(out.value - out.finite_diff);
  if (out.mismatch > max_mismatch)
    throw std::runtime_error("white_noise_gaseous: integrand and finite-difference routes differ by " +
                             std::to_string(out.mismatch));
  return out;
}

double free_energy_cross_hessian(const GraphSpec& g, int e1, int e2, int N, double h) {
  auto F = [&](double a, double b) { return free_energy(scaled_weights(g, {{e1, a}, {e2, b}}), N); };
  if (e1 == e2) return (F(h, 0) - 2.0 * F(0, 0) + F(-h, 0)) / (h * h);
  return (F(h, h) - F(h, -h) - F(-h, h) + F(-h, -h)) / (4.0 * h * h);
}

double white_noise_lattice_sum(const KernelTable& t, const GraphSpec& g, const Pattern& p1, const Pattern& p2,
                               int radius) {
  if (t.resonant) throw std::runtime_error("resonant: sum diverges as log(1/eps)");
  detail::PairCovariance cov(t, g, p1, p2);
  if (radius + cov.reach() > t.radius()) throw std::out_of_range("white_noise_lattice_sum: kernel table too small");
  double total = 0.0;
  for (int y = -radius; y <= radius; ++y) {
    double row = 0.0;
    for (int x = -radius; x <= radius; ++x) row += cov({x, y});
    total += row;
  }
  return total;
}

double strip_sum_identity(const GraphSpec& g, const SpectralData& s, int y, int M) {
  if (s.n != 1) throw std::invalid_argument("strip_sum_identity requires one vertex of each color per domain");
  auto up = kernel_table_line(s, g, -M, M, y, y);
  auto dn = kernel_table_line(s, g, -M, M, -y, -y);
  double total = 0.0;
  for (int x = -M; x <= M; ++x) total += (up.at(0, 0, {x, y}) * dn.at(0, 0, {-x, -y})).real();
  return total;
}

CycleSum cycle_cancellation(const std::vector<cplx>& u) {
  const int m = int(u.size());
  if (m < 3) throw std::invalid_argument("cycle_cancellation needs at least 3 points");
  if (m > 9) throw std::invalid_argument("cycle_cancellation: m > 9 rejected");
  double scale = 0.0;
  for (auto v : u) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(u[i] - u[j]) <= 1e-14 * std::max(scale, 1e-300))
        throw std::invalid_argument("cycle_cancellation: entries must be pairwise distinct");
  // Each m-cycle is 0 -> perm[0] -> ... -> perm[m-2] -> 0.
  std::vector<int> perm(m - 1);
  std::iota(perm.begin(), perm.end(), 1);
  CycleSum out;
  do {
    cplx prod = 1.0;
    int cur = 0;
    for (int k = 0; k < m - 1; ++k) {
      prod /= u[perm[k]] - u[cur];
      cur = perm[k];
    }
    prod /= u[0] - u[cur];
    out.sum += prod;
    out.max_term = std::max(out.max_term, std::abs(prod));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

std::vector<Pattern> incident_patterns(const GraphSpec& g, const VertexRef& v, std::vector<int>& edges) {
  std::vector<Pattern> out;
  for (int e = 0; e < int(g.edges.size()); ++e) {
    const auto& es = g.edges[e];
    if (v.color == Color::white && es.white == v.index) {
      out.push_back(edge_pattern(g, e, v.offset));
      edges.push_back(e);
    } else if (v.color == Color::black && es.black == v.index) {
      out.push_back(edge_pattern(g, e, v.offset - es.offset));
      edges.push_back(e);
    }
  }
  if (out.size() < 2) throw std::invalid_argument("vertex has degree < 2; not part of a matchable graph");
  return out;
}

}  // namespace

SumRule cross_pattern_sum_rule(const KernelTable& t, const GraphSpec& g, const SpectralData& s, const VertexRef& v,
                               const LiquidOptions& opt) {
  SumRule out;
  auto pats = incident_patterns(g, v, out.edges);
  const int k = int(pats.size());
  out.matrix.assign(k, std::vector<double>(k, 0.0));
  if (s.phase == Phase::gaseous) {
    out.method = "free_energy_hessian";
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j)
        out.matrix[i][j] = out.matrix[j][i] = free_energy_cross_hessian(g, out.edges[i], out.edges[j]);
  } else if (s.phase == Phase::liquid_generic) {
    out.method = "lattice_sum";
    auto geo = liquid_geometry(s, g);
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j)
        out.matrix[i][j] = out.matrix[j][i] = white_noise_liquid(t, g, s, geo, pats[i], pats[j], opt).value;
  } else {
    throw std::invalid_argument("cross_pattern_sum_rule requires a liquid_generic or gaseous phase");
  }
  for (auto& row : out.matrix)
    for (double a : row) {
      out.residual += a;
      out.max_abs = std::max(out.max_abs, std::abs(a));
    }
  return out;
}

EllipticResolution resolve_elliptic_convention(double measured_probability, double measured_amplitude) {
  const double m = 16.0 / 25.0;
  EllipticResolution r;
  auto mismatch = [&](double K, double E) {
    double p = 0.5 - 3.0 * K / (5.0 * kPi);
    double a = (K - E) / (2.0 * kPi);
    return std::max(std::abs(p - measured_probability), std::abs(a - measured_amplitude));
  };
  // std::comp_ellint_* take the modulus k; the parameter reading has k = sqrt(m).
  double Kp = std::comp_ellint_1(std::sqrt(m)), Ep = std::comp_ellint_2(std::sqrt(m));
  double Km = std::comp_ellint_1(m), Em = std::comp_ellint_2(m);
  r.mismatch_parameter = mismatch(Kp, Ep);
  r.mismatch_modulus = mismatch(Km, Em);
  if (r.mismatch_parameter <= r.mismatch_modulus) {
    r.convention = "parameter";
    r.K = Kp;
    r.E = Ep;
  } else {
    r.convention = "modulus";
    r.K = Km;
    r.E = Em;
  }
  return r;
}

Rational parse_rational(const std::string& s) {
  Rational r;
  auto slash = s.find('/');
  try {
    size_t used = 0;
    if (slash == std::string::npos) {
      r.num = std::stol(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      r.den = 1;
    } else {
      std::string a = s.substr(0, slash), b = s.substr(slash + 1);
      r.num = std::stol(a, &used);
      if (used != a.size()) throw std::invalid_argument(s);
      r.den = std::stol(b, &used);
      if (used != b.size()) throw std::invalid_argument(s);
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("not an exact rational: '" + s + "' (use p/q)");
  }
  if (r.den <= 0 || r.num <= 0) throw std::invalid_argument("rational must be positive: " + s);
  long gcd = std::gcd(r.num, r.den);
  r.num /= gcd;
  r.den /= gcd;
  return r;
}

}  // namespace dimers
