#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cov_internal.hpp"
#include "dimers/quadrature.hpp"
#include "dimers/scaling.hpp"

namespace dimers {

namespace detail {

namespace {
int offset_span(const GraphSpec& g, const Pattern& p) {
  int r = 0;
  for (auto& e : p.edges) {
    auto w = white_end(g, e), b = black_end(g, e);
    r = std::max({r, std::abs(w.offset.x), std::abs(w.offset.y), std::abs(b.offset.x), std::abs(b.offset.y)});
  }
  return r;
}
}  // namespace

PairCovariance::PairCovariance(const KernelTable& t, const GraphSpec& g, const Pattern& p1, const Pattern& p2)
    : t_(t), g_(g), p1_(validate_pattern(g, p1)), p2_(validate_pattern(g, p2)) {
  pbar1_ = edge_set_probability(t, g, p1_.edges);
  pbar2_ = edge_set_probability(t, g, p2_.edges);
  reach_ = offset_span(g, p1_) + offset_span(g, p2_) + 1;
  single_ = p1_.edges.size() == 1 && p2_.edges.size() == 1;
  if (single_) {
    k1_ = g.edges[p1_.edges[0].edge].entry();
    k2_ = g.edges[p2_.edges[0].edge].entry();
    b1_ = black_end(g, p1_.edges[0]);
    w1_ = white_end(g, p1_.edges[0]);
    b2_ = black_end(g, p2_.edges[0]);
    w2_ = white_end(g, p2_.edges[0]);
  }
}

double PairCovariance::operator()(Offset x) const {
  if (single_) {
    if (p1_.edges[0].edge == p2_.edges[0].edge && p1_.edges[0].offset == p2_.edges[0].offset + x)
      return pbar1_ * (1.0 - pbar1_);
    // Shared endpoints make the two factors equal to the marginals, which gives -p1 p2.
    cplx a = t_.at(b1_.index, w2_.index, b1_.offset - w2_.offset - x);
    cplx b = t_.at(b2_.index, w1_.index, b2_.offset + x - w1_.offset);
    return -(k1_ * k2_ * a * b).real();
  }
  return pattern_covariance(t_, g_, p1_, p2_, x, pbar1_, pbar2_);
}

}  // namespace detail

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double contour_term(const DualGeometry& geo, cplx d1, cplx d2, int nodes) {
  const cplx X = geo.nu * geo.xhat, Y = geo.nu * geo.yhat;
  const cplx corners[4] = {-X - Y, X - Y, X + Y, -X + Y};
  auto q = gauss_legendre(nodes);
  auto one_way = [&](cplx a, cplx b) {
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      cplx p0 = corners[k], p1 = corners[(k + 1) % 4];
      cplx tangent = (p1 - p0) / std::abs(p1 - p0);
      cplx normal = cplx(0.0, -1.0) * tangent;  // outward for a counterclockwise boundary
      double half = 0.5 * std::abs(p1 - p0);
      double flux = (std::conj(normal) * b).real();
      for (size_t i = 0; i < q.x.size(); ++i) {
        cplx u = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * q.x[i];
        double dG = -(std::conj(a) * u).real() / (2.0 * kPi * std::norm(u));
        total += q.w[i] * half * dG * flux;
      }
    }
    return total / kPi;
  };
  return 0.5 * (one_way(d1, d2) + one_way(d2, d1));
}

LiquidAmplitude white_noise_liquid(const KernelTable& t, const GraphSpec& g, const SpectralData& s,
                                   const DualGeometry& geo, const Pattern& p1, const Pattern& p2,
                                   const LiquidOptions& opt) {
  if (s.phase != Phase::liquid_generic) throw std::invalid_argument("white_noise_liquid requires liquid_generic");
  if (t.resonant) throw std::runtime_error("resonant: sum diverges as log(1/eps)");
  LiquidAmplitude out;
  auto pa1 = pattern_probability(t, g, p1, &s);
  auto pa2 = pattern_probability(t, g, p2, &s);
  if (!pa1.invertible || !pa2.invertible) throw std::invalid_argument("pattern has zero probability");
  out.dipole1 = normalized_dipole(pa1, geo);
  out.dipole2 = normalized_dipole(pa2, geo);
  out.contour = contour_term(geo, out.dipole1, out.dipole2, opt.contour_nodes);

  detail::PairCovariance cov(t, g, p1, p2);
  const int Mmax = opt.max_box;
  if (Mmax + cov.reach() > t.radius())
    throw std::out_of_range("white_noise_liquid: kernel radius " + std::to_string(t.radius()) + " below " +
                            std::to_string(Mmax + cov.reach()));
  const int W = opt.window;
  if (Mmax < 4 * W) throw std::invalid_argument("white_noise_liquid: max_box too small for the averaging window");
  // Box sums S(M) over |x|_inf <= M, grown ring by ring.
  std::vector<double> S(Mmax + 1);
  S[0] = cov({0, 0});
  for (int M = 1; M <= Mmax; ++M) {
    double ring = 0.0;
    for (int x = -M; x <= M; ++x) ring += cov({x, M}) + cov({x, -M});
    for (int y = -M + 1; y <= M - 1; ++y) ring += cov({M, y}) + cov({-M, y});
    S[M] = S[M - 1] + ring;
  }
  for (int M = 1; M <= Mmax; M *= 2) out.partial_sums.push_back({M, S[M]});
  if (out.partial_sums.back().first != Mmax) out.partial_sums.push_back({Mmax, S[Mmax]});
  auto avg = [&](int M) {
    double a = 0.0;
    for (int k = 0; k < W; ++k) a += S[M + k];
    return a / W;
  };
  // Averaged sums converge like 1/M^2; one Richardson step on a doubling pair.
  auto richardson = [&](int M) { return (4.0 * avg(2 * M) - avg(M)) / 3.0; };
  const int Mhi = (Mmax - W + 1) / 2;
  const int Mlo = Mhi / 2;
  double r_hi = richardson(Mhi), r_lo = richardson(Mlo);
  out.lattice = r_hi;
  out.error = std::abs(r_hi - r_lo);
  out.value = out.contour + out.lattice;
  double scale = std::max({std::abs(out.lattice), std::abs(out.contour), 1e-12});
  if (out.error > opt.max_spread * scale) {
    std::ostringstream os;
    os << "white_noise_liquid: lattice sum acceleration not converging (estimates " << r_lo << " at M=" << Mlo
       << ", " << r_hi << " at M=" << Mhi << ")";
    throw std::runtime_error(os.str());
  }
  return out;
}

}  // namespace dimers
