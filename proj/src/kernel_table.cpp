#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "dimers/kernel.hpp"
#include "dimers/simd.hpp"

namespace dimers {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

const char* method_name(KernelMethod m) {
  switch (m) {
    case KernelMethod::fft_grid:
      return "fft_grid";
    case KernelMethod::refined:
      return "refined";
    case KernelMethod::asymptotic:
      return "asymptotic";
  }
  return "?";
}

int KernelTable::radius() const {
  return std::min({-xmin, xmax, -ymin, ymax});
}

cplx KernelTable::at(int b, int w, Offset o) const {
  if (!contains(o))
    throw std::out_of_range("kernel offset (" + std::to_string(o.x) + "," + std::to_string(o.y) +
                            ") outside cached box");
  return data[index(b, w, o)];
}

cplx kernel_coefficient(const KernelTable& t, int b, int w, Offset o) { return t.at(b, w, o); }

KernelTable kernel_table_fft(const SpectralData& s, const GraphSpec& g, int N, int radius) {
  if (radius >= N / 2) throw std::invalid_argument("kernel radius must be below N/2");
  if (s.phase == Phase::solid) throw std::runtime_error("kernel coefficients undefined in the solid phase");
  const int n = s.n;
  KernelTable t;
  t.n = n;
  t.xmin = t.ymin = -radius;
  t.xmax = t.ymax = radius;
  t.grid = N;
  t.method = KernelMethod::fft_grid;
  t.graph_hash = g.hash;
  t.resonant = s.phase == Phase::liquid_nongeneric;
  t.data.assign(size_t(n) * n * t.nx() * t.ny(), 0.0);

  const auto& K = simd::kernels();
  std::vector<double> wre(N), wim(N);
  for (int k = 0; k < N; ++k) {
    double ph = 2.0 * kPi * (k + 0.5) / N;
    wre[k] = std::cos(ph);
    wim[k] = std::sin(ph);
  }
  // Q/P on the grid, one N x N complex array per (b,w).
  std::vector<fftw_complex*> grids(n * n);
  for (auto& p : grids) p = fftw_alloc_complex(size_t(N) * N);
  std::vector<double> pre(N), pim(N), qre(N), qim(N), rre(N), rim(N);
  for (int j = 0; j < N; ++j) {
    cplx z = std::polar(1.0, 2.0 * kPi * (j + 0.5) / N);
    auto pc = s.P.w_coeffs(z);
    K.laurent_row(pc.data(), int(pc.size()), s.P.wmin(), wre.data(), wim.data(), pre.data(), pim.data(), N);
    for (int b = 0; b < n; ++b)
      for (int w = 0; w < n; ++w) {
        fftw_complex* dst = grids[b * n + w] + size_t(j) * N;
        const Laurent2& q = s.Q[b][w];
        if (q.is_zero()) {
          for (int k = 0; k < N; ++k) dst[k][0] = dst[k][1] = 0.0;
          continue;
        }
        auto qc = q.w_coeffs(z);
        K.laurent_row(qc.data(), int(qc.size()), q.wmin(), wre.data(), wim.data(), qre.data(), qim.data(), N);
        K.cdiv(qre.data(), qim.data(), pre.data(), pim.data(), rre.data(), rim.data(), N);
        for (int k = 0; k < N; ++k) {
          dst[k][0] = rre[k];
          dst[k][1] = rim[k];
        }
      }
  }
  for (int p = 0; p < n * n; ++p) {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      plan = fftw_plan_dft_2d(N, N, grids[p], grids[p], FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
    const int b = p / n, w = p % n;
    const double norm = 1.0 / (double(N) * N);
    for (int y = -radius; y <= radius; ++y)
      for (int x = -radius; x <= radius; ++x) {
        // Row index carries z^{-y}, column index carries w^{x}.
        int jy = ((y % N) + N) % N, kx = ((-x % N) + N) % N;
        cplx v(grids[p][size_t(jy) * N + kx][0], grids[p][size_t(jy) * N + kx][1]);
        v *= std::polar(norm, kPi * (x - y) / N);
        t.data[t.index(b, w, {x, y})] = v;
      }
    fftw_free(grids[p]);
  }
  return t;
}

KernelTable make_kernel_table(const SpectralData& s, const GraphSpec& g, int radius, const KernelOptions& opt) {
  if (s.phase == Phase::solid) throw std::runtime_error("kernel coefficients undefined in the solid phase");
  if (s.phase == Phase::liquid_generic && opt.refine)
    return kernel_table_line(s, g, -radius, radius, -radius, radius);
  int N = opt.grid;
  if (N == 0) N = s.phase == Phase::gaseous ? 256 : 1024;
  while (radius >= N / 2) N *= 2;
  return kernel_table_fft(s, g, N, radius);
}

AsymptoticEvaluator::AsymptoticEvaluator(const SpectralData& s) {
  if (s.phase != Phase::liquid_generic || !s.liquid)
    throw std::runtime_error("asymptotic evaluator requires the liquid_generic phase");
  L_ = *s.liquid;
}

double AsymptoticEvaluator::eval(int b, int w, Offset o) const {
  if (o.x == 0 && o.y == 0) throw std::invalid_argument("asymptotic formula is singular at offset (0,0)");
  cplx num = ipow(L_.z0, -o.y) * ipow(L_.w0, o.x) * L_.Q0(b, w);
  cplx den = kPi * (double(o.x) * L_.xhat + double(o.y) * L_.yhat);
  return (num / den).real();
}

double asymptotic_coefficient(const AsymptoticEvaluator& a, int b, int w, Offset o) { return a.eval(b, w, o); }

DecayFit decay_rate(const KernelTable& t, int max_radius) {
  if (max_radius > t.xmax) throw std::out_of_range("decay_rate: max_radius exceeds the table");
  std::vector<double> r, lv;
  double env0 = 0.0;
  for (int b = 0; b < t.n; ++b)
    for (int w = 0; w < t.n; ++w) env0 = std::max(env0, std::abs(t.at(b, w, {0, 0})));
  for (int x = 1; x <= max_radius; ++x) {
    double env = 0.0;
    for (int b = 0; b < t.n; ++b)
      for (int w = 0; w < t.n; ++w) env = std::max(env, std::abs(t.at(b, w, {x, 0})));
    // Stop at the round-off floor of the quadrature.
    if (env < 1e-13 * env0) break;
    r.push_back(x);
    lv.push_back(std::log(env));
  }
  DecayFit f;
  f.points = int(r.size());
  if (r.size() < 3) throw std::runtime_error("insufficient dynamic range");
  double lo = *std::min_element(lv.begin(), lv.end()), hi = *std::max_element(lv.begin(), lv.end());
  if (hi - lo < 2.0 * std::log(10.0)) throw std::runtime_error("insufficient dynamic range");
  auto fit = [&](const std::vector<double>& X, double& slope) {
    const double m = double(X.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < X.size(); ++i) {
      sx += X[i];
      sy += lv[i];
      sxx += X[i] * X[i];
      sxy += X[i] * lv[i];
    }
    slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double icpt = (sy - slope * sx) / m;
    double rss = 0;
    for (size_t i = 0; i < X.size(); ++i) rss += std::pow(lv[i] - icpt - slope * X[i], 2);
    return rss;
  };
  std::vector<double> logr(r.size());
  for (size_t i = 0; i < r.size(); ++i) logr[i] = std::log(r[i]);
  double se, sp;
  f.rss_exp = fit(r, se);
  f.rss_pow = fit(logr, sp);
  f.rate = -se;
  f.exponent = -sp;
  f.exponential = f.rss_exp < f.rss_pow;
  return f;
}

namespace {

template <class T>
void put(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw std::runtime_error("truncated kernel table file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

constexpr char kMagic[8] = {'D', 'I', 'M', 'K', 'T', 'B', 'L', '1'};

}  // namespace

void dump_kernel_table(const KernelTable& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write(kMagic, 8);
  put<std::uint64_t>(os, t.graph_hash);
  put<std::int32_t>(os, t.grid);
  put<std::int32_t>(os, t.radius());
  put<std::int32_t>(os, t.n);
  put<std::int32_t>(os, t.xmin);
  put<std::int32_t>(os, t.xmax);
  put<std::int32_t>(os, t.ymin);
  put<std::int32_t>(os, t.ymax);
  put<std::int32_t>(os, int(t.method));
  put<std::int32_t>(os, t.resonant ? 1 : 0);
  for (auto& v : t.data) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
}

KernelTable load_kernel_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a kernel table file: " + path);
  KernelTable t;
  t.graph_hash = get<std::uint64_t>(is);
  t.grid = get<std::int32_t>(is);
  get<std::int32_t>(is);  // max_radius, derived from the box
  t.n = get<std::int32_t>(is);
  t.xmin = get<std::int32_t>(is);
  t.xmax = get<std::int32_t>(is);
  t.ymin = get<std::int32_t>(is);
  t.ymax = get<std::int32_t>(is);
  t.method = KernelMethod(get<std::int32_t>(is));
  t.resonant = get<std::int32_t>(is) != 0;
  t.data.resize(size_t(t.n) * t.n * t.nx() * t.ny());
  for (auto& v : t.data) {
    double re = get<double>(is);
    double im = get<double>(is);
    v = {re, im};
  }
  return t;
}

}  // namespace dimers
