#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimers/graph.hpp"
#include "dimers/spectral.hpp"

namespace dimers {

enum class KernelMethod { fft_grid, refined, asymptotic };
const char* method_name(KernelMethod m);

// Inverse Kasteleyn coefficients K^-1(b_{x,y}, w) on a rectangular box of offsets.
struct KernelTable {
  int n = 0;
  int xmin = 0, xmax = -1, ymin = 0, ymax = -1;
  int grid = 0;  // FFT grid size, or Gauss nodes per arc for the refined path
  KernelMethod method = KernelMethod::fft_grid;
  std::uint64_t graph_hash = 0;
  bool resonant = false;  // liquid_nongeneric: values defined, scaling limits diverge
  std::vector<cplx> data;

  int nx() const { return xmax - xmin + 1; }
  int ny() const { return ymax - ymin + 1; }
  int radius() const;  // largest R with [-R,R]^2 inside the box
  bool contains(Offset o) const { return o.x >= xmin && o.x <= xmax && o.y >= ymin && o.y <= ymax; }
  size_t index(int b, int w, Offset o) const {
    return (size_t(b * n + w) * ny() + (o.y - ymin)) * nx() + (o.x - xmin);
  }
  cplx at(int b, int w, Offset o) const;  // throws outside the box
  KernelMethod method_at(Offset) const { return method; }
};

// Torus grid of size N (half-shifted nodes) and one 2-D FFT per vertex pair;
// offsets |x|,|y| <= radius < N/2.
KernelTable kernel_table_fft(const SpectralData& s, const GraphSpec& g, int N, int radius);

// Residue evaluation in z followed by Gauss-Legendre in w on arcs split at the
// torus roots; accurate for liquid graphs at any offset.
KernelTable kernel_table_line(const SpectralData& s, const GraphSpec& g, int xmin, int xmax, int ymin, int ymax,
                              double node_factor = 1.5);

struct KernelOptions {
  int grid = 0;  // 0: 256 gaseous, 1024 otherwise
  bool refine = true;  // liquid: use the residue/line path
};

// Square table |x|,|y| <= radius using the method appropriate to the phase.
KernelTable make_kernel_table(const SpectralData& s, const GraphSpec& g, int radius, const KernelOptions& opt = {});

cplx kernel_coefficient(const KernelTable& t, int b, int w, Offset o);

// Leading liquid asymptotic term; the sign is that of the quadrature at the
// direct-frame root.
class AsymptoticEvaluator {
public:
  explicit AsymptoticEvaluator(const SpectralData& s);
  double eval(int b, int w, Offset o) const;

private:
  LiquidData L_;
};

double asymptotic_coefficient(const AsymptoticEvaluator& a, int b, int w, Offset o);

struct DecayFit {
  bool exponential = false;
  double rate = 0.0;      // exponential model: |K^-1| ~ C exp(-rate r)
  double exponent = 0.0;  // power model: |K^-1| ~ C r^-exponent
  double rss_exp = 0.0, rss_pow = 0.0;
  int points = 0;
};

DecayFit decay_rate(const KernelTable& t, int max_radius);

void dump_kernel_table(const KernelTable& t, const std::string& path);
KernelTable load_kernel_table(const std::string& path);

}  // namespace dimers
