#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimers/correlations.hpp"
#include "dimers/graph.hpp"
#include "dimers/kernel.hpp"
#include "dimers/spectral.hpp"

namespace dimers {

// Compactly supported test functions on the plane (points as complex numbers).
class TestFunction {
public:
  enum class Kind { zero, gaussian_bump, tensor_spline };

  static TestFunction zero();
  // exp(-|u-c|^2 / (2 width^2)), cut off smoothly between 2.5 and 3 widths.
  static TestFunction gaussian_bump(cplx center, double width);
  // Product of cubic B-splines of scale h.
  static TestFunction tensor_spline(cplx center, double h);

  double operator()(cplx u) const;
  cplx grad(cplx u) const;  // d/dx + i d/dy
  double directional(cplx u, cplx v) const { return (std::conj(v) * grad(u)).real(); }
  double support_radius() const;
  cplx center() const { return center_; }
  Kind kind() const { return kind_; }
  std::string id() const;
  std::string smoothness() const;

private:
  Kind kind_ = Kind::zero;
  cplx center_ = 0.0;
  double scale_ = 1.0;
};

// Parses "gaussian:cx,cy,width" or "spline:cx,cy,h".
TestFunction parse_test_function(const std::string& s);

double integrate_square(const TestFunction& f, double rel_tol = 1e-12);

// (1/pi) int int d_{v1} phi1(u) G(u,v) d_{v2} phi2(v) du dv with G = -(1/2pi) log|u-v|.
double green_pairing(const TestFunction& f1, cplx v1, const TestFunction& f2, cplx v2, double rel_tol = 1e-6,
                     int max_level = 4);

// Principal square root of tr((E^-1 Q)^2); nonnegative real part, ties to nonnegative imaginary part.
cplx dipole_vector(const PatternAnalysis& pa);
// Dipole in the frame of the covariance formulas: i nu pbar tr(E^-1 Q).
cplx normalized_dipole(const PatternAnalysis& pa, const DualGeometry& geo);

// Lattice point of offset o at scale eps, in the plane used by the scaling limit.
cplx scaled_position(const GraphSpec& g, const SpectralData& s, Offset o, double eps);

// sum_x Cov(p1, p2_x) psi(u^eps_x).
double covariance_lattice_sum(const KernelTable& t, const GraphSpec& g, const SpectralData& s, const Pattern& p1,
                              const Pattern& p2, const TestFunction& psi, double eps);

// eps -> 0 limit of covariance_lattice_sum in the liquid phase: amplitude * psi(0) plus the
// field term paired with psi. Its kernel d1.d2 of log|u| carries a contact part, so the
// limit differs from amplitude * psi(0) even for radial psi.
double covariance_sum_limit(double amplitude, double gff_coefficient, cplx d1, cplx d2, const TestFunction& psi,
                            double rel_tol = 1e-8);

// F = (1/4pi^2) int int log|P| on an N x N torus grid.
double free_energy(const SpectralData& s, int N = 256);
double free_energy(const GraphSpec& g, int N = 256);

struct GaseousAmplitude {
  double value = 0.0;       // analytic Hessian integrand
  double finite_diff = 0.0;  // second difference of F in log K_e
  double probability = 0.0;  // first-derivative byproduct
  double mismatch = 0.0;
};

GaseousAmplitude white_noise_gaseous(const GraphSpec& g, const SpectralData& s, int edge, int N = 256,
                                     double h = 1e-3, double max_mismatch = 1e-6);
// d^2 F / d log K_i d log K_j by central differences.
double free_energy_cross_hessian(const GraphSpec& g, int e1, int e2, int N = 256, double h = 1e-3);

// Gaseous cross amplitude as the absolutely convergent lattice sum.
double white_noise_lattice_sum(const KernelTable& t, const GraphSpec& g, const Pattern& p1, const Pattern& p2,
                               int radius);

struct LiquidAmplitude {
  double value = 0.0;  // A1 + A2
  double contour = 0.0;  // A1
  double lattice = 0.0;  // A2
  double error = 0.0;    // spread of the two Richardson estimates
  cplx dipole1, dipole2;
  std::vector<std::pair<int, double>> partial_sums;  // (M, box sum)
};

struct LiquidOptions {
  int max_box = 256;   // largest |x|_inf for the box sums
  int window = 12;     // averaging window in M (covers oscillation periods 1,2,3,4,6)
  double max_spread = 1e-2;
  int contour_nodes = 64;
};

// Contour term over the boundary of the frame parallelogram.
double contour_term(const DualGeometry& geo, cplx d1, cplx d2, int nodes = 64);

LiquidAmplitude white_noise_liquid(const KernelTable& t, const GraphSpec& g, const SpectralData& s,
                                   const DualGeometry& geo, const Pattern& p1, const Pattern& p2,
                                   const LiquidOptions& opt = {});

// sum_{|x| <= M} K^-1(x, y) K^-1(-x, -y) for n = 1 graphs.
double strip_sum_identity(const GraphSpec& g, const SpectralData& s, int y, int M);

struct CycleSum {
  cplx sum = 0.0;
  double max_term = 0.0;
};
CycleSum cycle_cancellation(const std::vector<cplx>& u);

struct SumRule {
  double residual = 0.0;
  double max_abs = 0.0;
  std::vector<std::vector<double>> matrix;
  std::vector<int> edges;
  std::string method;
};

SumRule cross_pattern_sum_rule(const KernelTable& t, const GraphSpec& g, const SpectralData& s, const VertexRef& v,
                               const LiquidOptions& opt = {});

struct AmplitudeEntry {
  std::string p1, p2;
  double gff_coefficient = 0.0;
  cplx dipole1 = 0.0, dipole2 = 0.0;
  double white_noise = 0.0;
  std::string method;
  double error = 0.0;
};

struct AmplitudeReport {
  Phase phase = Phase::gaseous;
  std::vector<AmplitudeEntry> entries;
  std::string elliptic_convention;  // set when closed forms were compared
  std::vector<std::pair<std::string, double>> notes;
};

// Amplitudes for all pairs of single-edge patterns of the listed edge classes.
AmplitudeReport amplitude_report(const GraphSpec& g, const SpectralData& s, const std::vector<int>& edges,
                                 const LiquidOptions& opt = {});
// Throws if entries were produced by different methods.
double sum_rule_from_report(const AmplitudeReport& r, const std::vector<std::string>& edge_ids);
// Structured (JSON) text; meta is echoed under "meta".
std::string amplitude_report_text(const AmplitudeReport& r,
                                  const std::vector<std::pair<std::string, std::string>>& meta);

struct EllipticResolution {
  std::string convention;  // "parameter" or "modulus"
  double K = 0.0, E = 0.0;
  double mismatch_parameter = 0.0, mismatch_modulus = 0.0;
};
// Chooses the reading of K(16/25), E(16/25) that matches the measured
// square-octagon connector probability and amplitude.
EllipticResolution resolve_elliptic_convention(double measured_probability, double measured_amplitude);

struct Rational {
  long num = 1;
  long den = 1;
  double value() const { return double(num) / double(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
};
Rational parse_rational(const std::string& s);

struct MomentRow {
  double epsilon = 0.0;
  std::string eps_text;
  std::string phi_id;
  int n_samples = 0;
  double mean = 0.0, var = 0.0, c3 = 0.0, c4 = 0.0;
  double ci_low = 0.0, ci_high = 0.0;
  double predicted_var = 0.0;
  double skewness = 0.0, skewness_se = 0.0;
  double kurtosis_ratio = 0.0, kurtosis_ratio_se = 0.0;  // m4 / (3 m2^2)
  int window_sites = 0;
  int window_edges = 0;
};

struct CltConfig {
  Pattern pattern;
  std::vector<TestFunction> phis;
  std::vector<Rational> eps;
  int n_samples = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  int bootstrap = 400;
  double amplitude = 0.0;  // white-noise amplitude for the prediction
  double gff_coefficient = 0.0;
  cplx dipole = 0.0;
};

std::vector<MomentRow> clt_harness(const GraphSpec& g, const SpectralData& s, const CltConfig& cfg);
std::string moment_table_csv(const std::vector<MomentRow>& rows, bool header = true);

}  // namespace dimers
