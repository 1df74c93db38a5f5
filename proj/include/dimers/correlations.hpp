#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dimers/graph.hpp"
#include "dimers/kernel.hpp"
#include "dimers/spectral.hpp"

namespace dimers {

struct PatternAnalysis {
  Pattern pattern;
  Eigen::MatrixXcd E;     // K^-1(b_alpha, w_beta)
  Eigen::MatrixXcd Einv;  // empty when not invertible
  cplx det_E = 0.0;
  double probability = 0.0;
  bool invertible = false;
  bool liquid = false;
  Eigen::MatrixXcd Qblock;  // phased Q(z0,w0) block, liquid only
  cplx trace_EinvQ = 0.0;   // tr(E^-1 Q)
  cplx dipole2 = 0.0;       // tr((E^-1 Q)^2)
};

// Inverse-Kasteleyn entry between two vertices of the infinite graph.
cplx kernel_between(const KernelTable& t, const VertexRef& b, const VertexRef& w);

PatternAnalysis pattern_probability(const KernelTable& t, const GraphSpec& g, const Pattern& p,
                                    const SpectralData* s = nullptr);

// Probability that every edge in the list is present; 0 when two distinct edges share a vertex.
double edge_set_probability(const KernelTable& t, const GraphSpec& g, std::vector<PatternEdge> edges);

// Joint probability of translated patterns; duplicate edges are merged.
double joint_probability(const KernelTable& t, const GraphSpec& g, const std::vector<Pattern>& patterns);

// Cov(1_{p1}, 1_{p2 translated by o}).
double pattern_covariance(const KernelTable& t, const GraphSpec& g, const Pattern& p1, const Pattern& p2, Offset o,
                          double pbar1, double pbar2);

// E[prod (e_i - mean)] via the zero-diagonal determinant.
double centered_correlation(const KernelTable& t, const GraphSpec& g, const std::vector<PatternEdge>& edges);

// Edge-indexed restriction of the kernel: L(i,j) = K(e_i) K^-1(b_i, w_j).
// Conditioning on presence/absence of an edge is a Schur complement / weight->0
// rank-one update of this matrix.
class ConditionalKernel {
public:
  ConditionalKernel(const KernelTable& t, const GraphSpec& g, const std::vector<PatternEdge>& edges);
  int size() const { return int(L_.rows()); }
  double probability(int i) const { return L_(i, i).real(); }
  // Returns the probability of the event before conditioning.
  double condition(int i, bool present, double pivot_tol = 1e-12);
  const Eigen::MatrixXcd& matrix() const { return L_; }

private:
  Eigen::MatrixXcd L_;
  std::vector<char> done_;
};

double inclusion_exclusion_check(const KernelTable& t, const GraphSpec& g, const PatternEdge& e1,
                                 const PatternEdge& e2);

class SamplerError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Exact sequential sampler of the Gibbs marginal on a finite set of edges.
class WindowSampler {
public:
  WindowSampler(const KernelTable& t, const GraphSpec& g, std::vector<PatternEdge> window, double tol = 1e-8);
  // Edges in visitation order: lexicographic by (offset, edge id).
  const std::vector<PatternEdge>& edges() const { return edges_; }
  bool real_path() const { return real_; }
  // present[i] for edges()[i]; deterministic for a given (seed, stream).
  std::vector<std::uint8_t> sample(std::uint64_t seed, std::uint64_t stream) const;

private:
  std::vector<PatternEdge> edges_;
  bool real_ = true;
  int m_ = 0;
  std::vector<double> base_real_;
  Eigen::MatrixXcd base_cplx_;
  double tol_;
};

struct SampleRecord {
  std::uint64_t seed;
  std::uint64_t stream;
  std::vector<std::uint8_t> present;
};

std::vector<SampleRecord> sample_window(const WindowSampler& sampler, int n_samples, std::uint64_t seed,
                                        int threads = 1);
std::string format_sample(const SampleRecord& r, const std::string& window_id);

// Uniform double in [0,1) from the top 53 bits.
double uniform01(std::mt19937_64& rng);
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace dimers
