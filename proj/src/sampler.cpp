#include <algorithm>
#include <sstream>
#include <thread>

#include "dimers/correlations.hpp"
#include "dimers/simd.hpp"

namespace dimers {

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                    std::uint32_t(stream >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

WindowSampler::WindowSampler(const KernelTable& t, const GraphSpec& g, std::vector<PatternEdge> window, double tol)
    : tol_(tol) {
  std::sort(window.begin(), window.end(), [&](const PatternEdge& a, const PatternEdge& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    return g.edges[a.edge].id < g.edges[b.edge].id;
  });
  window.erase(std::unique(window.begin(), window.end()), window.end());
  edges_ = std::move(window);
  m_ = int(edges_.size());
  ConditionalKernel ck(t, g, edges_);
  const auto& L = ck.matrix();
  double mx = m_ ? L.cwiseAbs().maxCoeff() : 0.0;
  real_ = true;
  for (int i = 0; i < m_ && real_; ++i)
    for (int j = 0; j < m_; ++j)
      if (std::abs(L(i, j).imag()) > 1e-12 * std::max(mx, 1.0)) {
        real_ = false;
        break;
      }
  if (real_) {
    base_real_.resize(size_t(m_) * m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) base_real_[size_t(i) * m_ + j] = L(i, j).real();
  } else {
    base_cplx_ = L;
  }
}

std::vector<std::uint8_t> WindowSampler::sample(std::uint64_t seed, std::uint64_t stream) const {
  auto rng = stream_rng(seed, stream);
  std::vector<std::uint8_t> out(m_, 0);
  const int m = m_;
  auto check = [&](double p, int i) {
    if (p < -tol_ || p > 1.0 + tol_)
      throw SamplerError("numerical breakdown at step " + std::to_string(i) + ": conditional probability " +
                         std::to_string(p) + " outside [0,1]; kernel precision too low");
  };
  if (real_) {
    std::vector<double> L = base_real_;
    const auto& K = simd::kernels();
    for (int i = 0; i < m; ++i) {
      double* Li = &L[size_t(i) * m];
      double p = Li[i];
      check(p, i);
      bool present = uniform01(rng) < p;
      out[i] = present;
      double piv = present ? p : p - 1.0;
      if (std::abs(piv) < 1e-12) throw SamplerError("pivot below tolerance at step " + std::to_string(i));
      const size_t len = size_t(m - i - 1);
      for (int j = i + 1; j < m; ++j) {
        double* Lj = &L[size_t(j) * m];
        double f = Lj[i] / piv;
        if (f != 0.0) K.axpy_neg(f, Li + i + 1, Lj + i + 1, len);
      }
    }
  } else {
    Eigen::MatrixXcd L = base_cplx_;
    for (int i = 0; i < m; ++i) {
      double p = L(i, i).real();
      check(p, i);
      bool present = uniform01(rng) < p;
      out[i] = present;
      cplx piv = present ? L(i, i) : L(i, i) - 1.0;
      if (std::abs(piv) < 1e-12) throw SamplerError("pivot below tolerance at step " + std::to_string(i));
      const int len = m - i - 1;
      if (len > 0)
        L.bottomRightCorner(len, len) -= (L.col(i).tail(len) / piv) * L.row(i).tail(len);
    }
  }
  return out;
}

std::vector<SampleRecord> sample_window(const WindowSampler& sampler, int n_samples, std::uint64_t seed,
                                        int threads) {
  std::vector<SampleRecord> out(n_samples);
  threads = std::max(1, std::min(threads, n_samples));
  auto work = [&](int tid) {
    for (int k = tid; k < n_samples; k += threads) out[k] = {seed, std::uint64_t(k), sampler.sample(seed, k)};
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          work(t);
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string format_sample(const SampleRecord& r, const std::string& window_id) {
  std::ostringstream os;
  os << r.seed << ":" << r.stream << " " << window_id << " ";
  for (auto b : r.present) os << (b ? '1' : '0');
  return os.str();
}

}  // namespace dimers
