#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "dimers/scaling.hpp"

namespace dimers {

namespace {

struct Moments {
  double mean = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;  // central, biased
};

Moments moments(const std::vector<double>& v) {
  Moments r;
  const double n = double(v.size());
  for (double x : v) r.mean += x;
  r.mean /= n;
  for (double x : v) {
    double d = x - r.mean, d2 = d * d;
    r.m2 += d2;
    r.m3 += d2 * d;
    r.m4 += d2 * d2;
  }
  r.m2 /= n;
  r.m3 /= n;
  r.m4 /= n;
  // k-statistics (unbiased cumulants).
  r.k2 = n / (n - 1.0) * r.m2;
  r.k3 = n * n / ((n - 1.0) * (n - 2.0)) * r.m3;
  r.k4 = n * n * ((n + 1.0) * r.m4 - 3.0 * (n - 1.0) * r.m2 * r.m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
  return r;
}

double unbiased_var(const std::vector<double>& v, const std::vector<int>& idx) {
  double mean = 0.0;
  for (int i : idx) mean += v[i];
  mean /= double(idx.size());
  double s = 0.0;
  for (int i : idx) s += (v[i] - mean) * (v[i] - mean);
  return s / double(idx.size() - 1);
}

}  // namespace

std::vector<MomentRow> clt_harness(const GraphSpec& g, const SpectralData& s, const CltConfig& cfg) {
  if (s.phase == Phase::solid) throw std::invalid_argument("clt_harness: solid phase has no fluctuations");
  if (cfg.n_samples < 1000) throw std::invalid_argument("clt_harness: n_samples < 1000 rejected");
  if (cfg.pattern.edges.empty()) throw std::invalid_argument("clt_harness: empty pattern");
  if (cfg.phis.empty() || cfg.eps.empty()) throw std::invalid_argument("clt_harness: need at least one phi and eps");
  Pattern pat = validate_pattern(g, cfg.pattern);

  struct Job {
    size_t ie, ip;
    std::vector<Offset> sites;
    std::vector<double> weights;
    int extent = 0;
  };
  std::vector<Job> jobs;
  cplx e1 = embed_offset(g, s, {1, 0}), e2 = embed_offset(g, s, {0, 1});
  double area = std::abs((std::conj(e1) * e2).imag());
  double shortest = area / std::max(std::abs(e1), std::abs(e2));
  int need = 0;
  for (size_t ie = 0; ie < cfg.eps.size(); ++ie)
    for (size_t ip = 0; ip < cfg.phis.size(); ++ip) {
      const double eps = cfg.eps[ie].value();
      const auto& phi = cfg.phis[ip];
      Job j{ie, ip, {}, {}, 0};
      int R = int(std::ceil((phi.support_radius() + std::abs(phi.center())) / (eps * shortest))) + 1;
      for (int y = -R; y <= R; ++y)
        for (int x = -R; x <= R; ++x) {
          double w = phi(scaled_position(g, s, {x, y}, eps));
          if (w == 0.0) continue;
          j.sites.push_back({x, y});
          j.weights.push_back(w);
          j.extent = std::max({j.extent, std::abs(x), std::abs(y)});
        }
      if (j.sites.empty()) throw std::invalid_argument("clt_harness: window too small for " + phi.id());
      need = std::max(need, 2 * j.extent);
      jobs.push_back(std::move(j));
    }
  int span = 0;
  for (auto& e : pat.edges) {
    auto w = white_end(g, e), b = black_end(g, e);
    span = std::max({span, std::abs(w.offset.x), std::abs(w.offset.y), std::abs(b.offset.x), std::abs(b.offset.y)});
  }
  KernelTable t = make_kernel_table(s, g, need + 2 * span + 2);
  const double pbar = edge_set_probability(t, g, pat.edges);

  std::map<std::string, double> pairing_cache;
  std::vector<MomentRow> rows;
  for (auto& j : jobs) {
    const double eps = cfg.eps[j.ie].value();
    const auto& phi = cfg.phis[j.ip];
    std::vector<PatternEdge> window;
    for (auto o : j.sites)
      for (auto& e : pat.translated(o).edges) window.push_back(e);
    WindowSampler sampler(t, g, window);
    std::map<PatternEdge, int> pos;
    for (size_t i = 0; i < sampler.edges().size(); ++i) pos[sampler.edges()[i]] = int(i);
    std::vector<std::vector<int>> members(j.sites.size());
    for (size_t k = 0; k < j.sites.size(); ++k)
      for (auto& e : pat.translated(j.sites[k]).edges) members[k].push_back(pos.at(e));

    auto recs = sample_window(sampler, cfg.n_samples, cfg.seed, cfg.threads);
    std::vector<double> vals(recs.size());
    for (size_t r = 0; r < recs.size(); ++r) {
      double acc = 0.0;
      for (size_t k = 0; k < j.sites.size(); ++k) {
        bool all = true;
        for (int m : members[k]) all = all && recs[r].present[m];
        acc += j.weights[k] * ((all ? 1.0 : 0.0) - pbar);
      }
      vals[r] = eps * acc;
    }
    auto mo = moments(vals);
    MomentRow row;
    row.epsilon = eps;
    row.eps_text = cfg.eps[j.ie].str();
    row.phi_id = phi.id();
    row.n_samples = int(vals.size());
    row.mean = mo.mean;
    row.var = mo.k2;
    row.c3 = mo.k3;
    row.c4 = mo.k4;
    const double n = double(vals.size());
    row.skewness = mo.m3 / std::pow(mo.m2, 1.5);
    row.skewness_se = std::sqrt(6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0)));
    row.kurtosis_ratio = mo.m4 / (3.0 * mo.m2 * mo.m2);
    row.kurtosis_ratio_se = std::sqrt(24.0 / n) / 3.0;
    row.window_sites = int(j.sites.size());
    row.window_edges = int(sampler.edges().size());

    // Percentile bootstrap for the variance.
    auto rng = stream_rng(cfg.seed, 0xb0075742ULL + j.ie * 1000 + j.ip);
    std::vector<double> boot(cfg.bootstrap);
    std::vector<int> idx(vals.size());
    for (int b = 0; b < cfg.bootstrap; ++b) {
      for (auto& i : idx) i = int(uniform01(rng) * n);
      boot[b] = unbiased_var(vals, idx);
    }
    std::sort(boot.begin(), boot.end());
    if (!boot.empty()) {
      row.ci_low = boot[size_t(0.025 * (boot.size() - 1))];
      row.ci_high = boot[size_t(std::ceil(0.975 * (boot.size() - 1)))];
    }

    double pred = cfg.amplitude * integrate_square(phi);
    if (cfg.gff_coefficient != 0.0 && cfg.dipole != 0.0) {
      auto it = pairing_cache.find(phi.id());
      if (it == pairing_cache.end())
        it = pairing_cache.emplace(phi.id(), green_pairing(phi, cfg.dipole, phi, cfg.dipole)).first;
      // green_pairing already carries the 1/pi of the edge coefficient.
      pred += cfg.gff_coefficient * 3.14159265358979323846 * it->second;
    }
    row.predicted_var = pred;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dimers
