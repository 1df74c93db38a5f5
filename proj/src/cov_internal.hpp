#pragma once

#include "dimers/correlations.hpp"

namespace dimers::detail {

// Cov(1_{p1}, 1_{p2 + x}) with a shortcut for single-edge patterns.
class PairCovariance {
public:
  PairCovariance(const KernelTable& t, const GraphSpec& g, const Pattern& p1, const Pattern& p2);
  double operator()(Offset x) const;
  double mean1() const { return pbar1_; }
  double mean2() const { return pbar2_; }
  // Largest |offset| the pair needs beyond |x|.
  int reach() const { return reach_; }

private:
  const KernelTable& t_;
  const GraphSpec& g_;
  Pattern p1_, p2_;
  bool single_ = false;
  double pbar1_ = 0.0, pbar2_ = 0.0;
  cplx k1_, k2_;
  VertexRef b1_, w1_, b2_, w2_;
  int reach_ = 0;
};

}  // namespace dimers::detail
