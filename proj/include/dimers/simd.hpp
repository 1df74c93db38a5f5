#pragma once

#include <complex>
#include <cstddef>

namespace dimers::simd {

enum class Level { scalar, avx2, neon };

struct Kernels {
  // out[i] = sum_t coef[t] * w[i]^(t + shift); complex values in split re/im arrays.
  void (*laurent_row)(const std::complex<double>* coef, int ncoef, int shift, const double* wre, const double* wim,
                      double* ore, double* oim, std::size_t n);
  // out[i] = a[i] / b[i]
  void (*cdiv)(const double* are, const double* aim, const double* bre, const double* bim, double* ore, double* oim,
               std::size_t n);
  // y[i] -= s * x[i]
  void (*axpy_neg)(double s, const double* x, double* y, std::size_t n);
  // sum a[i]*b[i] accumulated in four interleaved partial sums, combined as (s0+s2)+(s1+s3).
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum log|z[i]|^2
  double (*sum_log_abs2)(const double* re, const double* im, std::size_t n);
};

const Kernels& kernels_scalar();
#if defined(DIMERS_HAVE_AVX2)
const Kernels& kernels_avx2();
#endif
#if defined(DIMERS_HAVE_NEON)
const Kernels& kernels_neon();
#endif

bool available(Level l);
Level detected();
Level active();
void set_active(Level l);  // throws if unavailable
const Kernels& kernels(Level l);
const Kernels& kernels();  // active level
const char* name(Level l);

}  // namespace dimers::simd
