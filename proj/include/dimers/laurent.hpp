#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dimers {

using cplx = std::complex<double>;

// Sparse Laurent polynomial sum c[i,j] z^i w^j with complex coefficients.
class Laurent2 {
public:
  using Key = std::pair<int, int>;  // (power of z, power of w)

  Laurent2() = default;
  explicit Laurent2(cplx c);
  static Laurent2 monomial(cplx c, int zpow, int wpow);

  const std::map<Key, cplx>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  cplx coeff(int zpow, int wpow) const;

  cplx eval(cplx z, cplx w) const;
  cplx dz(cplx z, cplx w) const;
  cplx dw(cplx z, cplx w) const;

  Laurent2& operator+=(const Laurent2& o);
  Laurent2& operator-=(const Laurent2& o);
  Laurent2 operator+(const Laurent2& o) const;
  Laurent2 operator-(const Laurent2& o) const;
  Laurent2 operator*(const Laurent2& o) const;
  Laurent2 operator*(cplx s) const;

  // Drops coefficients with |c| <= tol * max|c|.
  void prune(double rel_tol);

  int zmin() const;
  int zmax() const;
  int wmin() const;
  int wmax() const;
  double l1_norm() const;

  // Coefficients of z^k for k = zmin()..zmax() at a fixed w.
  std::vector<cplx> z_coeffs(cplx w) const;
  // Coefficients of w^k for k = wmin()..wmax() at a fixed z.
  std::vector<cplx> w_coeffs(cplx z) const;

  std::string to_string(int digits = 12) const;

private:
  std::map<Key, cplx> terms_;
};

// Integer power of a complex number by repeated squaring; negative powers allowed.
cplx ipow(cplx x, int k);

}  // namespace dimers
