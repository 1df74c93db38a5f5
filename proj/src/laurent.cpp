#include "dimers/laurent.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <sstream>

namespace dimers {

cplx ipow(cplx x, int k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  cplx r = 1.0;
  while (k) {
    if (k & 1) r *= x;
    x *= x;
    k >>= 1;
  }
  return r;
}

Laurent2::Laurent2(cplx c) {
  if (c != 0.0) terms_[{0, 0}] = c;
}

Laurent2 Laurent2::monomial(cplx c, int zpow, int wpow) {
  Laurent2 p;
  if (c != 0.0) p.terms_[{zpow, wpow}] = c;
  return p;
}

cplx Laurent2::coeff(int zpow, int wpow) const {
  auto it = terms_.find({zpow, wpow});
  return it == terms_.end() ? cplx(0.0) : it->second;
}

cplx Laurent2::eval(cplx z, cplx w) const {
  cplx s = 0.0;
  for (auto& [k, c] : terms_) s += c * ipow(z, k.first) * ipow(w, k.second);
  return s;
}

cplx Laurent2::dz(cplx z, cplx w) const {
  cplx s = 0.0;
  for (auto& [k, c] : terms_)
    if (k.first != 0) s += c * double(k.first) * ipow(z, k.first - 1) * ipow(w, k.second);
  return s;
}

cplx Laurent2::dw(cplx z, cplx w) const {
  cplx s = 0.0;
  for (auto& [k, c] : terms_)
    if (k.second != 0) s += c * double(k.second) * ipow(z, k.first) * ipow(w, k.second - 1);
  return s;
}

Laurent2& Laurent2::operator+=(const Laurent2& o) {
  for (auto& [k, c] : o.terms_) {
    cplx v = (terms_[k] += c);
    if (v == 0.0) terms_.erase(k);
  }
  return *this;
}

Laurent2& Laurent2::operator-=(const Laurent2& o) {
  for (auto& [k, c] : o.terms_) {
    cplx v = (terms_[k] -= c);
    if (v == 0.0) terms_.erase(k);
  }
  return *this;
}

Laurent2 Laurent2::operator+(const Laurent2& o) const {
  Laurent2 r = *this;
  r += o;
  return r;
}

Laurent2 Laurent2::operator-(const Laurent2& o) const {
  Laurent2 r = *this;
  r -= o;
  return r;
}

Laurent2 Laurent2::operator*(const Laurent2& o) const {
  Laurent2 r;
  for (auto& [ka, ca] : terms_)
    for (auto& [kb, cb] : o.terms_) {
      Key k{ka.first + kb.first, ka.second + kb.second};
      cplx v = (r.terms_[k] += ca * cb);
      if (v == 0.0) r.terms_.erase(k);
    }
  return r;
}

Laurent2 Laurent2::operator*(cplx s) const {
  Laurent2 r;
  if (s == 0.0) return r;
  for (auto& [k, c] : terms_) r.terms_[k] = c * s;
  return r;
}

void Laurent2::prune(double rel_tol) {
  double mx = 0.0;
  for (auto& [k, c] : terms_) mx = std::max(mx, std::abs(c));
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= rel_tol * mx)
      it = terms_.erase(it);
    else
      ++it;
  }
}

int Laurent2::zmin() const {
  int m = INT_MAX;
  for (auto& [k, c] : terms_) m = std::min(m, k.first);
  return terms_.empty() ? 0 : m;
}
int Laurent2::zmax() const {
  int m = INT_MIN;
  for (auto& [k, c] : terms_) m = std::max(m, k.first);
  return terms_.empty() ? 0 : m;
}
int Laurent2::wmin() const {
  int m = INT_MAX;
  for (auto& [k, c] : terms_) m = std::min(m, k.second);
  return terms_.empty() ? 0 : m;
}
int Laurent2::wmax() const {
  int m = INT_MIN;
  for (auto& [k, c] : terms_) m = std::max(m, k.second);
  return terms_.empty() ? 0 : m;
}

double Laurent2::l1_norm() const {
  double s = 0.0;
  for (auto& [k, c] : terms_) s += std::abs(c);
  return s;
}

std::vector<cplx> Laurent2::z_coeffs(cplx w) const {
  if (terms_.empty()) return {};
  int lo = zmin();
  std::vector<cplx> out(zmax() - lo + 1, 0.0);
  for (auto& [k, c] : terms_) out[k.first - lo] += c * ipow(w, k.second);
  return out;
}

std::vector<cplx> Laurent2::w_coeffs(cplx z) const {
  if (terms_.empty()) return {};
  int lo = wmin();
  std::vector<cplx> out(wmax() - lo + 1, 0.0);
  for (auto& [k, c] : terms_) out[k.second - lo] += c * ipow(z, k.first);
  return out;
}

namespace {

std::string fmt_real(double v, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::string fmt_monomial(int p, const char* var) {
  if (p == 0) return "";
  if (p == 1) return var;
  return std::string(var) + "^" + std::to_string(p);
}

}  // namespace

std::string Laurent2::to_string(int digits) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Constant first, then by total degree, for readable output like "5 - z - z^-1 ...".
  std::vector<std::pair<Key, cplx>> ts(terms_.begin(), terms_.end());
  std::stable_sort(ts.begin(), ts.end(), [](auto& a, auto& b) {
    int da = std::abs(a.first.first) + std::abs(a.first.second);
    int db = std::abs(b.first.first) + std::abs(b.first.second);
    if (da != db) return da < db;
    return a.first > b.first;
  });
  for (auto& [k, c] : ts) {
    std::string mono = fmt_monomial(k.first, "z");
    std::string wm = fmt_monomial(k.second, "w");
    if (!mono.empty() && !wm.empty()) mono += "*";
    mono += wm;
    bool real = std::abs(c.imag()) <= 1e-14 * std::abs(c);
    if (real) {
      double v = c.real();
      double mag = std::abs(v);
      if (!first) os << (v < 0 ? " - " : " + ");
      else if (v < 0) os << "-";
      if (mono.empty() || std::abs(mag - 1.0) > 1e-14) {
        os << fmt_real(mag, digits);
        if (!mono.empty()) os << "*";
      }
      os << mono;
    } else {
      if (!first) os << " + ";
      os << "(" << fmt_real(c.real(), digits) << (c.imag() < 0 ? "-" : "+")
         << fmt_real(std::abs(c.imag()), digits) << "i)";
      if (!mono.empty()) os << "*" << mono;
    }
    first = false;
  }
  return os.str();
}

}  // namespace dimers
