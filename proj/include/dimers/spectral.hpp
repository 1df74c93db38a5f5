#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dimers/graph.hpp"
#include "dimers/laurent.hpp"

namespace dimers {

enum class Phase { solid, liquid_generic, liquid_nongeneric, gaseous };
const char* phase_name(Phase p);

struct TorusRoot {
  double theta = 0.0;  // arg z
  double phi = 0.0;    // arg w
  cplx z, w;
  double residual = 0.0;   // |P| at the root
  double grad_norm = 0.0;  // |grad P| in torus angles
  double jacobian = 0.0;   // det of d(Re P, Im P)/d(theta, phi)
  bool double_root = false;
};

struct LiquidData {
  cplx z0, w0;
  cplx alpha, beta;  // partial derivatives of P in z and w
  cplx xhat, yhat;   // i z0 alpha, i w0 beta
  Eigen::MatrixXcd Q0;  // Q(z0, w0), indexed (black, white)
};

struct SpectralData {
  int n = 0;
  std::vector<std::vector<Laurent2>> K;  // [white][black]
  Laurent2 P;
  std::vector<std::vector<Laurent2>> Q;  // [black][white]
  bool exact = true;  // permutation expansion (true) or sampled fallback
  double scale = 1.0;  // l1 norm of the coefficients of P

  std::vector<TorusRoot> roots;
  Phase phase = Phase::gaseous;
  std::string phase_note;
  double min_abs_P = 0.0;
  double min_theta = 0.0, min_phi = 0.0;
  std::optional<LiquidData> liquid;

  Eigen::MatrixXcd K_at(cplx z, cplx w) const;
  cplx P_at(cplx z, cplx w) const { return P.eval(z, w); }
  Eigen::MatrixXcd Q_at(cplx z, cplx w) const;
};

struct RootOptions {
  int grid = 128;
  double tol = 1e-10;           // on |P| relative to the coefficient scale
  double double_tol = 1e-6;     // Jacobian determinant relative to scale^2
  double dedup = 1e-5;          // angular distance
};

// K, P, Q only. Permutation expansion for n <= exact_limit, sampled DFT otherwise.
SpectralData build_spectral(const GraphSpec& g, int exact_limit = 6);
std::vector<TorusRoot> find_torus_roots(const SpectralData& s, const RootOptions& opt = {},
                                        std::vector<std::string>* dropped_seeds = nullptr);
Phase classify_phase(const SpectralData& s, const std::vector<TorusRoot>& roots, std::string* note = nullptr);
// build_spectral + roots + classification + liquid root selection.
SpectralData analyze_spectral(const GraphSpec& g, const RootOptions& opt = {}, int exact_limit = 6);

struct DualGeometry {
  std::vector<cplx> omega;  // per edge class
  cplx xhat, yhat;
  cplx xhat_crossing, yhat_crossing;  // from edge-offset crossing sums
  double area = 0.0;  // Im(conj(xhat) yhat) > 0
  double nu = 1.0;    // 1/sqrt(area)
  double divergence_residual = 0.0;
  std::vector<cplx> dual_edge() const;  // nu * omega
};

DualGeometry liquid_geometry(const SpectralData& s, const GraphSpec& g);

// Position of lattice translate o in the plane used by scaling limits:
// the dual frame nu*(x xhat + y yhat) in the liquid phase, the realization otherwise.
cplx embed_offset(const GraphSpec& g, const SpectralData& s, Offset o);

}  // namespace dimers
