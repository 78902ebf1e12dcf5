#pragma once

// Canonical spectral data of a form triple at fixed lambda: eigenvalues
// mu_k(lambda) of a - lambda*b against m, with m-orthonormal eigenvectors.

#include "fredholm/forms.hpp"

#include <string>
#include <vector>

namespace fredholm {

// Generalized eigenpairs of (S, M), ascending, with S-orthonormal vectors.
struct ShiftedEigen {
  Vector mu_tilde;
  Matrix vectors;  // columns
};

ShiftedEigen solve_shifted_eigen(const ShiftedForm& shifted, const Matrix& M);

// Columns of E_canon are e_k(lambda) = sqrt(mu_tilde_k) * E_shift.col(k).
struct SpectralData {
  double lambda = 0.0;
  double tau = 0.0;
  Vector mu;
  Vector mu_tilde;
  Matrix E_canon;
  Matrix E_shift;

  Eigen::Index size() const noexcept { return mu.size(); }
};

SpectralData canonical_data(const FormTriple& triple, double lambda);

// Same, but with a caller-chosen shift instead of the doubling search.
SpectralData canonical_data_with_shift(const FormTriple& triple, double lambda, double tau);

// Largest-magnitude coordinate made positive; ties go to the lowest index.
void fix_sign(Eigen::Ref<Vector> v);

inline constexpr double kClusterTol = 1e-8;

// Index ranges [first, last) of eigenvalues within kClusterTol*(1+|mu|) of
// their neighbour.
struct Cluster {
  Eigen::Index first;
  Eigen::Index last;
};
std::vector<Cluster> clusters(const Vector& mu, double tol = kClusterTol);

struct InvarianceReport {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double max_mu_diff = 0.0;           // max_k |mu_k(tau1) - mu_k(tau2)| / (1 + |mu_k|)
  double max_shift_relation_err = 0.0;  // max_k |mu~_k(tau2) - mu~_k(tau1) - (tau2 - tau1)| / (1 + |mu~_k|)
  double max_vector_diff = 0.0;       // simple eigenvalues only, best sign
  double max_projector_diff = 0.0;    // all clusters, m-operator norm
  bool mu_pass = false;
  bool shift_relation_pass = false;
  bool vector_pass = false;
  bool projector_pass = false;
  bool pass = false;
};

inline constexpr double kTauMuTol = 1e-8;
inline constexpr double kTauShiftTol = 1e-10;
inline constexpr double kTauVectorTol = 1e-6;

InvarianceReport verify_tau_invariance(const FormTriple& triple, double lambda, double tau1,
                                       double tau2);

struct EigencurveRow {
  double lambda;
  int k;  // 1-based
  double mu;
};

struct EigencurveTable {
  std::vector<double> grid;
  int K = 0;
  std::vector<EigencurveRow> rows;  // lambda-major
};

// Evaluates grid points on up to max_threads workers (FREDHOLM_THREADS caps
// it when max_threads is 0); rows are always assembled in grid order.
EigencurveTable trace_eigencurves(const FormTriple& triple, const std::vector<double>& lambda_grid,
                                  int K, unsigned max_threads = 0);

std::string to_csv(const EigencurveTable& table);

struct ResonanceGroup {
  double lambda = 0.0;
  double mu = 0.0;
  std::vector<Eigen::Index> J;  // 0-based indices into SpectralData
  Matrix E_basis;               // columns e_k, k in J
  double tol_used = 0.0;

  bool empty() const noexcept { return J.empty(); }
};

inline constexpr double kResonanceTol = 1e-8;

// Throws AmbiguousResonance when some mu_k sits just outside the tolerance
// band, within ten times it.
ResonanceGroup resonance_group(const SpectralData& spectral, double mu, double tol = kResonanceTol);

// Formats a double with 17 significant digits.
std::string format_double(double x);

}  // namespace fredholm
