#pragma once

// Linear Fredholm equation a(u,v) - lambda b(u,v) - mu m(u,v) = ell(v),
// solved through the canonical spectral data in both regimes.

#include "fredholm/spectrum.hpp"

#include <string>

namespace fredholm {

enum class SolveMode { Nonresonant, Resonant };

const char* to_string(SolveMode mode) noexcept;

struct LinearSolution {
  Vector u;
  SolveMode mode = SolveMode::Nonresonant;
  Vector coefficients;  // ell(e_k)/(mu_k - mu), zero for k in J
  Vector vhat;          // component in E_{lambda,mu}; zero when nonresonant
  double residual = 0.0;
  double solvability_defect = 0.0;
};

// || (A - lambda B - mu M) u - ell || / (1 + ||ell||)
double linear_residual(const FormTriple& triple, double lambda, double mu, const Vector& ell,
                       const Vector& u);

// Throws ResonanceDetected when mu is an eigenvalue at the default tolerance.
LinearSolution solve_nonresonant(const FormTriple& triple, const SpectralData& spectral, double mu,
                                 const Vector& ell);

struct BoundReport {
  double lhs = 0.0;    // ||u_hat|| in the a_{lambda,tau} norm
  double bound = 0.0;  // right-hand side
  double slack = 0.0;  // bound - lhs
  bool holds = false;
};

// Below the first eigenvalue: ||u|| <= (mu_1 + tau)/(mu_1 - mu) * ||ell||_*.
// Requires mu < mu_1 and mu + tau >= 0.
BoundReport bound_below_first(const FormTriple& triple, const SpectralData& spectral, double mu,
                              const Vector& ell, double tau);

// Inside the gap mu_{k0} < mu < mu_{k0+1} (k0 is 1-based).
BoundReport bound_between(const FormTriple& triple, const SpectralData& spectral, double mu,
                          const Vector& ell, double tau, Eigen::Index k0);

// Truncated expansion sum_{k<=k0} ell(e_k)/(mu_k - mu) e_k.
Vector spectral_projection(const SpectralData& spectral, double mu, const Vector& ell, Eigen::Index k0);

struct Solvability {
  bool solvable = false;
  double defect = 0.0;
};

inline constexpr double kSolvabilityTol = 1e-9;

// defect = max_{k in J} |ell . e_k| / (1 + ||ell||)
Solvability solvability_check(const ResonanceGroup& group, const Vector& ell,
                              double tol = kSolvabilityTol);

// vhat must lie in E_{lambda,mu}; pass an empty vector for vhat = 0.
LinearSolution solve_resonant(const FormTriple& triple, const SpectralData& spectral,
                              const ResonanceGroup& group, const Vector& ell, const Vector& vhat = Vector(),
                              double tol = kSolvabilityTol);

std::string to_json(const LinearSolution& sol);

}  // namespace fredholm
