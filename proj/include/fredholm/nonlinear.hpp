#pragma once

// Nonlinear Fredholm equation a(u,v) = lambda b(u,v) + mu m(u,v) + eps F(u,v).
//
// F is stored in the dual representation: F_vec(u)_i = F(u, phi_i), so that
// F(u, v) = F_vec(u) . v. The Jacobian returned by eval_DF is
// J_ij = d F_vec(u)_i / d u_j, hence D_uF(u, w)[v] = w^T J v.

#include "fredholm/spectrum.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fredholm {

// c * |ell.u|^(p-2) (ell.u) * ell
struct PowerTerm {
  double c = 1.0;
  Vector ell;
  double p = 3.0;
};

// Scalar function applied pointwise, with the derivative bounds the
// differentiability argument needs.
struct NemytskiiFn {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  double sup_df = 0.0;
  double sup_d2f = 0.0;
};

// Known names: sin, tanh, identity, affine (2s + 1), square (s^2, bounds on |s| <= 10).
NemytskiiFn nemytskii_fn(const std::string& name);

// Pointwise term: F_vec(u) = W * fn(u) with a fixed pairing matrix W (the
// interior mass matrix or the endpoint selector on a mesh).
struct NemytskiiTerm {
  NemytskiiFn fn;
  Matrix pairing;
  std::string on = "interior";
};

struct NonlinearSpec {
  std::optional<Vector> affine;
  std::vector<PowerTerm> power_terms;
  std::optional<NemytskiiTerm> nemytskii;

  bool has_affine() const noexcept { return affine.has_value(); }
};

// Throws InvalidExponent for p <= 2 and DimensionMismatch against dim.
void check_spec(const NonlinearSpec& spec, Eigen::Index dim);

Vector eval_F(const NonlinearSpec& spec, const Vector& u);
Matrix eval_DF(const NonlinearSpec& spec, const Vector& u);

enum class NonlinearMethod { Picard, Newton };
const char* to_string(NonlinearMethod m) noexcept;

struct BranchPoint {
  double eps;
  Vector u;
  double residual;
  double side_condition;
};

struct BranchInfo {
  Vector u0;
  double phi_norm = 0.0;
  double condition_estimate = 0.0;
  std::vector<BranchPoint> trace;
};

struct NonlinearSolution {
  Vector u;
  double eps = 0.0;
  int iterations = 0;
  double residual = 0.0;
  NonlinearMethod method = NonlinearMethod::Newton;
  bool resonant = false;
  double side_condition = 0.0;  // max_{k in J} |F(u, e_k)|, resonant only
  std::optional<BranchInfo> branch_info;
};

// ||(A - lambda B - mu M) u - eps F_vec(u)|| / (1 + |eps| ||F_vec(u)|| + ||u||)
double residual(const FormTriple& triple, double lambda, double mu, const NonlinearSpec& spec, double eps,
                const Vector& u);

inline constexpr double kPicardTol = 1e-13;
inline constexpr int kPicardMaxIter = 500;

// Fixed point of u <- eps sum_k F(u, e_k)/(mu_k - mu) e_k. Converged when the
// m-norm step is at most tol.
NonlinearSolution picard_solve(const FormTriple& triple, const SpectralData& spectral, double mu,
                               const NonlinearSpec& spec, double eps, const Vector& u_init,
                               double tol = kPicardTol, int max_iter = kPicardMaxIter);

inline constexpr int kNewtonMaxIter = 50;

// Newton on G(eps, u) = u - eps sum_k F(u, e_k)/(mu_k - mu) e_k.
NonlinearSolution newton_solve_nonresonant(const FormTriple& triple, const SpectralData& spectral,
                                           double mu, const NonlinearSpec& spec, double eps,
                                           const Vector& u_init);

// L(j, i) = D_uF(w, e_j)[e_i] over the resonant basis.
Matrix lambda_operator(const NonlinearSpec& spec, const Vector& w, const ResonanceGroup& group);

inline constexpr double kBifurcationTol = 1e-10;

struct BifurcationPoint {
  Vector u0;
  Vector t;  // coordinates in group.E_basis
  double phi_norm = 0.0;
};

// Root of Phi_k(t) = F(sum_j t_j e_j, e_k), k in J. Newton runs from the
// origin and from every point of {-2,-1,-0.5,0.5,1,2}^|J|; the root with the
// smallest ||Phi|| wins, ties going to the earlier start.
BifurcationPoint find_bifurcation_point(const ResonanceGroup& group, const NonlinearSpec& spec);

struct InjectivityReport {
  bool ok = false;
  double condition_estimate = 0.0;  // sigma_max / sigma_min (inf if singular)
};

InjectivityReport injectivity_check(const Matrix& L);

// Newton on the resonant map
// G(eps, u) = u - sum_{k in J} [m(u,e_k) - F(u,e_k)] e_k - eps sum_{k not in J} F(u,e_k)/(mu_k - mu) e_k
// started from u0.
NonlinearSolution newton_solve_resonant(const FormTriple& triple, const SpectralData& spectral,
                                        const ResonanceGroup& group, const NonlinearSpec& spec, double eps,
                                        const Vector& u0);

// Resonant solves at each eps, each started from u0.
BranchInfo resonant_branch(const FormTriple& triple, const SpectralData& spectral, const ResonanceGroup& group,
                           const NonlinearSpec& spec, const std::vector<double>& eps_values);

std::string to_json(const NonlinearSolution& sol);

}  // namespace fredholm
