#pragma once

// Steklov-Robin problems on an interval with P1 finite elements:
//   -(A u')' + c u = mu m0 u + eps f(x, u)          in (x_left, x_right)
//   A u' . nu + b_c u = lambda b0 u + eps g(x, u)     at both endpoints
// Boundary integrals are endpoint evaluations with unit weight.

#include "fredholm/forms.hpp"
#include "fredholm/nonlinear.hpp"

#include <array>
#include <string>
#include <vector>

namespace fredholm {

class Mesh1D {
 public:
  explicit Mesh1D(std::vector<double> nodes);
  static Mesh1D uniform(int n_elems, double x_left = 0.0, double x_right = 1.0);

  int n_elems() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  int n_nodes() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double h(int e) const { return nodes_[static_cast<std::size_t>(e) + 1] - nodes_[static_cast<std::size_t>(e)]; }

  // P1 interpolant of a function at the nodes.
  template <class Fn>
  Vector interpolate(Fn&& fn) const {
    Vector v(n_nodes());
    for (int i = 0; i < n_nodes(); ++i) v(i) = fn(nodes_[static_cast<std::size_t>(i)]);
    return v;
  }

 private:
  std::vector<double> nodes_;
};

// Piecewise-constant element data; a single entry is broadcast to all elements.
struct SteklovCoefficients {
  std::vector<double> A_coef{1.0};
  std::vector<double> c{0.0};
  std::vector<double> m0{1.0};
  std::array<double, 2> b_c{0.0, 0.0};
  std::array<double, 2> b0{0.0, 0.0};

  bool is_constant() const noexcept { return A_coef.size() == 1 && c.size() == 1 && m0.size() == 1; }
};

// Compatibility: sum_e c_e h_e + b_c(left) + b_c(right) > 0.
bool check_compatibility(const Mesh1D& mesh, const SteklovCoefficients& coeffs);

FormTriple assemble_forms(const Mesh1D& mesh, const SteklovCoefficients& coeffs);

// Unweighted P1 mass and stiffness matrices (L2 and H1-seminorm Gram matrices).
Matrix mass_matrix(const Mesh1D& mesh);
Matrix stiffness_matrix(const Mesh1D& mesh);

enum class Location { Interior, Boundary };

// Interior: entries int f0 phi_i dx for piecewise-constant f0 (one value per
// element, or one value broadcast). Boundary: density holds g0 at the two
// endpoints. Strict mode requires a positive total integral.
Vector build_rank_one_functional(const Mesh1D& mesh, const std::vector<double>& density, Location location,
                                 bool strict = true);

PowerTerm build_power_nonlinearity(const Vector& ell, double p, double c = 1.0);

// sum_i (c_i/p_i) |ell_i . u|^p_i over the power terms.
double functional_value(const NonlinearSpec& spec, const Vector& u);

// First variation sum_i c_i |ell_i.u|^(p_i-2) (ell_i.u) (ell_i.v).
double functional_first_variation(const NonlinearSpec& spec, const Vector& u, const Vector& v);

// k-th (1-based) eigenvalue of -u'' + c u = mu u on [0, 1] with
//   -u'(0) + b_c(0) u(0) = lambda b0(0) u(0),  u'(1) + b_c(1) u(1) = lambda b0(1) u(1),
// from the transcendental characteristic equation. Needs A_coef = m0 = 1 and
// constant c.
double eigencurve_oracle_1d(const SteklovCoefficients& coeffs, double lambda, int k);

// Pairing matrix for a pointwise term on the mesh.
Matrix nemytskii_pairing(const Mesh1D& mesh, Location location);

Vector nemytskii_apply(const NemytskiiFn& fn, const Vector& u);

// ||w||_{1,2} = ||w||_2 + ||w'||_2 for the P1 function with nodal values w.
double sobolev_norm(const Mesh1D& mesh, const Vector& w);

struct DerivativeCheckRow {
  int j;
  double h_norm;
  double remainder;  // ||T(u+h) - T(u) - F'(u) h||_{1,2}
  double ratio;      // remainder / ||h||_{1,2}^2
};

struct DerivativeCheckReport {
  std::vector<DerivativeCheckRow> rows;
  double band = 0.0;  // max ratio / min ratio
  double max_remainder = 0.0;
  bool pass = false;
};

// Halves h shrink_steps times. Passes when the remainder ratio stays within a
// factor 10 band, or when every remainder is at rounding level (<= 1e-12).
DerivativeCheckReport nemytskii_derivative_check(const Mesh1D& mesh, const NemytskiiFn& fn, const Vector& u,
                                                 const Vector& h, int shrink_steps);

}  // namespace fredholm
