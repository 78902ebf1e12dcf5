#include "fredholm/steklov.hpp"

#include "fredholm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fredholm {

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw Error(ErrorKind::MeshTooCoarse, "a mesh needs at least two nodes");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "mesh nodes must be strictly increasing");
}

Mesh1D Mesh1D::uniform(int n_elems, double x_left, double x_right) {
  if (n_elems < 1) throw Error(ErrorKind::MeshTooCoarse, "a mesh needs at least one element");
  if (!(x_right > x_left)) throw Error(ErrorKind::InvalidArgument, "interval must have positive length");
  std::vector<double> nodes(static_cast<std::size_t>(n_elems) + 1);
  for (int i = 0; i <= n_elems; ++i)
    nodes[static_cast<std::size_t>(i)] = x_left + (x_right - x_left) * i / n_elems;
  return Mesh1D(std::move(nodes));
}

namespace {

double element_value(const std::vector<double>& v, int e) {
  return v.size() == 1 ? v.front() : v[static_cast<std::size_t>(e)];
}

void check_coefficient_shape(const std::vector<double>& v, int n_elems, const char* name) {
  if (v.size() != 1 && v.size() != static_cast<std::size_t>(n_elems)) {
    std::ostringstream os;
    os << "coefficient " << name << " has " << v.size() << " values; expected 1 or " << n_elems;
    throw Error(ErrorKind::IncompatibleCoefficients, os.str());
  }
}

void check_coefficients(const Mesh1D& mesh, const SteklovCoefficients& coeffs) {
  const int ne = mesh.n_elems();
  check_coefficient_shape(coeffs.A_coef, ne, "A");
  check_coefficient_shape(coeffs.c, ne, "c");
  check_coefficient_shape(coeffs.m0, ne, "m0");
  for (int e = 0; e < ne; ++e) {
    if (!(element_value(coeffs.A_coef, e) > 0.0))
      throw Error(ErrorKind::IncompatibleCoefficients, "diffusion coefficient A must be positive");
    if (!(element_value(coeffs.c, e) >= 0.0))
      throw Error(ErrorKind::IncompatibleCoefficients, "potential c must be nonnegative");
    if (!(element_value(coeffs.m0, e) > 0.0))
      throw Error(ErrorKind::IncompatibleCoefficients, "weight m0 must be positive");
  }
  if (!(coeffs.b_c[0] >= 0.0 && coeffs.b_c[1] >= 0.0))
    throw Error(ErrorKind::IncompatibleCoefficients, "Robin weights b_c must be nonnegative");
  if (!std::isfinite(coeffs.b0[0]) || !std::isfinite(coeffs.b0[1]))
    throw Error(ErrorKind::IncompatibleCoefficients, "Steklov weights b0 must be finite");
}

// Adds w * element matrix [[d, o], [o, d]] on element e.
void add_element(Matrix& X, int e, double d, double o) {
  X(e, e) += d;
  X(e + 1, e + 1) += d;
  X(e, e + 1) += o;
  X(e + 1, e) += o;
}

}  // namespace

bool check_compatibility(const Mesh1D& mesh, const SteklovCoefficients& coeffs) {
  double total = coeffs.b_c[0] + coeffs.b_c[1];
  for (int e = 0; e < mesh.n_elems(); ++e) total += element_value(coeffs.c, e) * mesh.h(e);
  return total > 0.0;
}

FormTriple assemble_forms(const Mesh1D& mesh, const SteklovCoefficients& coeffs) {
  if (mesh.n_elems() < 2) throw Error(ErrorKind::MeshTooCoarse, "assembly needs at least two elements");
  check_coefficients(mesh, coeffs);
  if (!check_compatibility(mesh, coeffs))
    throw Error(ErrorKind::IncompatibleCoefficients,
                "compatibility fails: integral of c plus boundary integral of b_c must be positive");

  const int n = mesh.n_nodes();
  Matrix A = Matrix::Zero(n, n), B = Matrix::Zero(n, n), M = Matrix::Zero(n, n);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double h = mesh.h(e);
    const double a = element_value(coeffs.A_coef, e) / h;
    const double c = element_value(coeffs.c, e) * h;
    const double m = element_value(coeffs.m0, e) * h;
    add_element(A, e, a + c / 3.0, -a + c / 6.0);
    add_element(M, e, m / 3.0, m / 6.0);
  }
  A(0, 0) += coeffs.b_c[0];
  A(n - 1, n - 1) += coeffs.b_c[1];
  B(0, 0) = coeffs.b0[0];
  B(n - 1, n - 1) = coeffs.b0[1];
  return FormTriple(std::move(A), std::move(B), std::move(M), BasisKind::Steklov1D);
}

Matrix mass_matrix(const Mesh1D& mesh) {
  const int n = mesh.n_nodes();
  Matrix M = Matrix::Zero(n, n);
  for (int e = 0; e < mesh.n_elems(); ++e) add_element(M, e, mesh.h(e) / 3.0, mesh.h(e) / 6.0);
  return M;
}

Matrix stiffness_matrix(const Mesh1D& mesh) {
  const int n = mesh.n_nodes();
  Matrix K = Matrix::Zero(n, n);
  for (int e = 0; e < mesh.n_elems(); ++e) add_element(K, e, 1.0 / mesh.h(e), -1.0 / mesh.h(e));
  return K;
}

Vector build_rank_one_functional(const Mesh1D& mesh, const std::vector<double>& density, Location location,
                                 bool strict) {
  Vector ell = Vector::Zero(mesh.n_nodes());
  double total = 0.0;
  if (location == Location::Interior) {
    check_coefficient_shape(density, mesh.n_elems(), "f0");
    for (int e = 0; e < mesh.n_elems(); ++e) {
      const double w = element_value(density, e) * mesh.h(e);
      ell(e) += 0.5 * w;
      ell(e + 1) += 0.5 * w;
      total += w;
    }
  } else {
    if (density.size() != 2)
      throw Error(ErrorKind::InvalidArgument, "boundary density needs exactly two endpoint values");
    ell(0) = density[0];
    ell(mesh.n_nodes() - 1) = density[1];
    total = density[0] + density[1];
  }
  if (strict && !(total > 0.0)) {
    std::ostringstream os;
    os << (location == Location::Interior ? "interior" : "boundary") << " density integral " << total
       << " must be positive";
    throw Error(ErrorKind::PositivityViolated, os.str(), total);
  }
  return ell;
}

PowerTerm build_power_nonlinearity(const Vector& ell, double p, double c) {
  if (!(p > 2.0)) {
    std::ostringstream os;
    os << "power exponent p=" << p << " must exceed 2";
    throw Error(ErrorKind::InvalidExponent, os.str(), p);
  }
  return PowerTerm{c, ell, p};
}

double functional_value(const NonlinearSpec& spec, const Vector& u) {
  if (spec.affine || spec.nemytskii)
    throw Error(ErrorKind::PreconditionViolated, "functional_value is defined for power terms only");
  double value = 0.0;
  for (const auto& t : spec.power_terms) value += t.c / t.p * std::pow(std::abs(t.ell.dot(u)), t.p);
  return value;
}

double functional_first_variation(const NonlinearSpec& spec, const Vector& u, const Vector& v) {
  double value = 0.0;
  for (const auto& t : spec.power_terms) {
    const double s = t.ell.dot(u);
    value += t.c * std::pow(std::abs(s), t.p - 2.0) * s * t.ell.dot(v);
  }
  return value;
}

namespace {

// Characteristic function of the constant-coefficient problem in the signed
// frequency z (kappa = mu - c = z|z|), scaled by 1/cosh for z < 0.
double characteristic(double z, double alpha0, double alpha1) {
  double C, S;
  const double kappa = z * std::abs(z);
  if (z > 0.0) {
    C = std::cos(z);
    S = std::sin(z) / z;
  } else if (z < 0.0) {
    const double s = -z;
    C = 1.0;
    S = std::tanh(s) / s;
  } else {
    C = 1.0;
    S = 1.0;
  }
  return (alpha0 * alpha1 - kappa) * S - (alpha0 + alpha1) * C;
}

}  // namespace

double eigencurve_oracle_1d(const SteklovCoefficients& coeffs, double lambda, int k) {
  if (!coeffs.is_constant() || coeffs.A_coef[0] != 1.0 || coeffs.m0[0] != 1.0)
    throw Error(ErrorKind::InvalidArgument, "the 1D oracle needs constant coefficients with A = m0 = 1");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "eigenvalue index k is 1-based");

  const double c = coeffs.c[0];
  const double alpha0 = lambda * coeffs.b0[0] - coeffs.b_c[0];
  const double alpha1 = lambda * coeffs.b0[1] - coeffs.b_c[1];
  // kappa >= -A(1 + A) with A the positive part of alpha0 + alpha1.
  const double a_pos = std::max(alpha0, 0.0) + std::max(alpha1, 0.0);
  const double z_lo = -std::sqrt(a_pos * (1.0 + a_pos) + 1.0) - 0.1;
  const double z_hi = k * M_PI + std::abs(alpha0) + std::abs(alpha1) + 10.0;
  const double dz = 1e-3;

  auto D = [&](double z) { return characteristic(z, alpha0, alpha1); };
  int found = 0;
  double z_prev = z_lo;
  double d_prev = D(z_lo);
  if (d_prev == 0.0) throw Error(ErrorKind::RootBracketFailed, "characteristic function vanishes at the scan start");
  const long steps = static_cast<long>(std::ceil((z_hi - z_lo) / dz));
  for (long i = 1; i <= steps; ++i) {
    const double z = z_lo + static_cast<double>(i) * dz;
    const double d = D(z);
    double root = std::numeric_limits<double>::quiet_NaN();
    if (d == 0.0) {
      root = z;
    } else if (d_prev != 0.0 && (d < 0.0) != (d_prev < 0.0)) {
      double a = z_prev, b = z, fa = d_prev;
      for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = D(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      root = 0.5 * (a + b);
    }
    if (!std::isnan(root) && ++found == k) return c + root * std::abs(root);
    z_prev = z;
    d_prev = d;
  }
  std::ostringstream os;
  os << "could not bracket eigenvalue k=" << k << " at lambda=" << lambda;
  throw Error(ErrorKind::RootBracketFailed, os.str(), lambda);
}

Matrix nemytskii_pairing(const Mesh1D& mesh, Location location) {
  if (location == Location::Interior) return mass_matrix(mesh);
  const int n = mesh.n_nodes();
  Matrix W = Matrix::Zero(n, n);
  W(0, 0) = 1.0;
  W(n - 1, n - 1) = 1.0;
  return W;
}

Vector nemytskii_apply(const NemytskiiFn& fn, const Vector& u) { return u.unaryExpr(fn.f); }

double sobolev_norm(const Mesh1D& mesh, const Vector& w) {
  double l2 = 0.0, h1 = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double h = mesh.h(e);
    const double a = w(e), b = w(e + 1);
    l2 += h / 3.0 * (a * a + a * b + b * b);
    h1 += (b - a) * (b - a) / h;
  }
  return std::sqrt(l2) + std::sqrt(h1);
}

DerivativeCheckReport nemytskii_derivative_check(const Mesh1D& mesh, const NemytskiiFn& fn, const Vector& u,
                                                 const Vector& h, int shrink_steps) {
  if (u.size() != mesh.n_nodes() || h.size() != mesh.n_nodes())
    throw Error(ErrorKind::DimensionMismatch, "nemytskii_derivative_check: vectors must match the mesh");
  const Vector Tu = nemytskii_apply(fn, u);
  const Vector dF = u.unaryExpr(fn.df);

  DerivativeCheckReport report;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  for (int j = 0; j <= shrink_steps; ++j) {
    const Vector hj = std::ldexp(1.0, -j) * h;
    const Vector rem = nemytskii_apply(fn, u + hj) - Tu - dF.cwiseProduct(hj);
    const double hn = sobolev_norm(mesh, hj);
    const double rn = sobolev_norm(mesh, rem);
    const double ratio = rn / (hn * hn);
    report.rows.push_back({j, hn, rn, ratio});
    report.max_remainder = std::max(report.max_remainder, rn);
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }
  report.band = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  report.pass = report.max_remainder <= 1e-12 || report.band <= 10.0;
  return report;
}

}  // namespace fredholm
