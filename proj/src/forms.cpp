#include "fredholm/forms.hpp"

#include "fredholm/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fredholm {

const char* to_string(BasisKind kind) noexcept {
  switch (kind) {
    case BasisKind::Toy: return "toy";
    case BasisKind::Steklov1D: return "steklov-1d";
    case BasisKind::UserSupplied: return "user-supplied";
  }
  return "user-supplied";
}

FormTriple::FormTriple(Matrix A, Matrix B, Matrix M, BasisKind basis)
    : A_(std::move(A)), B_(std::move(B)), M_(std::move(M)), basis_(basis) {
  const auto n = A_.rows();
  if (n < 1 || A_.cols() != n || B_.rows() != n || B_.cols() != n || M_.rows() != n ||
      M_.cols() != n) {
    std::ostringstream os;
    os << "form matrices must be square with a common dimension >= 1 (A " << A_.rows() << "x"
       << A_.cols() << ", B " << B_.rows() << "x" << B_.cols() << ", M " << M_.rows() << "x"
       << M_.cols() << ")";
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

FormTriple FormTriple::symmetrized() const {
  auto sym = [](const Matrix& X) -> Matrix { return 0.5 * (X + X.transpose()); };
  return FormTriple(sym(A_), sym(B_), sym(M_), basis_);
}

double asymmetry(const Matrix& X) {
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  return (X - X.transpose()).cwiseAbs().maxCoeff() / scale;
}

namespace {

// Smallest Cholesky pivot, or the first nonpositive one encountered.
double cholesky_min_pivot(const Matrix& X) {
  const auto n = X.rows();
  Matrix L = X;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = L(j, j) - L.row(j).head(j).squaredNorm();
    min_pivot = std::min(min_pivot, d);
    if (!(d > 0.0)) return d;
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    if (j + 1 < n) {
      L.col(j).tail(n - j - 1) =
          (L.col(j).tail(n - j - 1) - L.bottomLeftCorner(n - j - 1, j) * L.row(j).head(j).transpose()) /
          ljj;
    }
  }
  return min_pivot;
}

}  // namespace

ValidationReport validate_triple(const FormTriple& triple) {
  ValidationReport report;
  const double asym_a = asymmetry(triple.A());
  const double asym_b = asymmetry(triple.B());
  const double asym_m = asymmetry(triple.M());
  report.checks.push_back({"A symmetric", asym_a <= kSymmetryTol, asym_a});
  report.checks.push_back({"B symmetric", asym_b <= kSymmetryTol, asym_b});
  report.checks.push_back({"M symmetric", asym_m <= kSymmetryTol, asym_m});

  const FormTriple sym = triple.symmetrized();
  const double pivot_a = cholesky_min_pivot(sym.A());
  const double pivot_m = cholesky_min_pivot(sym.M());
  report.checks.push_back({"A positive definite", pivot_a > 0.0, pivot_a});
  report.checks.push_back({"M positive definite", pivot_m > 0.0, pivot_m});

  report.pass = true;
  for (const auto& c : report.checks) report.pass = report.pass && c.pass;
  return report;
}

ShiftedForm shifted_form(const FormTriple& triple, double lambda, double tau) {
  ShiftedForm out;
  out.lambda_ = lambda;
  out.tau_ = tau;
  out.S_ = triple.A() - lambda * triple.B() + tau * triple.M();
  out.llt_.compute(out.S_);
  const Matrix L = out.llt_.matrixL();
  const double min_diag = L.diagonal().minCoeff();
  out.min_pivot_ = min_diag * min_diag;
  if (out.llt_.info() != Eigen::Success || !(min_diag > 0.0)) {
    const double pivot = cholesky_min_pivot(out.S_);
    std::ostringstream os;
    os << "a - lambda b + tau m is not positive definite at lambda=" << lambda << ", tau=" << tau
       << " (pivot " << pivot << ")";
    throw Error(ErrorKind::NotCoercive, os.str(), pivot);
  }
  return out;
}

ShiftedForm find_coercive_shift(const FormTriple& triple, double lambda) {
  const double n = static_cast<double>(triple.dim());
  for (int e = 0; e <= 60; ++e) {
    const double tau = std::ldexp(1.0, e);
    try {
      ShiftedForm s = shifted_form(triple, lambda, tau);
      if (s.min_pivot() >= kPivotFloor * s.S().trace() / n) return s;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::NotCoercive) throw;
    }
  }
  std::ostringstream os;
  os << "no coercive shift tau <= 2^60 at lambda=" << lambda;
  throw Error(ErrorKind::ShiftSearchExceeded, os.str(), lambda);
}

double energy_norm(const ShiftedForm& shifted, const Vector& u) {
  if (u.size() != shifted.S().rows())
    throw Error(ErrorKind::DimensionMismatch, "energy_norm: vector size does not match the form");
  return std::sqrt(std::max(0.0, u.dot(shifted.S() * u)));
}

double dual_norm(const ShiftedForm& shifted, const Vector& ell) {
  if (ell.size() != shifted.S().rows())
    throw Error(ErrorKind::DimensionMismatch, "dual_norm: functional size does not match the form");
  return std::sqrt(std::max(0.0, ell.dot(shifted.solve(ell))));
}

}  // namespace fredholm
