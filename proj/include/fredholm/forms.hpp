#pragma once

// Symmetric form triples (a, b, m) on a finite Galerkin basis and the
// coercive shifted forms a - lambda*b + tau*m built from them.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <string>
#include <vector>

namespace fredholm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class BasisKind { Toy, Steklov1D, UserSupplied };

const char* to_string(BasisKind kind) noexcept;

// Dense coefficient matrices of a (A), b (B) and m (M). The constructor only
// checks shapes; validate_triple() checks the structural assumptions.
class FormTriple {
 public:
  FormTriple(Matrix A, Matrix B, Matrix M, BasisKind basis = BasisKind::UserSupplied);

  Eigen::Index dim() const noexcept { return A_.rows(); }
  const Matrix& A() const noexcept { return A_; }
  const Matrix& B() const noexcept { return B_; }
  const Matrix& M() const noexcept { return M_; }
  BasisKind basis() const noexcept { return basis_; }

  // Replaces each matrix by (X + X^T)/2. Called once validation has passed.
  FormTriple symmetrized() const;

 private:
  Matrix A_, B_, M_;
  BasisKind basis_;
};

struct ValidationCheck {
  std::string name;
  bool pass;
  double value;  // asymmetry measure or smallest Cholesky pivot
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool pass = false;
};

inline constexpr double kSymmetryTol = 1e-12;

// Relative entrywise asymmetry max|X_ij - X_ji| / max(1, max|X_ij|).
double asymmetry(const Matrix& X);

ValidationReport validate_triple(const FormTriple& triple);

// S = A - lambda*B + tau*M together with its Cholesky factor.
class ShiftedForm {
 public:
  double lambda() const noexcept { return lambda_; }
  double tau() const noexcept { return tau_; }
  const Matrix& S() const noexcept { return S_; }
  Matrix factor() const { return llt_.matrixL(); }
  // Smallest pivot L_ii^2 of the factorization.
  double min_pivot() const noexcept { return min_pivot_; }
  double min_eig_estimate() const noexcept { return min_pivot_; }

  Vector solve(const Vector& rhs) const { return llt_.solve(rhs); }

 private:
  friend ShiftedForm shifted_form(const FormTriple&, double, double);
  ShiftedForm() = default;

  double lambda_ = 0.0;
  double tau_ = 0.0;
  Matrix S_;
  Eigen::LLT<Matrix> llt_;
  double min_pivot_ = 0.0;
};

// Throws NotCoercive when the factorization meets a nonpositive pivot.
ShiftedForm shifted_form(const FormTriple& triple, double lambda, double tau);

// First tau in 1, 2, 4, ... whose shifted form factors with every pivot
// at least 1e-10 * trace(S)/n. Throws ShiftSearchExceeded past 2^60.
ShiftedForm find_coercive_shift(const FormTriple& triple, double lambda);

inline constexpr double kPivotFloor = 1e-10;

double energy_norm(const ShiftedForm& shifted, const Vector& u);
double dual_norm(const ShiftedForm& shifted, const Vector& ell);

}  // namespace fredholm
