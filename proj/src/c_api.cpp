#include "fredholm/fredholm.h"

#include "fredholm/config.hpp"
#include "fredholm/errors.hpp"
#include "fredholm/linear.hpp"
#include "fredholm/nonlinear.hpp"
#include "fredholm/spectrum.hpp"
#include "fredholm/verify.hpp"
#include "json_writer.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>
#include <string>

struct fh_problem {
  fredholm::Problem problem;
};

struct fh_spectral {
  fredholm::SpectralData data;
};

namespace {

using namespace fredholm;

thread_local std::string g_last_error;
thread_local std::string g_last_kind;

fh_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io:
      return FH_ERR_IO;
    case ErrorKind::NotSolvable:
    case ErrorKind::InjectivityFailed:
    case ErrorKind::BifurcationRootNotFound:
      return FH_ERR_UNSOLVABLE;
    case ErrorKind::PicardNotContracting:
    case ErrorKind::MaxIterExceeded:
    case ErrorKind::NewtonDiverged:
    case ErrorKind::EigenFailure:
    case ErrorKind::RootBracketFailed:
      return FH_ERR_DIVERGENCE;
    default:
      return FH_ERR_VALIDATION;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_out(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

std::string error_document(const Error& e) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("error").value(to_string(e.kind()));
  w.key("message").value(e.what());
  if (!std::isnan(e.value())) {
    w.key(e.kind() == ErrorKind::NotSolvable ? "defect" : "value").value(e.value());
  }
  w.end_object();
  return w.str();
}

// Runs body, mapping exceptions to status codes and the thread-local error.
// error_out (if given) receives an error document on library errors.
template <class Body>
fh_status guarded(Body&& body, char** error_out = nullptr) {
  if (error_out) *error_out = nullptr;
  try {
    g_last_error.clear();
    g_last_kind.clear();
    return body();
  } catch (const Error& e) {
    g_last_error = e.what();
    g_last_kind = to_string(e.kind());
    try {
      set_out(error_out, error_document(e));
    } catch (...) {
    }
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    g_last_kind = "Internal";
  } catch (const std::exception& e) {
    g_last_error = e.what();
    g_last_kind = "Internal";
  } catch (...) {
    g_last_error = "unknown error";
    g_last_kind = "Internal";
  }
  return FH_ERR_INTERNAL;
}

fh_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  g_last_kind = to_string(ErrorKind::InvalidArgument);
  return FH_ERR_VALIDATION;
}

std::string strip_newline(std::string s) {
  while (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

}  // namespace

extern "C" {

const char* fh_version(void) { return "0.1.0"; }

const char* fh_last_error(void) { return g_last_error.c_str(); }

const char* fh_last_error_kind(void) { return g_last_kind.c_str(); }

void fh_string_free(char* s) { std::free(s); }

fh_status fh_problem_load(const char* path, fh_problem** out) {
  if (!path || !out) return null_argument("path/out");
  *out = nullptr;
  return guarded([&] {
    *out = new fh_problem{load_problem(path, true)};
    return FH_OK;
  });
}

fh_status fh_problem_parse(const char* json_text, fh_problem** out) {
  if (!json_text || !out) return null_argument("json_text/out");
  *out = nullptr;
  return guarded([&] {
    *out = new fh_problem{parse_problem(json_text, true)};
    return FH_OK;
  });
}

void fh_problem_free(fh_problem* problem) { delete problem; }

int fh_problem_dim(const fh_problem* problem) {
  if (!problem) return 0;
  if (problem->problem.triple) return static_cast<int>(problem->problem.triple->dim());
  return problem->problem.mesh ? problem->problem.mesh->n_nodes() : 0;
}

int fh_problem_is_steklov(const fh_problem* problem) { return problem && problem->problem.mesh ? 1 : 0; }

int fh_problem_has_nonlinearity(const fh_problem* problem) { return problem && problem->problem.spec ? 1 : 0; }

fh_status fh_validate(const fh_problem* problem, char** report, int* passed) {
  if (!problem) return null_argument("problem");
  return guarded([&] {
    const Problem& p = problem->problem;
    detail::JsonWriter w;
    w.begin_object();
    w.key("checks").begin_array();
    bool ok = true;
    auto check = [&](const std::string& name, bool pass, double value) {
      w.begin_object();
      w.key("name").value(name);
      w.key("pass").value(pass);
      w.key("value").value(value);
      w.end_object();
      ok = ok && pass;
    };
    if (p.mesh) {
      const bool compatible = check_compatibility(*p.mesh, *p.coeffs);
      check("compatibility", compatible, compatible ? 1.0 : 0.0);
    }
    if (p.triple) {
      for (const auto& c : validate_triple(*p.triple).checks) check(c.name, c.pass, c.value);
    } else {
      check("assembly", false, std::nan(""));
    }
    w.end_array();
    w.key("basis").value(p.triple ? to_string(p.triple->basis()) : "steklov-1d");
    w.key("dim").value(fh_problem_dim(problem));
    w.key("pass").value(ok);
    w.end_object();
    set_out(report, w.str());
    if (passed) *passed = ok ? 1 : 0;
    if (!ok) {
      g_last_error = "validation failed";
      g_last_kind = "ValidationFailed";
    }
    return ok ? FH_OK : FH_ERR_VALIDATION;
  });
}

fh_status fh_spectral_compute(const fh_problem* problem, double lambda, fh_spectral** out) {
  if (!problem || !out) return null_argument("problem/out");
  *out = nullptr;
  return guarded([&] {
    *out = new fh_spectral{canonical_data(problem->problem.forms(), lambda)};
    return FH_OK;
  });
}

void fh_spectral_free(fh_spectral* spectral) { delete spectral; }

int fh_spectral_size(const fh_spectral* spectral) { return spectral ? static_cast<int>(spectral->data.size()) : 0; }

double fh_spectral_tau(const fh_spectral* spectral) { return spectral ? spectral->data.tau : std::nan(""); }

fh_status fh_spectral_mu(const fh_spectral* spectral, int k, double* mu) {
  if (!spectral || !mu) return null_argument("spectral/mu");
  return guarded([&] {
    if (k < 1 || k > spectral->data.size()) throw Error(ErrorKind::InvalidArgument, "index k out of range");
    *mu = spectral->data.mu(k - 1);
    return FH_OK;
  });
}

fh_status fh_spectral_vector(const fh_spectral* spectral, int k, double* buffer, size_t length) {
  if (!spectral || !buffer) return null_argument("spectral/buffer");
  return guarded([&] {
    const auto n = spectral->data.size();
    if (k < 1 || k > n) throw Error(ErrorKind::InvalidArgument, "index k out of range");
    if (length != static_cast<size_t>(n)) throw Error(ErrorKind::DimensionMismatch, "buffer length must equal dim");
    for (Eigen::Index i = 0; i < n; ++i) buffer[i] = spectral->data.E_canon(i, k - 1);
    return FH_OK;
  });
}

fh_status fh_eigencurves(const fh_problem* problem, double lambda_min, double lambda_max, int points, int k,
                         int with_oracle, char** csv) {
  if (!problem || !csv) return null_argument("problem/csv");
  *csv = nullptr;
  return guarded([&] {
    const Problem& p = problem->problem;
    if (points < 1) throw Error(ErrorKind::InvalidArgument, "points must be at least 1");
    if (points > 1 && !(lambda_max >= lambda_min))
      throw Error(ErrorKind::InvalidArgument, "lambda-max must not be below lambda-min");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      grid[static_cast<std::size_t>(i)] =
          points == 1 ? lambda_min : lambda_min + (lambda_max - lambda_min) * i / (points - 1);
    const EigencurveTable table = trace_eigencurves(p.forms(), grid, k);
    if (!with_oracle) {
      set_out(csv, to_csv(table));
      return FH_OK;
    }
    if (!p.coeffs) throw Error(ErrorKind::InvalidArgument, "--oracle needs a Steklov problem");
    std::string out = "lambda,k,mu,oracle\n";
    for (const auto& row : table.rows) {
      out += format_double(row.lambda) + "," + std::to_string(row.k) + "," + format_double(row.mu) + "," +
             format_double(eigencurve_oracle_1d(*p.coeffs, row.lambda, row.k)) + "\n";
    }
    set_out(csv, out);
    return FH_OK;
  });
}

fh_status fh_oracle(const fh_problem* problem, double lambda, int k, double* mu) {
  if (!problem || !mu) return null_argument("problem/mu");
  return guarded([&] {
    if (!problem->problem.coeffs) throw Error(ErrorKind::InvalidArgument, "the oracle needs a Steklov problem");
    *mu = eigencurve_oracle_1d(*problem->problem.coeffs, lambda, k);
    return FH_OK;
  });
}

fh_status fh_solve_linear(const fh_problem* problem, double lambda, double mu, const char* ell, const char* vhat,
                          double tol, char** json) {
  if (!problem || !ell) return null_argument("problem/ell");
  return guarded(
      [&] {
        const Problem& p = problem->problem;
        const FormTriple& triple = p.forms();
        if (!validate_triple(triple).pass) throw Error(ErrorKind::InvalidArgument, "form triple fails validation");
        const FormTriple sym = triple.symmetrized();
        const double rtol = tol > 0.0 ? tol : kResonanceTol;
        const Vector ell_v = parse_functional(p, ell);
        const SpectralData sd = canonical_data(sym, lambda);
        const ResonanceGroup group = resonance_group(sd, mu, rtol);
        LinearSolution sol;
        if (group.empty()) {
          if (vhat) throw Error(ErrorKind::InvalidArgument, "vhat only applies at resonance");
          sol = solve_nonresonant(sym, sd, mu, ell_v);
        } else {
          const Vector v = vhat ? parse_functional(p, vhat) : Vector();
          sol = solve_resonant(sym, sd, group, ell_v, v, kSolvabilityTol);
        }
        set_out(json, to_json(sol));
        return FH_OK;
      },
      json);
}

fh_status fh_solve_nonlinear(const fh_problem* problem, const fh_nonlinear_options* options, char** json) {
  if (!problem || !options) return null_argument("problem/options");
  return guarded(
      [&] {
        const Problem& p = problem->problem;
        if (!p.spec) throw Error(ErrorKind::InvalidArgument, "config has no nonlinearity");
        if (!options->eps || options->n_eps == 0) throw Error(ErrorKind::InvalidArgument, "at least one eps needed");
        const FormTriple& triple = p.forms();
        if (!validate_triple(triple).pass) throw Error(ErrorKind::InvalidArgument, "form triple fails validation");
        const FormTriple sym = triple.symmetrized();
        const NonlinearSpec& spec = *p.spec;
        const Eigen::Index n = sym.dim();
        check_spec(spec, n);
        const std::vector<double> eps(options->eps, options->eps + options->n_eps);
        const double rtol = options->tol > 0.0 ? options->tol : kResonanceTol;
        const SpectralData sd = canonical_data(sym, options->lambda);

        if (options->resonant) {
          if (options->method == FH_METHOD_PICARD)
            throw Error(ErrorKind::InvalidArgument, "resonant runs use Newton; picard is not available");
          const ResonanceGroup group = resonance_group(sd, options->mu, rtol);
          if (group.empty())
            throw Error(ErrorKind::PreconditionViolated, "--resonant given but mu is not an eigenvalue at lambda");
          const BranchInfo info = resonant_branch(sym, sd, group, spec, eps);
          NonlinearSolution sol = newton_solve_resonant(sym, sd, group, spec, eps.front(), info.u0);
          sol.branch_info = info;
          set_out(json, to_json(sol));
          return FH_OK;
        }

        const Vector u_init = options->u_init ? Vector(Eigen::Map<const Vector>(options->u_init, n)) : Vector::Zero(n);
        auto solve_one = [&](double e) {
          if (options->method == FH_METHOD_NEWTON) return newton_solve_nonresonant(sym, sd, options->mu, spec, e, u_init);
          if (options->method == FH_METHOD_PICARD) return picard_solve(sym, sd, options->mu, spec, e, u_init);
          try {
            return picard_solve(sym, sd, options->mu, spec, e, u_init);
          } catch (const Error& err) {
            if (err.kind() != ErrorKind::PicardNotContracting && err.kind() != ErrorKind::MaxIterExceeded) throw;
          }
          return newton_solve_nonresonant(sym, sd, options->mu, spec, e, u_init);
        };
        if (eps.size() == 1) {
          set_out(json, to_json(solve_one(eps.front())));
          return FH_OK;
        }
        std::string out = "{\"sweep\":[";
        for (std::size_t i = 0; i < eps.size(); ++i) {
          if (i) out += ',';
          out += strip_newline(to_json(solve_one(eps[i])));
        }
        out += "]}\n";
        set_out(json, out);
        return FH_OK;
      },
      json);
}

fh_status fh_verify(const fh_problem* problem, const char* suite, uint64_t seed, double tol, char** table,
                    int* passed) {
  if (!problem) return null_argument("problem");
  return guarded([&] {
    VerifyOptions opts;
    opts.suite = suite ? suite : "all";
    opts.seed = seed;
    if (tol > 0.0) opts.tol = tol;
    const VerifyReport report = run_verify(problem->problem, opts);
    set_out(table, report.table());
    if (passed) *passed = report.pass ? 1 : 0;
    if (!report.pass) {
      g_last_error = "verification failed";
      g_last_kind = "VerificationFailed";
    }
    return report.pass ? FH_OK : FH_ERR_VALIDATION;
  });
}

}  // extern "C"
