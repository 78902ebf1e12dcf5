#include "fredholm/fredholm.h"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct ProblemDeleter {
  void operator()(fh_problem* p) const { fh_problem_free(p); }
};
using ProblemPtr = std::unique_ptr<fh_problem, ProblemDeleter>;

struct CString {
  char* s = nullptr;
  ~CString() { fh_string_free(s); }
};

struct Globals {
  std::string config;
  std::string out;
  double tol = 0.0;
  std::uint64_t seed = 0;
};

int fail(fh_status status) {
  std::cerr << "error: " << fh_last_error() << '\n';
  return static_cast<int>(status);
}

int emit(const Globals& g, const char* text) {
  if (!text) return 0;
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return 0;
  }
  std::ofstream f(g.out, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) {
    std::cerr << "error: cannot write " << g.out << '\n';
    return FH_ERR_IO;
  }
  return 0;
}

ProblemPtr load(const Globals& g, fh_status& status) {
  fh_problem* p = nullptr;
  if (g.config.empty()) {
    std::cerr << "error: --config is required\n";
    status = FH_ERR_VALIDATION;
    return nullptr;
  }
  status = fh_problem_load(g.config.c_str(), &p);
  return ProblemPtr(p);
}

// mu from --mu or, with --mode-index k, mu_k(lambda).
fh_status resolve_mu(const fh_problem* p, double lambda, std::optional<double> mu, std::optional<int> mode,
                     double& out) {
  if (mu && mode) {
    std::cerr << "error: give either --mu or --mode-index, not both\n";
    return FH_ERR_VALIDATION;
  }
  if (mu) {
    out = *mu;
    return FH_OK;
  }
  if (!mode) {
    std::cerr << "error: --mu or --mode-index is required\n";
    return FH_ERR_VALIDATION;
  }
  fh_spectral* s = nullptr;
  fh_status st = fh_spectral_compute(p, lambda, &s);
  if (st == FH_OK) st = fh_spectral_mu(s, *mode, &out);
  fh_spectral_free(s);
  return st;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    v.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument(item);
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-parameter eigenproblems and Fredholm equations for symmetric form triples"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Problem JSON (triple or steklov)");
  app.add_option("--out", g.out, "Write output here instead of stdout");
  app.add_option("--tol", g.tol, "Tolerance override")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for randomized suites");

  auto* validate = app.add_subcommand("validate", "Check the structural assumptions of the problem");

  auto* curves = app.add_subcommand("eigencurves", "Tabulate mu_k(lambda) on a uniform lambda grid");
  double lmin = 0.0, lmax = 0.0;
  int points = 1, kcurves = 1;
  bool oracle_col = false;
  curves->add_option("--lambda-min", lmin)->required();
  curves->add_option("--lambda-max", lmax);
  curves->add_option("--points", points)->check(CLI::PositiveNumber);
  curves->add_option("--k", kcurves)->required()->check(CLI::PositiveNumber);
  curves->add_flag("--oracle", oracle_col, "Append the characteristic-equation oracle column");

  auto* lin = app.add_subcommand("solve-linear", "Solve a(u,v) = lambda b(u,v) + mu m(u,v) + ell(v)");
  double lin_lambda = 0.0;
  std::optional<double> lin_mu;
  std::optional<int> lin_mode;
  std::string ell, vhat;
  lin->add_option("--lambda", lin_lambda)->required();
  lin->add_option("--mu", lin_mu);
  lin->add_option("--mode-index", lin_mode, "Use mu = mu_k(lambda)")->check(CLI::PositiveNumber);
  lin->add_option("--ell", ell, "Functional: 1,0,0 | interior:f0 | boundary:gL,gR")->required();
  lin->add_option("--vhat", vhat, "Element of the resonant eigenspace (coefficients)");

  auto* nl = app.add_subcommand("solve-nonlinear", "Solve the equation with the configured nonlinearity");
  double nl_lambda = 0.0;
  std::optional<double> nl_mu;
  std::optional<int> nl_mode;
  std::string eps_text, method = "auto", init_text;
  bool resonant = false;
  nl->add_option("--lambda", nl_lambda)->required();
  nl->add_option("--mu", nl_mu);
  nl->add_option("--mode-index", nl_mode, "Use mu = mu_k(lambda)")->check(CLI::PositiveNumber);
  nl->add_option("--eps", eps_text, "eps value or comma list")->required();
  nl->add_option("--method", method)->check(CLI::IsMember({"picard", "newton", "auto"}));
  nl->add_flag("--resonant", resonant, "Follow the resonant branch from its bifurcation point");
  nl->add_option("--init", init_text, "Starting coefficients for nonresonant solves");

  auto* verify = app.add_subcommand("verify", "Run the property suites");
  std::string suite = "all";
  verify->add_option("--suite", suite)->check(CLI::IsMember({"spectrum", "bounds", "nonlinear", "nemytskii", "all"}));

  auto* orc = app.add_subcommand("oracle", "Characteristic-equation eigenvalue of a constant Steklov problem");
  double orc_lambda = 0.0;
  int orc_k = 1;
  orc->add_option("--lambda", orc_lambda)->required();
  orc->add_option("--k", orc_k)->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return FH_ERR_VALIDATION;
  }

  fh_status st = FH_OK;
  ProblemPtr problem = load(g, st);
  if (st != FH_OK) return g.config.empty() ? static_cast<int>(st) : fail(st);

  CString text;
  if (*validate) {
    st = fh_validate(problem.get(), &text.s, nullptr);
    if (int rc = emit(g, text.s)) return rc;
    return st == FH_OK ? 0 : fail(st);
  }
  if (*curves) {
    if (!curves->count("--lambda-max")) lmax = lmin;
    st = fh_eigencurves(problem.get(), lmin, lmax, points, kcurves, oracle_col ? 1 : 0, &text.s);
    if (st != FH_OK) return fail(st);
    return emit(g, text.s);
  }
  if (*lin) {
    double mu = 0.0;
    st = resolve_mu(problem.get(), lin_lambda, lin_mu, lin_mode, mu);
    if (st != FH_OK) return *fh_last_error() ? fail(st) : static_cast<int>(st);
    st = fh_solve_linear(problem.get(), lin_lambda, mu, ell.c_str(), vhat.empty() ? nullptr : vhat.c_str(), g.tol,
                         &text.s);
    if (int rc = emit(g, text.s)) return rc;
    return st == FH_OK ? 0 : fail(st);
  }
  if (*nl) {
    double mu = 0.0;
    st = resolve_mu(problem.get(), nl_lambda, nl_mu, nl_mode, mu);
    if (st != FH_OK) return *fh_last_error() ? fail(st) : static_cast<int>(st);
    std::vector<double> eps, init;
    try {
      eps = parse_list(eps_text);
      if (!init_text.empty()) init = parse_list(init_text);
    } catch (const std::exception&) {
      std::cerr << "error: --eps and --init take comma-separated numbers\n";
      return FH_ERR_VALIDATION;
    }
    if (!init.empty() && static_cast<int>(init.size()) != fh_problem_dim(problem.get())) {
      std::cerr << "error: --init needs " << fh_problem_dim(problem.get()) << " values\n";
      return FH_ERR_VALIDATION;
    }
    fh_nonlinear_options opts{};
    opts.lambda = nl_lambda;
    opts.mu = mu;
    opts.eps = eps.data();
    opts.n_eps = eps.size();
    opts.method = method == "picard" ? FH_METHOD_PICARD : method == "newton" ? FH_METHOD_NEWTON : FH_METHOD_AUTO;
    opts.resonant = resonant ? 1 : 0;
    opts.u_init = init.empty() ? nullptr : init.data();
    opts.tol = g.tol;
    st = fh_solve_nonlinear(problem.get(), &opts, &text.s);
    if (int rc = emit(g, text.s)) return rc;
    return st == FH_OK ? 0 : fail(st);
  }
  if (*verify) {
    int passed = 0;
    st = fh_verify(problem.get(), suite.c_str(), g.seed, g.tol, &text.s, &passed);
    if (int rc = emit(g, text.s)) return rc;
    return st == FH_OK ? 0 : fail(st);
  }
  if (*orc) {
    double mu = 0.0;
    st = fh_oracle(problem.get(), orc_lambda, orc_k, &mu);
    if (st != FH_OK) return fail(st);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g\n", mu);
    return emit(g, buf);
  }
  return 0;
}
