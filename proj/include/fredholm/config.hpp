#pragma once

// JSON problem documents. Two shapes are accepted:
//   triple:  {"dim": n, "A": [[...]], "B": [[...]], "M": [[...]], "nonlinearity": {...}}
//   steklov: {"mesh": {"n": N, "interval": [a, b]},
//             "coeffs": {"A": ..., "c": ..., "m0": ..., "b_c": [l, r], "b0": [l, r]},
//             "nonlinearity": {...}}
// Coefficients are a number or one value per element.
//
// Nonlinearity:
//   {"affine": [...] | {"density": [...], "on": "interior"|"boundary"},
//    "power_terms": [{"c": 1, "p": 3, "ell": [...]} | {"c": 1, "p": 3, "density": [...], "on": ...}],
//    "nemytskii": {"fn": "sin", "on": "interior"|"boundary"},
//    "strict": true}

#include "fredholm/forms.hpp"
#include "fredholm/nonlinear.hpp"
#include "fredholm/steklov.hpp"

#include <optional>
#include <string>

namespace fredholm {

struct Problem {
  std::optional<FormTriple> triple;  // empty when Steklov coefficients fail compatibility
  std::optional<Mesh1D> mesh;
  std::optional<SteklovCoefficients> coeffs;
  std::optional<NonlinearSpec> spec;
  bool strict = true;

  const FormTriple& forms() const;
};

// Parse errors throw ErrorKind::Parse. Incompatible Steklov data leaves
// triple empty when allow_incompatible is set and throws otherwise.
Problem parse_problem(const std::string& text, bool allow_incompatible = false);
Problem load_problem(const std::string& path, bool allow_incompatible = false);

// Functional descriptors: "1,0,0" (coefficients), "interior:f0[,f0...]",
// "boundary:gL,gR" (Steklov problems only).
Vector parse_functional(const Problem& problem, const std::string& descriptor);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace fredholm
