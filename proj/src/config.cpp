#include "fredholm/config.hpp"

#include "fredholm/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace fredholm {

using nlohmann::json;

const FormTriple& Problem::forms() const {
  if (!triple) throw Error(ErrorKind::IncompatibleCoefficients, "problem has no admissible form triple");
  return *triple;
}

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::Parse, what); }

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) parse_error(where + " must be a number");
  return j.get<double>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) parse_error(where + " must be a number or an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number(x, where));
  return out;
}

Vector vector_of(const json& j, const std::string& where) {
  if (!j.is_array()) parse_error(where + " must be an array");
  const auto v = numbers(j, where);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::array<double, 2> pair_of(const json& j, const std::string& where) {
  const auto v = numbers(j, where);
  if (v.size() == 1) return {v[0], v[0]};
  if (v.size() != 2) parse_error(where + " needs two endpoint values");
  return {v[0], v[1]};
}

Matrix matrix_of(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) parse_error(where + " must have " + std::to_string(n) + " rows");
  Matrix X(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      parse_error(where + " row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
    for (int k = 0; k < n; ++k) X(i, k) = number(row[static_cast<std::size_t>(k)], where);
  }
  return X;
}

Location location_of(const json& j) {
  const std::string on = j.contains("on") ? j.at("on").get<std::string>() : "interior";
  if (on == "interior") return Location::Interior;
  if (on == "boundary") return Location::Boundary;
  parse_error("\"on\" must be \"interior\" or \"boundary\", got \"" + on + "\"");
}

Vector functional_of(const json& j, const Problem& problem, const std::string& where) {
  if (j.is_array()) return vector_of(j, where);
  if (j.is_object() && j.contains("ell")) return vector_of(j.at("ell"), where);
  if (j.is_object() && j.contains("density")) {
    if (!problem.mesh) parse_error(where + ": densities need a Steklov mesh");
    return build_rank_one_functional(*problem.mesh, numbers(j.at("density"), where), location_of(j),
                                     problem.strict);
  }
  parse_error(where + " needs \"ell\" or \"density\"");
}

NonlinearSpec spec_of(const json& j, Problem& problem) {
  if (!j.is_object()) parse_error("nonlinearity must be an object");
  problem.strict = j.value("strict", true);
  NonlinearSpec spec;
  if (j.contains("affine")) spec.affine = functional_of(j.at("affine"), problem, "affine");
  if (j.contains("power_terms")) {
    const auto& terms = j.at("power_terms");
    if (!terms.is_array()) parse_error("power_terms must be an array");
    for (const auto& t : terms) {
      const Vector ell = functional_of(t, problem, "power term");
      spec.power_terms.push_back(
          build_power_nonlinearity(ell, number(require(t, "p"), "p"), t.contains("c") ? number(t.at("c"), "c") : 1.0));
    }
  }
  if (j.contains("nemytskii")) {
    const auto& nj = j.at("nemytskii");
    NemytskiiTerm term;
    term.fn = nemytskii_fn(require(nj, "fn").get<std::string>());
    const Location loc = location_of(nj);
    term.on = loc == Location::Interior ? "interior" : "boundary";
    if (problem.mesh) {
      term.pairing = nemytskii_pairing(*problem.mesh, loc);
    } else {
      if (loc == Location::Boundary) parse_error("boundary nemytskii terms need a Steklov mesh");
      term.pairing = problem.triple->M();
    }
    spec.nemytskii = std::move(term);
  }
  return spec;
}

}  // namespace

Problem parse_problem(const std::string& text, bool allow_incompatible) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_error("problem document must be a JSON object");

  Problem problem;
  try {
    if (doc.contains("mesh")) {
      const auto& mj = doc.at("mesh");
      const int n = require(mj, "n").get<int>();
      double a = 0.0, b = 1.0;
      if (mj.contains("interval")) {
        const auto iv = pair_of(mj.at("interval"), "interval");
        a = iv[0];
        b = iv[1];
      }
      problem.mesh = Mesh1D::uniform(n, a, b);
      SteklovCoefficients c;
      if (doc.contains("coeffs")) {
        const auto& cj = doc.at("coeffs");
        if (cj.contains("A")) c.A_coef = numbers(cj.at("A"), "A");
        if (cj.contains("c")) c.c = numbers(cj.at("c"), "c");
        if (cj.contains("m0")) c.m0 = numbers(cj.at("m0"), "m0");
        if (cj.contains("b_c")) c.b_c = pair_of(cj.at("b_c"), "b_c");
        if (cj.contains("b0")) c.b0 = pair_of(cj.at("b0"), "b0");
      }
      problem.coeffs = c;
      try {
        problem.triple = assemble_forms(*problem.mesh, c);
      } catch (const Error& e) {
        if (!(allow_incompatible && e.kind() == ErrorKind::IncompatibleCoefficients)) throw;
      }
    } else {
      const int n = require(doc, "dim").get<int>();
      if (n < 1) parse_error("dim must be positive");
      problem.triple = FormTriple(matrix_of(require(doc, "A"), n, "A"), matrix_of(require(doc, "B"), n, "B"),
                                  matrix_of(require(doc, "M"), n, "M"), BasisKind::UserSupplied);
    }
    if (doc.contains("nonlinearity") && !doc.at("nonlinearity").is_null()) {
      problem.spec = spec_of(doc.at("nonlinearity"), problem);
      if (problem.triple) check_spec(*problem.spec, problem.triple->dim());
    }
  } catch (const json::exception& e) {
    parse_error(std::string("malformed problem document: ") + e.what());
  }
  return problem;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

Problem load_problem(const std::string& path, bool allow_incompatible) {
  return parse_problem(read_file(path), allow_incompatible);
}

Vector parse_functional(const Problem& problem, const std::string& descriptor) {
  std::string body = descriptor;
  std::optional<Location> loc;
  if (const auto colon = descriptor.find(':'); colon != std::string::npos) {
    const std::string head = descriptor.substr(0, colon);
    body = descriptor.substr(colon + 1);
    if (head == "interior") loc = Location::Interior;
    else if (head == "boundary") loc = Location::Boundary;
    else parse_error("unknown functional kind \"" + head + "\"");
  }
  std::vector<double> values;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      parse_error("cannot read number \"" + item + "\" in functional descriptor");
    }
  }
  if (values.empty()) parse_error("empty functional descriptor");
  if (loc) {
    if (!problem.mesh) parse_error("density functionals need a Steklov mesh");
    return build_rank_one_functional(*problem.mesh, values, *loc, problem.strict);
  }
  Vector ell = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  if (problem.triple && ell.size() != problem.triple->dim())
    throw Error(ErrorKind::DimensionMismatch, "functional has " + std::to_string(ell.size()) + " entries, expected " +
                                                  std::to_string(problem.triple->dim()));
  return ell;
}

}  // namespace fredholm
