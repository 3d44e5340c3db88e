#include "minspace/symbol_json.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace minspace {

namespace {

using nlohmann::json;

Complex complex_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw schema_error(std::string(what) + " must be a [re, im] number pair");
  }
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!is_finite(z)) {
    throw schema_error(std::string(what) + " must be finite");
  }
  return z;
}

json complex_to(Complex z) { return json::array({z.real(), z.imag()}); }

const json& member(const json& j, const char* key, const char* type) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw schema_error(std::string("symbol node \"") + type +
                       "\" is missing field \"" + key + "\"");
  }
  return *it;
}

}  // namespace

Symbol symbol_from_json(const json& j) {
  if (!j.is_object()) {
    throw schema_error("symbol node must be a JSON object");
  }
  const auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) {
    throw schema_error("symbol node needs a string \"type\" field");
  }
  const std::string type = type_it->get<std::string>();

  try {
    if (type == "identity") {
      return identity_symbol();
    }
    if (type == "const") {
      return make_constant(complex_from(member(j, "value", "const"), "value"));
    }
    if (type == "mobius") {
      return make_mobius(complex_from(member(j, "alpha", "mobius"), "alpha"));
    }
    if (type == "blaschke") {
      const json& zj = member(j, "zeros", "blaschke");
      if (!zj.is_array()) throw schema_error("blaschke zeros must be an array");
      std::vector<Complex> zeros;
      for (const auto& e : zj) zeros.push_back(complex_from(e, "zero"));
      return make_blaschke(std::move(zeros),
                           complex_from(member(j, "rotation", "blaschke"),
                                        "rotation"));
    }
    if (type == "poly") {
      const json& cj = member(j, "coeffs", "poly");
      if (!cj.is_array()) throw schema_error("poly coeffs must be an array");
      std::vector<Complex> coeffs;
      for (const auto& e : cj) coeffs.push_back(complex_from(e, "coefficient"));
      return make_polynomial(std::move(coeffs));
    }
    if (type == "compose") {
      return compose(symbol_from_json(member(j, "outer", "compose")),
                     symbol_from_json(member(j, "inner", "compose")));
    }
    if (type == "product") {
      return product(symbol_from_json(member(j, "left", "product")),
                     symbol_from_json(member(j, "right", "product")));
    }
  } catch (const schema_error&) {
    throw;
  } catch (const validation_error& e) {
    // Constructor-level rejections (|alpha| > 1, bad rotation, ...) are
    // schema problems from the file's point of view.
    throw schema_error(e.what());
  }
  throw schema_error("unknown symbol type \"" + type + "\"");
}

namespace {

struct ToJson {
  json operator()(const Symbol::Identity&) const {
    return json{{"type", "identity"}};
  }
  json operator()(const Symbol::Constant& c) const {
    return json{{"type", "const"}, {"value", complex_to(c.value)}};
  }
  json operator()(const Symbol::Mobius& m) const {
    return json{{"type", "mobius"}, {"alpha", complex_to(m.alpha)}};
  }
  json operator()(const Symbol::Blaschke& b) const {
    json zeros = json::array();
    for (Complex a : b.zeros) zeros.push_back(complex_to(a));
    return json{{"type", "blaschke"},
                {"zeros", zeros},
                {"rotation", complex_to(b.rotation)}};
  }
  json operator()(const Symbol::Polynomial& p) const {
    json coeffs = json::array();
    for (Complex c : p.coeffs) coeffs.push_back(complex_to(c));
    return json{{"type", "poly"}, {"coeffs", coeffs}};
  }
  json operator()(const Symbol::Compose& c) const {
    return json{{"type", "compose"},
                {"outer", std::visit(ToJson{}, c.outer->v)},
                {"inner", std::visit(ToJson{}, c.inner->v)}};
  }
  json operator()(const Symbol::Product& p) const {
    return json{{"type", "product"},
                {"left", std::visit(ToJson{}, p.left->v)},
                {"right", std::visit(ToJson{}, p.right->v)}};
  }
};

}  // namespace

json symbol_to_json(const Symbol& s) { return std::visit(ToJson{}, s.node()); }

Symbol parse_symbol_file(const std::string& path, SelfMapReport* report,
                         std::ostream* log) {
  std::ifstream in(path);
  if (!in) {
    throw schema_error("cannot open symbol file: " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    // nlohmann reports byte offsets; surface them as the location.
    throw schema_error("symbol file " + path + ": " + e.what());
  }
  Symbol sym = symbol_from_json(j);
  const SelfMapReport rep = validate_self_map(sym);
  if (report != nullptr) *report = rep;
  if (log != nullptr) {
    *log << "self-map validation: max |psi| = " << rep.max_modulus << " over "
         << rep.samples << " samples"
         << (rep.boundary_touching ? ", boundary-touching" : "")
         << (rep.accepted ? ", accepted" : ", rejected") << "\n";
  }
  if (!rep.accepted) {
    std::ostringstream msg;
    msg << "symbol in " << path
        << " rejected as a self-map: max |psi| = " << rep.max_modulus;
    if (rep.eval_failures > 0) {
      msg << " (" << rep.eval_failures << " evaluation failures)";
    }
    throw selfmap_error(msg.str());
  }
  return sym;
}

}  // namespace minspace
