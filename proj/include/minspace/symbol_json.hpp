#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "minspace/symbol.hpp"

namespace minspace {

// Schema violations (unknown type tag, malformed complex pair, ...).
class schema_error : public validation_error {
public:
  using validation_error::validation_error;
};

// Structurally valid symbol that fails self-map validation.
class selfmap_error : public validation_error {
public:
  using validation_error::validation_error;
};

// Interchange schema: nested nodes
//   {"type": "mobius",   "alpha": [re, im]}
//   {"type": "blaschke", "zeros": [[re, im], ...], "rotation": [re, im]}
//   {"type": "poly",     "coeffs": [[re, im], ...]}
//   {"type": "const",    "value": [re, im]}
//   {"type": "identity"}
//   {"type": "compose",  "outer": {...}, "inner": {...}}
//   {"type": "product",  "left": {...}, "right": {...}}
Symbol symbol_from_json(const nlohmann::json& j);
nlohmann::json symbol_to_json(const Symbol& s);

// Reads the file, builds the symbol, and runs validate_self_map. The
// validation report is written to `log` when given. Throws schema_error on
// malformed input (message carries the json parse location when available)
// and selfmap_error when the map is rejected.
Symbol parse_symbol_file(const std::string& path,
                         SelfMapReport* report = nullptr,
                         std::ostream* log = nullptr);

}  // namespace minspace
