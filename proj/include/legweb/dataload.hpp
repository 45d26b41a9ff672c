#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "legweb/form.hpp"

namespace legweb::data {

// Parsed declarative model file. One statement per line:
//   symbol NAME weight W origin {invariant|deformation|fresh}
//   entry NAME = FORM          complete scalar derivative
//   entry NAME ~ FORM          theta coefficient unspecified; a derivative
//                              symbol NAME_0 is appended automatically
//   bind NAME = POLY           named relation binding
//   phi I J = FORM             matrix entry
//   coframe {w1|w2|th|r0} = FORM   explicit coframe differential
//   chain STEP NAME = POLY     ordered substitution binding
//   lead NAME = POLY           quoted leading part for a solved binding
//   point NAME = P0, P1, P2, P3    frame-coordinate vector
struct ModelData {
    forms::DerivationTable table;
    std::map<std::string, sym::Poly> binds;
    std::optional<forms::MatrixForm> matrix;
    std::vector<sym::SymbolId> entry_symbols;  // symbols with explicit entry rows
    std::vector<sym::SymbolId> modtheta_fresh; // appended theta-derivative symbols
    bool has_coframe = false;
    std::vector<std::tuple<int, std::string, sym::Poly>> chain; // file order
    std::map<std::string, sym::Poly> leads;
    std::map<std::string, std::array<sym::Poly, 4>> points;
};

ModelData load_model_file(const std::string& path);

// Resolves NAME under $LEGWEB_DATA_DIR (or the built-in data directory).
std::string data_file(const std::string& name);

} // namespace legweb::data
