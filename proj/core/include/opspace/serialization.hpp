#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "opspace/bioperators.hpp"
#include "opspace/quantum_space.hpp"
#include "opspace/tensor_products.hpp"

namespace opspace {

using Json = nlohmann::json;

/// {"rows": int, "cols": int, "re": [row-major], "im": [row-major]}
Json to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const Json& j);

/// {"kind": string, "in_dim": int, "out_dim": int, "basis": [matrix…]}
Json to_json(const OperatorSpace& space);
SpacePtr space_from_json(const Json& j);

using SpaceRegistry = std::map<std::string, SpacePtr>;

/// {"space": object|ref-string, "level": int, "coeffs": [matrix…]}
Json to_json(const AmplifiedElement& u);
AmplifiedElement element_from_json(const Json& j,
                                   const SpaceRegistry& registry = {});

/// {"dom_E": space, "dom_F": space, "cod_G": space,
///  "structure": [[[ [re,im] …k ] …j ] …i ]}
Json to_json(const Bioperator& r);
Bioperator bioperator_from_json(const Json& j);

/// {"level": int, "value": float, "witness_u": element, "witness_v": element}
Json to_json(const BioperatorEstimate& e);

Json to_json(const NormBracket& b);

Json to_json(const EqualityReport& r);

}  // namespace opspace
