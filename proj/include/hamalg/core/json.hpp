#pragma once

#include "hamalg/core/expr.hpp"

#include <json.hpp>

namespace hamalg {

using Json = nlohmann::ordered_json;

/// {"ordered": bool, "terms": [...]} with one object per term.
Json ast_json(const Session& s, const std::vector<Term>& terms, bool ordered);
Json multi_index_json(const Session& s, const MultiIndex& k);

}  // namespace hamalg
