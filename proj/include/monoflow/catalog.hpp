#pragma once

#include <json.hpp>

#include "monoflow/convex_function.hpp"
#include "monoflow/convex_set.hpp"
#include "monoflow/operators.hpp"
#include "monoflow/schedule.hpp"
#include "monoflow/types.hpp"

namespace monoflow {

using Json = nlohmann::json;

// JSON -> object factories used by config files.  Every object spec is keyed
// by "kind"; unknown kinds and unknown keys are rejected.
Vec make_vector(const Json& spec);
Mat make_matrix(const Json& spec);
SetPtr make_set(const Json& spec);
FunPtr make_function(const Json& spec);
OpPtr make_operator(const Json& spec);
Schedule make_schedule(const Json& spec);
Forcing make_forcing(const Json& spec);

// Rejects keys outside required+optional and missing required keys; `where`
// names the offending config node in error messages.
void check_keys(const Json& spec, const std::string& where,
                const std::vector<std::string>& required,
                const std::vector<std::string>& optional = {});

}  // namespace monoflow
