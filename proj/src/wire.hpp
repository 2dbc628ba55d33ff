#pragma once

#include <vector>

#include "asrbench/adapters.hpp"
#include "json.hpp"

namespace asrbench {

// Decodes a `result` reply into responses, or throws the AdapterError an
// `error` reply names (capacity -> CapacityError, anything else -> fatal).
// The subprocess and HTTP transports share this body format.
std::vector<TranscriptionResponse> decode_result_body(const nlohmann::json& reply);

}  // namespace asrbench
