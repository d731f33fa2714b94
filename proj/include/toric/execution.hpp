#pragma once

namespace toric {

// Serial runs are the reference; parallel runs must reproduce them exactly.
enum class Execution { serial, parallel };

}  // namespace toric
