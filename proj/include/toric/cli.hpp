#pragma once

#include <exception>
#include <iosfwd>

#include <json.hpp>

#include "toric/exactnum.hpp"

namespace toric::cli {

inline constexpr const char* kToolName = "toric-heights";
inline constexpr const char* kVersion = "1.0.0";

enum ExitCode { ok = 0, failure = 1, schema = 2, precision = 3, invariant = 4 };

struct RunSettings {
  int threads = 0;  // 0 leaves the OpenMP default
  int precision_bits = kDefaultPrecisionBits;
};

// Executes one job and returns the report envelope. Throws SchemaError,
// PrecisionExhausted or InvariantViolation.
nlohmann::json run_job(const nlohmann::json& job, const RunSettings& settings);

// Exit code for an exception escaping run_job.
ExitCode exit_code_of(const std::exception& e);

// Precision from the flag, else TORIC_HEIGHTS_PRECISION, else the default.
int resolve_precision(int flag_bits, const char* env_value);

// Full command line: toric-heights <command> --job f.json [--out o.json]
// [--threads N] [--precision-bits B]. Diagnostics go to err as JSON.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace toric::cli
