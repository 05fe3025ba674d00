// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "bigjump/conditions.hpp"
#include "bigjump/simulate.hpp"

namespace bigjump {

// Exit-code contract shared by the C API and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitMismatch = 2;
inline constexpr int kExitUnreliable = 3;

// One worked example run end to end: dependence conditions plus measured
// asymptotics, concluded purely from the numeric verdicts.
struct ExampleVerdict {
  int id = 0;
  nlohmann::ordered_json variant;
  std::string conclusion;  // single_big_jump_holds | big_jump_only | fails
  std::string expected;
  bool match = false;
  bool unreliable = false;
  std::vector<std::string> failing_conditions;
  nlohmann::ordered_json details;
};

ExampleVerdict run_example(int id, const std::map<std::string, double>& variant,
                           std::uint64_t seed, std::uint64_t budget, int threads);

// Dispatches a full run config (see README for the schema) and returns the
// report document: config echo, content hash, wall time, tables, verdicts and
// the deterministic CSV body under "csv". Never throws for config errors --
// they are reported with exit_code = 1 inside the document.
nlohmann::ordered_json run_config(const nlohmann::json& config);

// Serialization helpers (also used by the acceptance suite).
nlohmann::ordered_json table_json(const McTable& t);
nlohmann::ordered_json verdict_json(const std::string& name, const LimitVerdict& v);
nlohmann::ordered_json condition_report_json(const ConditionReport& r);
void append_table_csv(std::string& csv, const McTable& t);
std::string csv_header();

// SHA-256 of a byte string, hex encoded (content hashing for reports).
std::string sha256_hex(const std::string& bytes);

// Tiny expression grammar for boundary probes: products of a constant,
// x^p, log(x)^q and sqrt(x); also "x/c". Throws ConfigError on junk.
LittleH parse_h_expr(const std::string& expr);

}  // namespace bigjump
