#pragma once

// nlohmann::json conversions for the library's value types. Kept out of
// the module headers so only I/O code pays for json.hpp.

#include <json.hpp>

#include "sysscale/params.hpp"
#include "sysscale/soc.hpp"
#include "sysscale/workload.hpp"

namespace sysscale {

using nlohmann::json;

void to_json(json &j, const PowerCoefficients &c);
void from_json(const json &j, PowerCoefficients &c);

void to_json(json &j, const PeripheralConfig &p);
void from_json(const json &j, PeripheralConfig &p);

void to_json(json &j, const OperatingPoint &op);

json config_to_json(const SocConfig &cfg);
SocConfig config_from_json(const json &j);

/// Reads a JSON config file. Throws ParseError with the file name on
/// malformed input.
SocConfig load_config(const std::string &path);

json read_json_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

} // namespace sysscale
