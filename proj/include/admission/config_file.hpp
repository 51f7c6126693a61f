#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "admission/harness.hpp"

namespace admission {

/// One section of a config document: `[name]` header followed by
/// `key = value` lines.  Keys before the first header land in the unnamed
/// global section, which supplies defaults to every named section.
struct ConfigSection {
    std::string name;
    std::map<std::string, std::string> values;
};

/// Parse `key = value` lines with `#` comments and `[section]` headers.
/// Throws std::invalid_argument with line context on malformed lines or
/// duplicate keys within a section.
std::vector<ConfigSection> read_config_sections(std::istream& in);

/// A RunConfig plus the bits that live outside it (output destination).
struct BuiltConfig {
    RunConfig config;
    std::string out;  // output path; empty means stdout
};

/// Build a run configuration from string key-values.  Keys match the CLI
/// flag names (lambda, mu, servers, reward, cost, horizon, runs, seed,
/// policy, schedule, epsilon, epsilon-bar, poly-power, sample-interval,
/// sim-mode, checkpoints, out); `replications` and `base_seed` are accepted
/// as aliases for `runs` and `seed`.  `lambda` and `mu` are required.
/// Unknown keys and unparsable values throw std::invalid_argument.
BuiltConfig build_run_config(const std::map<std::string, std::string>& values);

/// Expand parsed sections into sweep entries: global keys merged under each
/// named section, then `overrides` (e.g. explicit CLI flags) on top, with
/// config_index assigned by position.  A document with no named sections
/// yields a single entry from the global section.
std::vector<SweepEntry> sweep_entries_from_sections(
    const std::vector<ConfigSection>& sections,
    const std::map<std::string, std::string>& overrides = {});

/// String spellings used by the CLI and config files.
PolicyKind parse_policy_kind(const std::string& text);
ScheduleKind parse_schedule_kind(const std::string& text);
SimMode parse_sim_mode(const std::string& text);

}  // namespace admission
