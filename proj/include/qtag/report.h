// Copyright 2026 The qtag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run configuration, experiment matrices and their reports.

#ifndef QTAG_REPORT_H
#define QTAG_REPORT_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtag/session.h"

namespace qtag {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 20060101;

struct RunSpec {
    SessionSpec session;
    std::uint64_t seed = kDefaultSeed;
    long trials = 1;
    /// Rows to run; a single (scheme, adversary) pair unless a matrix was requested.
    std::vector<SchemeId> schemes;
    std::vector<AdversaryKind> adversaries;
    int transcript_rounds = 3;
    std::string json_path;
    std::string csv_path;
};

/// Thrown for malformed or inconsistent configuration; the message names the
/// offending flag or file line.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Applies one key=value setting. `context` prefixes error messages.
/// Recognised keys: scheme, adversary, rounds, seed, trials, geometry, tau,
/// m, n, f-table, alpha, bins, timing, replay-delay, tag, singlets,
/// transcript-rounds, json, csv.
void apply_setting(RunSpec &spec, const std::string &key, const std::string &value, const std::string &context);

/// Reads key=value lines; '#' starts a comment, blank lines are skipped.
void load_config_file(const std::string &path, RunSpec &spec);

/// Fills in defaults that depend on other settings and validates every row
/// that is applicable. Emits the XOR-table warning for Scheme II.
void finalize(RunSpec &spec, std::vector<std::string> *warnings = nullptr);

/// Parses "a0=..,t=..,a1=..,e0=..,e1=.." into the spec; missing keys keep their values.
void parse_geometry(const std::string &text, Geometry &g, AdversaryConfig &adv);
/// Parses rows separated by ';' of 0/1 digits, e.g. "01;10".
std::vector<std::vector<int>> parse_route_table(const std::string &text);

struct ReportRow {
    SchemeId scheme = SchemeId::I;
    AdversaryKind adversary = AdversaryKind::none;
    bool applicable = true;
    std::string reason;
    bool tag_on = true;
    SpoofEstimate estimate;
    std::vector<std::string> transcript_sample;
};

struct Report {
    RunSpec spec;
    std::string generated_at;
    bool partial = false;
    std::string error;
    std::vector<std::string> warnings;
    std::vector<ReportRow> rows;
};

/// Runs every requested row. On a simulation error the report is returned
/// with `partial` set and the error recorded.
Report run_matrix(const RunSpec &spec, std::vector<std::string> warnings = {});

nlohmann::json to_json(const Report &r);
std::string text_table(const Report &r);
std::string csv_table(const Report &r);

}  // namespace qtag

#endif
