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

// One complete session (plan, simulate, verify) and repeated sessions for
// estimating how often an attack is accepted.

#ifndef QTAG_SESSION_H
#define QTAG_SESSION_H

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>

#include "qtag/adversary.h"
#include "qtag/verdict.h"

namespace qtag {

/// Seed for one component stream of one trial: splitmix64 over the master
/// seed, the FNV-1a hash of the stream tag, and the trial index.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index);

struct SessionSpec {
    SchemeConfig scheme;
    AdversaryConfig adversary;
    VerifierConfig verifier;
    /// Unset picks the power state the adversary targets.
    std::optional<bool> tag_on;
    bool invariant_checks = false;

    bool tag_powered() const { return tag_on.value_or(tag_powered_for(adversary.kind)); }
};

struct SessionResult {
    SessionPlan plan;
    Transcript transcript;
    Verdict verdict;
    AdversaryStats adversary;
    StationIds stations;
    AgentId tag = kNoAgent;
    bool tag_on = true;
};

SessionResult run_session(const SessionSpec &spec, std::uint64_t master_seed, std::uint64_t trial);

struct SpoofEstimate {
    long trials = 0;
    long accepts = 0;
    double p_hat = 0;
    Interval ci;
    /// Sessions in which each failure kind occurred at least once.
    std::map<FailureKind, long> sessions_with;
    /// Total occurrences of each failure kind.
    std::map<FailureKind, long> failure_totals;
    /// Lateness of mistimed deliveries, rounded to 1e-9, with counts.
    std::map<double, long> lateness_histogram;
    AdversaryStats adversary;
    ProjectiveTally projective;
    long statistical_bins_failed = 0;
    long deterministic_violations = 0;

    /// Most frequent failure kind across sessions, if any failed.
    std::optional<FailureKind> dominant_failure() const;
};

using SessionObserver = std::function<void(long trial, const SessionResult &)>;

SpoofEstimate estimate_spoof_rate(const SessionSpec &spec, long trials, std::uint64_t master_seed,
                                  const SessionObserver &observer = {});

}  // namespace qtag

#endif
