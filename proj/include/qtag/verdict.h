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

// Post-hoc verification of a finished session by the two stations.

#ifndef QTAG_VERDICT_H
#define QTAG_VERDICT_H

#include <optional>
#include <string>
#include <vector>

#include "qtag/schemes.h"

namespace qtag {

enum class FailureKind { missing, mistimed, projective_fail, outcome_mismatch, statistical };
const char *failure_kind_name(FailureKind k);
inline constexpr FailureKind kAllFailureKinds[] = {FailureKind::missing, FailureKind::mistimed,
                                                   FailureKind::projective_fail, FailureKind::outcome_mismatch,
                                                   FailureKind::statistical};

struct Failure {
    int round = -1;    // -1 for session-level failures
    int station = -1;  // -1 when not tied to one station
    FailureKind kind = FailureKind::missing;
    std::string detail;
    /// Arrival minus expected time, for mistimed deliveries.
    std::optional<double> lateness;
};

struct StatTestConfig {
    double alpha = 0.001;
    int bins = 10;
};

struct VerifierConfig {
    bool check_timing = true;
    double timing_tolerance = 1e-9;
    StatTestConfig stats;
};

struct StationIds {
    AgentId a0 = kNoAgent;
    AgentId a1 = kNoAgent;
    AgentId of(int station) const { return station == 0 ? a0 : a1; }
};

/// One expectation paired with the delivery assigned to it, if any.
struct Match {
    int round = 0;
    int station = 0;
    ExpectKind kind = ExpectKind::qubit;
    double expected_time = 0;
    std::optional<std::size_t> delivery;  // index into Transcript::deliveries
};

struct TimingResult {
    std::vector<Match> matches;
    std::vector<Failure> failures;
};

/// Assigns deliveries to expectations. With timing checks on, each expectation
/// owns the slot of half a round period around its expected time and takes the
/// nearest delivery of its kind in that slot; |delta| > tolerance is mistimed
/// and an empty slot is missing. With timing checks off, deliveries are paired
/// with expectations in arrival order per station and kind.
TimingResult check_timing(const Transcript &transcript, const SessionPlan &plan, const StationIds &stations,
                          const VerifierConfig &cfg);

struct ProjectiveTally {
    long tests = 0;
    long passes = 0;
};

/// Runs the projective test on every matched qubit, consuming it.
std::vector<Failure> check_projective(const Transcript &transcript, const SessionPlan &plan,
                                      const TimingResult &timing, const StationIds &stations, QuantumStore &store,
                                      Rng &rng, ProjectiveTally *tally = nullptr);

struct BinReport {
    double lo = 0;
    double hi = 0;
    long rounds = 0;
    long zeros = 0;
    double expected_zeros = 0;
    double p_value = 1;
    bool pass = true;
};

struct RoundOutcome {
    int round = 0;
    std::optional<int> bit0;  // reported at A0
    std::optional<int> bit1;  // reported at A1
    double p0 = 0;
};

struct StatReport {
    bool pass = true;
    long deterministic_rounds = 0;
    long deterministic_violations = 0;
    double threshold = 0;
    std::vector<BinReport> bins;
    std::vector<RoundOutcome> outcomes;
};

/// Station consistency, exact deterministic cells and per-bin two-sided tests.
StatReport check_statistics(const Transcript &transcript, const SessionPlan &plan, const TimingResult &timing,
                            const StatTestConfig &cfg, std::vector<Failure> *failures);

/// Two-sided p-value for observing `k` successes of independent Bernoulli(p_i).
double poisson_binomial_two_sided(const std::vector<double> &p, long k);

struct Verdict {
    bool accept = false;
    std::vector<Failure> failures;
    ProjectiveTally projective;
    StatReport stats;

    long count(FailureKind k) const;
};

Verdict verify(const Transcript &transcript, const SessionPlan &plan, const StationIds &stations,
               QuantumStore &store, const VerifierConfig &cfg, Rng &rng);

struct Interval {
    double lo = 0;
    double hi = 1;
};
/// Wilson score interval at z = 1.96.
Interval wilson_interval(long successes, long trials);

}  // namespace qtag

#endif
