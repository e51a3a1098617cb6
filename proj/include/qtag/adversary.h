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

// Eavesdropper strategies. Each strategy runs as handlers on two sites, E0
// between A0 and the tag and E1 between the tag and A1. The sites share
// nothing at run time except what they send each other as signals; any
// entanglement is installed before the first round.

#ifndef QTAG_ADVERSARY_H
#define QTAG_ADVERSARY_H

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "qtag/schemes.h"

namespace qtag {

enum class AdversaryKind {
    none,
    tag_off_silent,
    record_replay,
    store_and_wait,
    guess_measure,
    teleport_I_II,
    teleport_III_style,
};

inline constexpr AdversaryKind kAllAdversaries[] = {
    AdversaryKind::none,          AdversaryKind::tag_off_silent, AdversaryKind::record_replay,
    AdversaryKind::store_and_wait, AdversaryKind::guess_measure, AdversaryKind::teleport_I_II,
    AdversaryKind::teleport_III_style,
};

const char *adversary_name(AdversaryKind k);
std::optional<AdversaryKind> parse_adversary(std::string_view text);

struct AdversaryConfig {
    AdversaryKind kind = AdversaryKind::none;
    /// Site positions; NaN places each site halfway between its station and the tag.
    double e0 = std::numeric_limits<double>::quiet_NaN();
    double e1 = std::numeric_limits<double>::quiet_NaN();
    /// Singlets installed per round; 0 picks the strategy's requirement.
    int singlets_per_round = 0;
    double replay_delay = 1.0;

    double e0_or_default(const Geometry &g) const;
    double e1_or_default(const Geometry &g) const;
    /// Singlets the strategy needs per round for this scheme.
    int required_singlets(const SchemeConfig &scheme) const;
    void validate(const SchemeConfig &scheme) const;
};

/// Whether the strategy is defined for the scheme; `reason` explains a refusal.
bool applicable(AdversaryKind kind, SchemeId scheme, std::string *reason = nullptr);

/// The tag's power state the strategy is meant to run against.
bool tag_powered_for(AdversaryKind kind);

/// Instrumentation gathered by the sites; none of it feeds back into their decisions.
struct AdversaryStats {
    long singlets_installed = 0;
    long teleportations = 0;
    /// Rounds where a remote outcome was converted into a reported bit.
    long inference_rounds = 0;
    /// Of those, rounds where the correction Pauli did not map the basis to itself,
    /// so the flip rule was a guess rather than exact.
    long inexact_inferences = 0;
    long replayed_signals = 0;
    long destroyed_qubits = 0;
};

struct AdversarySites {
    AgentId e0 = kNoAgent;
    AgentId e1 = kNoAgent;
    std::shared_ptr<AdversaryStats> stats;
};

/// Adds both sites to the scheduler and pre-shares any entanglement. Must run
/// before the scheduler starts.
AdversarySites install_adversary(Scheduler &sched, const AdversaryConfig &cfg, const SchemeConfig &scheme,
                                 AgentId tag, Rng eve_rng);

/// Flip applied to a raw outcome measured on the uncorrected half, given the
/// Bell outcome at the other site. Exact when the correction preserves the
/// basis; otherwise falls back to the Pauli axis closest to the basis axis.
struct InferenceRule {
    bool flip = false;
    bool exact = true;
};
InferenceRule infer_flip(BellOutcome k, const BlochVector &axis);

/// Pauli axis (+-x, +-y, +-z) closest to the given unit vector.
BlochVector nearest_pauli_axis(const BlochVector &axis);

}  // namespace qtag

#endif
