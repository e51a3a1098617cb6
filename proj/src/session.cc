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

#include "qtag/session.h"

#include <cmath>
#include <stdexcept>

namespace qtag {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::vector<std::pair<int, PlannedEmission>> emissions_of(const SessionPlan &plan, int station) {
    std::vector<std::pair<int, PlannedEmission>> out;
    for (const auto &r : plan.rounds) {
        for (const auto &e : station == 0 ? r.from_a0 : r.from_a1) {
            out.emplace_back(r.round, e);
        }
    }
    return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ fnv1a(stream)) + index);
}

SessionResult run_session(const SessionSpec &spec, std::uint64_t master_seed, std::uint64_t trial) {
    spec.scheme.validate();
    spec.adversary.validate(spec.scheme);

    SessionResult result;
    result.tag_on = spec.tag_powered();
    Rng plan_rng(derive_seed(master_seed, "plan", trial));
    result.plan = plan_rounds(spec.scheme, plan_rng);

    const auto &g = spec.scheme.geometry;
    Scheduler sched(Rng(derive_seed(master_seed, "physics", trial)));
    sched.set_invariant_checks(spec.invariant_checks);

    auto a0 = std::make_unique<StationAgent>(0, emissions_of(result.plan, 0));
    auto a1 = std::make_unique<StationAgent>(1, emissions_of(result.plan, 1));
    StationAgent *a0_ptr = a0.get();
    StationAgent *a1_ptr = a1.get();
    result.stations.a0 = sched.add_agent("A0", g.a0, std::move(a0));
    result.tag = sched.add_agent("T", g.t_plus, std::make_unique<TagAgent>(spec.scheme, result.tag_on));
    result.stations.a1 = sched.add_agent("A1", g.a1, std::move(a1));
    AdversarySites sites =
        install_adversary(sched, spec.adversary, spec.scheme, result.tag, Rng(derive_seed(master_seed, "eve", trial)));
    a0_ptr->schedule(sched, result.stations.a0);
    a1_ptr->schedule(sched, result.stations.a1);

    sched.run();
    if (spec.invariant_checks) {
        sched.check_invariants();
    }
    result.transcript = sched.transcript();
    result.adversary = *sites.stats;

    Rng verifier_rng(derive_seed(master_seed, "verifier", trial));
    result.verdict = verify(result.transcript, result.plan, result.stations, sched.store(), spec.verifier, verifier_rng);
    return result;
}

std::optional<FailureKind> SpoofEstimate::dominant_failure() const {
    std::optional<FailureKind> best;
    long best_count = 0;
    for (auto [kind, n] : sessions_with) {
        if (n > best_count) {
            best = kind;
            best_count = n;
        }
    }
    return best;
}

SpoofEstimate estimate_spoof_rate(const SessionSpec &spec, long trials, std::uint64_t master_seed,
                                  const SessionObserver &observer) {
    if (trials < 1) {
        throw std::invalid_argument("estimate_spoof_rate: trials must be at least 1");
    }
    SpoofEstimate est;
    for (long t = 0; t < trials; t++) {
        SessionResult r = run_session(spec, master_seed, static_cast<std::uint64_t>(t));
        const Verdict &v = r.verdict;
        est.trials++;
        est.accepts += v.accept ? 1 : 0;
        for (FailureKind k : kAllFailureKinds) {
            long n = v.count(k);
            if (n > 0) {
                est.sessions_with[k]++;
                est.failure_totals[k] += n;
            }
        }
        for (const auto &f : v.failures) {
            if (f.lateness) {
                est.lateness_histogram[std::round(*f.lateness * 1e9) / 1e9]++;
            }
        }
        for (const auto &b : v.stats.bins) {
            est.statistical_bins_failed += b.pass ? 0 : 1;
        }
        est.deterministic_violations += v.stats.deterministic_violations;
        est.projective.tests += v.projective.tests;
        est.projective.passes += v.projective.passes;
        est.adversary.singlets_installed += r.adversary.singlets_installed;
        est.adversary.teleportations += r.adversary.teleportations;
        est.adversary.inference_rounds += r.adversary.inference_rounds;
        est.adversary.inexact_inferences += r.adversary.inexact_inferences;
        est.adversary.replayed_signals += r.adversary.replayed_signals;
        est.adversary.destroyed_qubits += r.adversary.destroyed_qubits;
        if (observer) {
            observer(t, r);
        }
    }
    est.p_hat = static_cast<double>(est.accepts) / static_cast<double>(est.trials);
    est.ci = wilson_interval(est.accepts, est.trials);
    return est;
}

}  // namespace qtag
