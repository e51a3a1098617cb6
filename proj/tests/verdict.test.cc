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

#include "qtag/verdict.h"

#include "gtest/gtest.h"

#include "qtag/session.h"

using namespace qtag;

namespace {

SessionSpec spec_for(SchemeId s, AdversaryKind k, int rounds) {
    SessionSpec spec;
    spec.scheme.scheme = s;
    spec.scheme.rounds = rounds;
    spec.adversary.kind = k;
    return spec;
}

struct Idle : Agent {
    void on_signal(AgentContext &, const Signal &) override {}
};

double binomial_tail_oracle(int n, double p, int k, bool lower) {
    double sum = 0;
    for (int j = 0; j <= n; j++) {
        if (lower ? j > k : j < k) continue;
        double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
        sum += std::exp(logc + j * std::log(p) + (n - j) * std::log1p(-p));
    }
    return sum;
}

}  // namespace

TEST(verdict, empty_transcript_is_all_missing) {
    SchemeConfig c;
    c.rounds = 5;
    Rng rng(1);
    auto plan = plan_rounds(c, rng);
    Transcript empty;
    auto timing = check_timing(empty, plan, StationIds{0, 2}, VerifierConfig{});
    ASSERT_EQ(timing.failures.size(), 5u);
    for (const auto &f : timing.failures) ASSERT_EQ(f.kind, FailureKind::missing);
}

TEST(verdict, honest_sessions_have_no_failures) {
    for (auto s : kAllSchemes) {
        auto r = run_session(spec_for(s, AdversaryKind::none, 50), 2, 0);
        ASSERT_TRUE(r.verdict.accept);
        ASSERT_EQ(r.verdict.projective.tests, r.verdict.projective.passes);
    }
}

TEST(verdict, poisson_binomial_matches_binomial_oracle) {
    for (int n : {1, 7, 40, 200}) {
        for (double p : {0.05, 0.3, 0.5, 0.93}) {
            std::vector<double> ps(n, p);
            for (int k : {0, n / 3, n / 2, n}) {
                double lower = binomial_tail_oracle(n, p, k, true);
                double upper = binomial_tail_oracle(n, p, k, false);
                double want = std::min(1.0, 2 * std::min(lower, upper));
                ASSERT_NEAR(poisson_binomial_two_sided(ps, k), want, 1e-9 + 1e-9 * want) << n << " " << p << " " << k;
            }
        }
    }
    // Mixed probabilities: brute force over all outcomes of three coins.
    std::vector<double> ps = {0.2, 0.7, 0.9};
    double pmf[4] = {0, 0, 0, 0};
    for (int mask = 0; mask < 8; mask++) {
        double w = 1;
        int ones = 0;
        for (int i = 0; i < 3; i++) {
            bool on = (mask >> i) & 1;
            w *= on ? ps[i] : 1 - ps[i];
            ones += on;
        }
        pmf[ones] += w;
    }
    double lower = pmf[0] + pmf[1], upper = pmf[1] + pmf[2] + pmf[3];
    ASSERT_NEAR(poisson_binomial_two_sided(ps, 1), std::min(1.0, 2 * std::min(lower, upper)), 1e-12);
}

TEST(verdict, wilson_interval_reference_values) {
    auto a = wilson_interval(0, 10);
    ASSERT_NEAR(a.lo, 0, 1e-12);
    ASSERT_NEAR(a.hi, 0.27753, 1e-4);
    auto b = wilson_interval(50, 100);
    ASSERT_NEAR(b.lo, 0.40383, 1e-4);
    ASSERT_NEAR(b.hi, 0.59617, 1e-4);
    auto c = wilson_interval(200, 200);
    ASSERT_NEAR(c.hi, 1, 1e-12);
    ASSERT_NEAR(c.lo, 0.98116, 1e-4);
}

TEST(verdict, acceptance_iff_no_failures) {
    for (auto k : {AdversaryKind::none, AdversaryKind::guess_measure, AdversaryKind::teleport_III_style}) {
        estimate_spoof_rate(spec_for(SchemeId::IV, k, 100), 20, 3, [](long, const SessionResult &r) {
            ASSERT_EQ(r.verdict.accept, r.verdict.failures.empty());
        });
    }
}

TEST(verdict, contradicted_deterministic_cell_rejects) {
    auto spec = spec_for(SchemeId::III, AdversaryKind::none, 60);
    auto r = run_session(spec, 4, 0);
    ASSERT_TRUE(r.verdict.accept);
    // Flip one report pair on a deterministic round and re-verify.
    int target = -1;
    for (const auto &o : r.verdict.stats.outcomes) {
        if (o.p0 == 1 || o.p0 == 0) {
            target = o.round;
            break;
        }
    }
    ASSERT_GE(target, 0);
    Transcript t = r.transcript;
    for (auto &d : t.deliveries) {
        if (d.round == target && d.kind == PayloadKind::outcome_report &&
            (d.agent == r.stations.a0 || d.agent == r.stations.a1)) {
            auto &rep = std::get<OutcomeReport>(*d.classical);
            rep.bit ^= 1;
        }
    }
    auto timing = check_timing(t, r.plan, r.stations, spec.verifier);
    std::vector<Failure> failures;
    auto stats = check_statistics(t, r.plan, timing, spec.verifier.stats, &failures);
    ASSERT_FALSE(stats.pass);
    ASSERT_EQ(stats.deterministic_violations, 1);
    ASSERT_EQ(failures.size(), 1u);
    ASSERT_EQ(failures[0].round, target);
}

TEST(verdict, station_disagreement_is_a_mismatch) {
    auto spec = spec_for(SchemeId::IV, AdversaryKind::none, 30);
    auto r = run_session(spec, 5, 0);
    Transcript t = r.transcript;
    for (auto &d : t.deliveries) {
        if (d.round == 7 && d.kind == PayloadKind::outcome_report && d.agent == r.stations.a1) {
            std::get<OutcomeReport>(*d.classical).bit ^= 1;
        }
    }
    auto timing = check_timing(t, r.plan, r.stations, spec.verifier);
    std::vector<Failure> failures;
    check_statistics(t, r.plan, timing, spec.verifier.stats, &failures);
    ASSERT_FALSE(failures.empty());
    ASSERT_EQ(failures[0].kind, FailureKind::outcome_mismatch);
    ASSERT_EQ(failures[0].round, 7);
}

TEST(verdict, constant_reports_fail_scheme_iv) {
    auto spec = spec_for(SchemeId::IV, AdversaryKind::none, 1000);
    auto r = run_session(spec, 6, 0);
    Transcript t = r.transcript;
    for (auto &d : t.deliveries) {
        if (d.kind == PayloadKind::outcome_report) std::get<OutcomeReport>(*d.classical).bit = 0;
    }
    auto timing = check_timing(t, r.plan, r.stations, spec.verifier);
    auto stats = check_statistics(t, r.plan, timing, spec.verifier.stats, nullptr);
    ASSERT_FALSE(stats.pass);
    ASSERT_FALSE(stats.bins.front().pass);
}

TEST(verdict, fresh_random_qubit_passes_half_the_time) {
    Rng rng(7);
    Scheduler sched(Rng(8));
    AgentId a = sched.add_agent("A", 0, std::make_unique<Idle>());
    long passes = 0;
    const long trials = 10000;
    for (long k = 0; k < trials; k++) {
        auto target = sample_uniform_bloch(rng);
        QubitHandle h = sched.store().create(sample_uniform_bloch(rng), a);
        passes += sched.store().projective_test(h, a, target, rng);
        ASSERT_FALSE(sched.store().is_live(h));
    }
    ASSERT_NEAR(static_cast<double>(passes) / trials, 0.5, 0.02);
}

TEST(verdict, timing_disabled_pairs_in_arrival_order) {
    auto spec = spec_for(SchemeId::III, AdversaryKind::record_replay, 40);
    spec.adversary.replay_delay = 0.25;
    auto timed = run_session(spec, 9, 0);
    ASSERT_EQ(timed.verdict.count(FailureKind::mistimed), 80);
    spec.verifier.check_timing = false;
    auto untimed = run_session(spec, 9, 0);
    ASSERT_TRUE(untimed.verdict.accept);
    for (const auto &f : timed.verdict.failures) {
        ASSERT_EQ(*f.lateness, 0.25);
    }
}

TEST(verdict, honest_calibration) {
    for (auto s : {SchemeId::III, SchemeId::IV}) {
        auto est = estimate_spoof_rate(spec_for(s, AdversaryKind::none, 1000), 1000, 10);
        ASSERT_LE(1 - est.p_hat, 2 * 0.001) << scheme_name(s);
    }
}

TEST(verdict, guess_measure_is_rejected) {
    for (auto s : {SchemeId::III, SchemeId::IV}) {
        auto est = estimate_spoof_rate(spec_for(s, AdversaryKind::guess_measure, 1000), 100, 11);
        ASSERT_LE(est.p_hat, 0.01) << scheme_name(s);
    }
}

TEST(verdict, store_and_wait_needs_many_rounds_to_hide) {
    auto est = estimate_spoof_rate(spec_for(SchemeId::I, AdversaryKind::store_and_wait, 20), 2000, 12);
    ASSERT_EQ(est.accepts, 0);
    ASSERT_LE(est.ci.hi, 0.002);
    // Every rejection is a timing failure at A1, never a projective failure.
    ASSERT_EQ(est.failure_totals.count(FailureKind::projective_fail), 0u);
    ASSERT_EQ(est.failure_totals.count(FailureKind::missing), 0u);
}

TEST(verdict, derive_seed_separates_streams) {
    ASSERT_NE(derive_seed(1, "plan", 0), derive_seed(1, "physics", 0));
    ASSERT_NE(derive_seed(1, "plan", 0), derive_seed(1, "plan", 1));
    ASSERT_NE(derive_seed(1, "plan", 0), derive_seed(2, "plan", 0));
    ASSERT_EQ(derive_seed(1, "plan", 0), derive_seed(1, "plan", 0));
}
