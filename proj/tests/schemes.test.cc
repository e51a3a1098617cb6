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

#include "qtag/schemes.h"

#include "gtest/gtest.h"

#include "oracle.test.h"
#include "qtag/session.h"

using namespace qtag;

namespace {

SchemeConfig config(SchemeId s, int rounds, Geometry g = {}) {
    SchemeConfig c;
    c.scheme = s;
    c.rounds = rounds;
    c.geometry = g;
    return c;
}

std::string validation_error(const SchemeConfig &c) {
    try {
        c.validate();
    } catch (const std::invalid_argument &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(schemes, parse_names) {
    ASSERT_EQ(parse_scheme("IV"), SchemeId::IV);
    ASSERT_EQ(parse_scheme("6"), SchemeId::VI);
    ASSERT_FALSE(parse_scheme("VII").has_value());
    for (auto s : kAllSchemes) {
        ASSERT_EQ(parse_scheme(scheme_name(s)), s);
    }
}

TEST(schemes, validation_messages) {
    ASSERT_EQ(validation_error(config(SchemeId::I, 1, {5, 5, 10})), "a0 < t required");
    ASSERT_EQ(validation_error(config(SchemeId::I, 1, {0, 10, 10})), "t < a1 required");
    auto c = config(SchemeId::I, 1);
    c.round_period = 20;  // exactly 2 * span
    ASSERT_NE(validation_error(c), "");
    c.round_period = 20.5;
    ASSERT_EQ(validation_error(c), "");
    auto ii = config(SchemeId::II, 1);
    ii.route_table = {{0, 1}};
    ASSERT_EQ(validation_error(ii), "route table must have m rows");
    ii.route_table = {{0, 2}, {1, 0}};
    ASSERT_EQ(validation_error(ii), "route table entries must be 0 or 1");
}

TEST(schemes, default_route_table_is_xor) {
    auto t = default_route_table(2, 2);
    ASSERT_EQ(t, (std::vector<std::vector<int>>{{0, 1}, {1, 0}}));
    auto c = config(SchemeId::II, 1);
    for (int a = 1; a <= 2; a++)
        for (int b = 1; b <= 2; b++) ASSERT_EQ(c.route(a, b), (a + b) % 2);
}

TEST(schemes, scheme_v_states_and_bases_match_reference) {
    const double c = std::cos(M_PI / 6), s = std::sin(M_PI / 6);
    using oracle::C;
    std::vector<oracle::Vec2> ref = {{1, 0}, {0, 1}, {c, s}, {s, -c}, {c, C(0, s)}, {s, C(0, -c)}};
    auto states = scheme_states(SchemeId::V);
    auto bases = scheme_bases(SchemeId::V);
    ASSERT_EQ(states.size(), 6u);
    for (int k = 0; k < 6; k++) {
        ASSERT_NEAR(oracle::overlap({states[k][0], states[k][1]}, ref[k]), 1, 1e-12);
        // State 2j / 2j+1 are the outcome-0 / outcome-1 eigenstates of basis j.
        auto e = bases[k / 2].state(k % 2);
        ASSERT_NEAR(oracle::overlap({e[0], e[1]}, ref[k]), 1, 1e-12);
    }
    // Cross-basis probabilities are the 3/4 vs 1/4 pattern.
    ASSERT_NEAR(outcome_probability(states[2], 0, bases[0], 0), 0.75, 1e-12);
    ASSERT_NEAR(outcome_probability(states[4], 0, bases[1], 0), oracle::overlap(ref[2], ref[4]), 1e-12);
}

TEST(schemes, scheme_iii_states_are_pauli_eigenstates) {
    auto states = scheme_states(SchemeId::III);
    auto bases = scheme_bases(SchemeId::III);
    for (int k = 0; k < 6; k++) {
        ASSERT_NEAR(outcome_probability(states[k], 0, bases[k / 2], k % 2), 1, 1e-12);
    }
}

TEST(schemes, plan_timing_is_simultaneous_at_tag) {
    Geometry g{-1.5, 0.5, 7};
    for (auto s : kAllSchemes) {
        auto c = config(s, 5, g);
        Rng rng(3);
        auto plan = plan_rounds(c, rng);
        ASSERT_EQ(plan.rounds.size(), 5u);
        double tau = 4 * (7 + 1.5);
        for (const auto &r : plan.rounds) {
            double tstar = std::max(0.5 + 1.5, 7 - 0.5) + r.round * tau;
            ASSERT_EQ(r.nominal_arrival, tstar);
            for (const auto &e : r.from_a0) ASSERT_EQ(e.time + (0.5 + 1.5), tstar);
            for (const auto &e : r.from_a1) ASSERT_EQ(e.time + (7 - 0.5), tstar);
        }
        for (const auto &ex : plan.expected) {
            for (const auto &item : ex.items) {
                double d = item.station == 0 ? 2.0 : 6.5;
                ASSERT_EQ(item.time, plan.rounds[ex.round].nominal_arrival + d);
            }
        }
    }
}

TEST(schemes, plan_is_deterministic) {
    for (auto s : kAllSchemes) {
        Rng a(99), b(99);
        auto pa = plan_rounds(config(s, 20), a);
        auto pb = plan_rounds(config(s, 20), b);
        for (int i = 0; i < 20; i++) {
            ASSERT_NEAR(fidelity(pa.rounds[i].state, pb.rounds[i].state), 1, 1e-15);
            ASSERT_EQ(pa.rounds[i].right_route, pb.rounds[i].right_route);
            ASSERT_EQ(pa.rounds[i].branch, pb.rounds[i].branch);
        }
    }
}

TEST(schemes, honest_sessions_deliver_on_the_light_cone) {
    Geometry g{0, 3, 8};
    for (auto s : kAllSchemes) {
        SessionSpec spec;
        spec.scheme = config(s, 30, g);
        spec.invariant_checks = true;
        auto r = run_session(spec, 5, 0);
        ASSERT_TRUE(r.verdict.accept) << scheme_name(s);
        ASSERT_TRUE(r.verdict.failures.empty());
        for (const auto &d : r.transcript.deliveries) {
            if (d.agent != r.stations.a0 && d.agent != r.stations.a1) continue;
            if (d.origin != r.tag) continue;
            int station = d.agent == r.stations.a0 ? 0 : 1;
            double tstar = 5 + d.round * 32.0;
            ASSERT_EQ(d.time, tstar + (station == 0 ? 3.0 : 5.0));
        }
    }
}

TEST(schemes, powered_tag_absorbs_the_qubit) {
    SessionSpec spec;
    spec.scheme = config(SchemeId::III, 10);
    auto r = run_session(spec, 6, 0);
    int reports = 0;
    for (const auto &d : r.transcript.deliveries) {
        if (d.agent != r.stations.a0 && d.agent != r.stations.a1) continue;
        ASSERT_NE(d.kind, PayloadKind::qubit);
        reports += d.kind == PayloadKind::outcome_report;
    }
    ASSERT_EQ(reports, 20);
}

TEST(schemes, unpaired_input_is_reported_and_discarded) {
    auto cfg = config(SchemeId::I, 1);
    Scheduler sched(Rng(1));
    AgentId a0 = sched.add_agent("A0", 0, std::make_unique<StationAgent>(0, std::vector<std::pair<int, PlannedEmission>>{
                                                                                {0, {0, Direction::right, PureRegister()}}}));
    AgentId tag = sched.add_agent("T", 5, std::make_unique<TagAgent>(cfg, true));
    sched.add_agent("A1", 10, std::make_unique<StationAgent>(1, std::vector<std::pair<int, PlannedEmission>>{}));
    dynamic_cast<StationAgent &>(sched.agent(a0)).schedule(sched, a0);
    const auto &t = sched.run();
    bool logged = false;
    for (const auto &n : t.notes) {
        logged = logged || (n.kind == "malformed_round" && n.agent == tag);
    }
    ASSERT_TRUE(logged);
    ASSERT_EQ(sched.store().live_count(), 0u);
}
