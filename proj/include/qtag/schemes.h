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

// Tagging schemes I-VI: what the two stations send each round, what an honest
// tag does with it, and what the stations should see in return.

#ifndef QTAG_SCHEMES_H
#define QTAG_SCHEMES_H

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qtag/worldline.h"

namespace qtag {

enum class SchemeId : int { I = 1, II, III, IV, V, VI };

const char *scheme_name(SchemeId s);
std::optional<SchemeId> parse_scheme(std::string_view text);
inline constexpr SchemeId kAllSchemes[] = {SchemeId::I, SchemeId::II, SchemeId::III,
                                           SchemeId::IV, SchemeId::V, SchemeId::VI};

/// Schemes whose honest output is a classical outcome broadcast (at least on some rounds).
bool broadcasts_outcomes(SchemeId s);

struct Geometry {
    double a0 = 0;
    double t_plus = 5;
    double a1 = 10;

    double to_station(int station) const { return station == 0 ? t_plus - a0 : a1 - t_plus; }
    double span() const { return a1 - a0; }
};

struct SchemeConfig {
    SchemeId scheme = SchemeId::I;
    Geometry geometry;
    int rounds = 1;
    /// Spacing between consecutive nominal arrival times at the tag; 0 picks 4 * (a1 - a0).
    double round_period = 0;
    /// Session window; 0 means rounds * period.
    double session_window = 0;
    /// Scheme II: a in [1, m], b in [1, n], route table f[a-1][b-1] in {0, 1}.
    int m = 2;
    int n = 2;
    std::vector<std::vector<int>> route_table;
    double timing_tolerance = 1e-9;

    double period() const;
    double window() const;
    /// Nominal simultaneous arrival time at the tag for 0-based round i.
    double nominal_arrival(int round) const;
    /// Routing destination (0 or 1) for Scheme II; Scheme I routes by b alone.
    int route(int a, int b) const;
    /// Number of distinct left-hand routing values (1 for Scheme I, m for Scheme II).
    int left_choices() const { return scheme == SchemeId::II ? m : 1; }
    int right_choices() const { return scheme == SchemeId::II ? n : 2; }

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

/// XOR of parities on 1-based (a, b).
std::vector<std::vector<int>> default_route_table(int m, int n);

/// The six states Alice draws from in Scheme III (index 0..5: |0>,|1>,|+>,|->,|i>,|-i>)
/// or Scheme V (the three antipodal pairs of B'0, B'1, B'2).
std::vector<PureRegister> scheme_states(SchemeId s);
/// The three bases coded by a trit in Scheme III (B0, B1, B2) or Scheme V (B'0, B'1, B'2).
std::vector<MeasBasis> scheme_bases(SchemeId s);

using EmissionPayload = std::variant<ClassicalPayload, PureRegister>;

struct PlannedEmission {
    double time = 0;
    Direction direction = Direction::right;
    EmissionPayload payload;
};

struct RoundPlan {
    int round = 0;
    double nominal_arrival = 0;
    std::vector<PlannedEmission> from_a0;
    std::vector<PlannedEmission> from_a1;

    // What Alice knows about the round.
    PureRegister state;
    int state_index = -1;
    std::optional<MeasBasis> basis;
    int basis_index = -1;
    int left_route = 0;   // Scheme II a
    int right_route = 0;  // Scheme I bit, Scheme II b
    int branch = 0;       // Scheme VI
    int direction = 0;    // Scheme VI
};

enum class ExpectKind { qubit, outcome };

struct StationExpectation {
    int station = 0;
    double time = 0;
    ExpectKind kind = ExpectKind::qubit;
};

struct ExpectedRecord {
    int round = 0;
    std::vector<StationExpectation> items;
    /// Projective-test target for qubit expectations.
    std::optional<PureRegister> target;
    /// Born probability of outcome 0 for outcome expectations.
    std::optional<double> p0;
};

struct SessionPlan {
    SchemeConfig config;
    std::vector<RoundPlan> rounds;
    std::vector<ExpectedRecord> expected;
};

/// Draws every round's secrets and builds the emission schedule and the
/// expectations. Draw order per round is fixed so seeds reproduce exactly.
SessionPlan plan_rounds(const SchemeConfig &cfg, Rng &rng);

/// Station agent: sends its planned emissions and keeps every qubit that reaches it.
class StationAgent : public Agent {
   public:
    StationAgent(int station, std::vector<std::pair<int, PlannedEmission>> emissions)
        : station_(station), emissions_(std::move(emissions)) {}

    /// Registers one wakeup per planned emission.
    void schedule(Scheduler &sched, AgentId self) const;
    void on_signal(AgentContext &ctx, const Signal &signal) override;
    void on_wakeup(AgentContext &ctx, std::uint64_t token) override;

   private:
    int station_;
    std::vector<std::pair<int, PlannedEmission>> emissions_;  // (round, emission)
};

/// The honest tag. Powered on it pairs each round's simultaneous inputs and
/// acts on them at once; switched off it lets every signal through untouched.
class TagAgent : public Agent {
   public:
    TagAgent(SchemeConfig cfg, bool powered) : cfg_(std::move(cfg)), powered_(powered) {}

    void on_signal(AgentContext &ctx, const Signal &signal) override;
    void on_wakeup(AgentContext &ctx, std::uint64_t token) override;

    bool powered() const { return powered_; }

   private:
    struct Group {
        std::uint64_t serial = 0;
        double opened = 0;
        int round = -1;
        std::optional<QubitHandle> qubit;
        std::optional<ClassicalPayload> from_left;
        std::optional<ClassicalPayload> from_right;
        bool done = false;
    };

    bool is_input(const Signal &s) const;
    bool complete(const Group &g) const;
    void act(AgentContext &ctx, Group &g);
    void broadcast_measurement(AgentContext &ctx, QubitHandle q, const MeasBasis &basis, int round);

    SchemeConfig cfg_;
    bool powered_;
    std::optional<Group> group_;
    std::uint64_t next_serial_ = 1;
};

}  // namespace qtag

#endif
