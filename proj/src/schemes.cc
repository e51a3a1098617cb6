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

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qtag {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

int uniform_int(Rng &rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

double born_p0(const PureRegister &state, const MeasBasis &basis) {
    return outcome_probability(state, 0, basis, 0);
}

}  // namespace

const char *scheme_name(SchemeId s) {
    switch (s) {
        case SchemeId::I:
            return "I";
        case SchemeId::II:
            return "II";
        case SchemeId::III:
            return "III";
        case SchemeId::IV:
            return "IV";
        case SchemeId::V:
            return "V";
        case SchemeId::VI:
            return "VI";
    }
    return "?";
}

std::optional<SchemeId> parse_scheme(std::string_view text) {
    for (auto s : kAllSchemes) {
        if (text == scheme_name(s)) {
            return s;
        }
    }
    if (text.size() == 1 && text[0] >= '1' && text[0] <= '6') {
        return static_cast<SchemeId>(text[0] - '0');
    }
    return std::nullopt;
}

bool broadcasts_outcomes(SchemeId s) { return s != SchemeId::I && s != SchemeId::II; }

double SchemeConfig::period() const { return round_period > 0 ? round_period : 4 * geometry.span(); }

double SchemeConfig::window() const { return session_window > 0 ? session_window : rounds * period(); }

double SchemeConfig::nominal_arrival(int round) const {
    return std::max(geometry.to_station(0), geometry.to_station(1)) + round * period();
}

int SchemeConfig::route(int a, int b) const {
    if (scheme == SchemeId::I) {
        return b;
    }
    const auto &table = route_table.empty() ? default_route_table(m, n) : route_table;
    return table.at(static_cast<std::size_t>(a - 1)).at(static_cast<std::size_t>(b - 1));
}

void SchemeConfig::validate() const {
    const auto &g = geometry;
    if (!std::isfinite(g.a0) || !std::isfinite(g.t_plus) || !std::isfinite(g.a1)) {
        throw std::invalid_argument("geometry positions must be finite");
    }
    if (!(g.a0 < g.t_plus)) {
        throw std::invalid_argument("a0 < t required");
    }
    if (!(g.t_plus < g.a1)) {
        throw std::invalid_argument("t < a1 required");
    }
    if (rounds < 1) {
        throw std::invalid_argument("rounds must be at least 1");
    }
    if (round_period < 0 || session_window < 0) {
        throw std::invalid_argument("round period and session window must be nonnegative");
    }
    // Outputs of round i must reach both stations before round i+1 inputs leave them.
    if (!(period() > 2 * g.span())) {
        throw std::invalid_argument("round period must exceed 2 * (a1 - a0)");
    }
    if (rounds * period() > window() * (1 + 1e-12)) {
        throw std::invalid_argument("rounds * period must fit in the session window");
    }
    if (!(timing_tolerance > 0)) {
        throw std::invalid_argument("timing tolerance must be positive");
    }
    if (scheme == SchemeId::II) {
        if (m < 1 || n < 1) {
            throw std::invalid_argument("Scheme II needs m >= 1 and n >= 1");
        }
        if (!route_table.empty()) {
            if (route_table.size() != static_cast<std::size_t>(m)) {
                throw std::invalid_argument("route table must have m rows");
            }
            for (const auto &row : route_table) {
                if (row.size() != static_cast<std::size_t>(n)) {
                    throw std::invalid_argument("route table rows must have n entries");
                }
                for (int v : row) {
                    if (v != 0 && v != 1) {
                        throw std::invalid_argument("route table entries must be 0 or 1");
                    }
                }
            }
        }
    }
}

std::vector<std::vector<int>> default_route_table(int m, int n) {
    std::vector<std::vector<int>> table(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(n)));
    for (int a = 1; a <= m; a++) {
        for (int b = 1; b <= n; b++) {
            table[a - 1][b - 1] = (a % 2) ^ (b % 2);
        }
    }
    return table;
}

std::vector<PureRegister> scheme_states(SchemeId s) {
    using C = Amplitude;
    if (s == SchemeId::III) {
        const double h = kInvSqrt2;
        return {
            PureRegister::from_amplitudes({1.0, 0.0}),       PureRegister::from_amplitudes({0.0, 1.0}),
            PureRegister::from_amplitudes({h, h}),           PureRegister::from_amplitudes({h, -h}),
            PureRegister::from_amplitudes({h, C(0.0, h)}),   PureRegister::from_amplitudes({h, C(0.0, -h)}),
        };
    }
    if (s == SchemeId::V) {
        const double c = std::cos(std::numbers::pi / 6);
        const double sn = std::sin(std::numbers::pi / 6);
        return {
            PureRegister::from_amplitudes({1.0, 0.0}),        PureRegister::from_amplitudes({0.0, 1.0}),
            PureRegister::from_amplitudes({c, sn}),           PureRegister::from_amplitudes({sn, -c}),
            PureRegister::from_amplitudes({c, C(0.0, sn)}),   PureRegister::from_amplitudes({sn, C(0.0, -c)}),
        };
    }
    throw std::invalid_argument("scheme_states: only Schemes III and V use a finite state list");
}

std::vector<MeasBasis> scheme_bases(SchemeId s) {
    if (s == SchemeId::III) {
        return {MeasBasis::pauli(0), MeasBasis::pauli(1), MeasBasis::pauli(2)};
    }
    if (s == SchemeId::V) {
        // Outcome 0 of B'_k is the first listed state of pair k.
        auto states = scheme_states(s);
        std::vector<MeasBasis> bases;
        for (std::size_t k = 0; k < 3; k++) {
            BlochVector axis = states[2 * k].bloch();
            double r = axis.norm();
            bases.push_back(MeasBasis::from_axis({axis.x / r, axis.y / r, axis.z / r}));
        }
        return bases;
    }
    throw std::invalid_argument("scheme_bases: only Schemes III and V use a finite basis list");
}

SessionPlan plan_rounds(const SchemeConfig &cfg, Rng &rng) {
    cfg.validate();
    SessionPlan plan;
    plan.config = cfg;
    const auto &g = cfg.geometry;
    const double d0 = g.to_station(0);
    const double d1 = g.to_station(1);

    std::vector<PureRegister> states;
    std::vector<MeasBasis> bases;
    if (cfg.scheme == SchemeId::III || cfg.scheme == SchemeId::V) {
        states = scheme_states(cfg.scheme);
        bases = scheme_bases(cfg.scheme);
    }

    for (int i = 0; i < cfg.rounds; i++) {
        RoundPlan r;
        r.round = i;
        r.nominal_arrival = cfg.nominal_arrival(i);
        const double t0 = r.nominal_arrival - d0;
        const double t1 = r.nominal_arrival - d1;
        ExpectedRecord ex;
        ex.round = i;

        auto expect_qubit_at = [&](int station) {
            ex.items.push_back({station, r.nominal_arrival + g.to_station(station), ExpectKind::qubit});
            ex.target = r.state;
        };
        auto expect_broadcast = [&]() {
            ex.items.push_back({0, r.nominal_arrival + d0, ExpectKind::outcome});
            ex.items.push_back({1, r.nominal_arrival + d1, ExpectKind::outcome});
            ex.p0 = born_p0(r.state, *r.basis);
        };

        switch (cfg.scheme) {
            case SchemeId::I: {
                r.state = sample_uniform_bloch(rng);
                r.right_route = uniform_int(rng, 0, 1);
                r.from_a0.push_back({t0, Direction::right, r.state});
                r.from_a1.push_back({t1, Direction::left, ClassicalPayload{RouteBit{r.right_route}}});
                expect_qubit_at(r.right_route);
                break;
            }
            case SchemeId::II: {
                r.state = sample_uniform_bloch(rng);
                r.left_route = uniform_int(rng, 1, cfg.m);
                r.right_route = uniform_int(rng, 1, cfg.n);
                r.from_a0.push_back({t0, Direction::right, ClassicalPayload{RouteIndex{r.left_route}}});
                r.from_a0.push_back({t0, Direction::right, r.state});
                r.from_a1.push_back({t1, Direction::left, ClassicalPayload{RouteIndex{r.right_route}}});
                expect_qubit_at(cfg.route(r.left_route, r.right_route));
                break;
            }
            case SchemeId::III:
            case SchemeId::V: {
                r.state_index = uniform_int(rng, 0, 5);
                r.state = states[static_cast<std::size_t>(r.state_index)];
                r.basis_index = uniform_int(rng, 0, 2);
                r.basis = bases[static_cast<std::size_t>(r.basis_index)];
                r.from_a0.push_back({t0, Direction::right, r.state});
                r.from_a1.push_back({t1, Direction::left, ClassicalPayload{BasisTrit{r.basis_index}}});
                expect_broadcast();
                break;
            }
            case SchemeId::IV: {
                r.state = sample_uniform_bloch(rng);
                r.basis = MeasBasis::from_axis(sample_hemisphere_axis(rng));
                r.from_a0.push_back({t0, Direction::right, r.state});
                r.from_a1.push_back({t1, Direction::left, ClassicalPayload{BasisAxis{r.basis->axis()}}});
                expect_broadcast();
                break;
            }
            case SchemeId::VI: {
                r.state = sample_uniform_bloch(rng);
                r.basis = MeasBasis::from_axis(sample_hemisphere_axis(rng));
                r.branch = uniform_int(rng, 0, 1);
                r.direction = uniform_int(rng, 0, 1);
                r.from_a0.push_back({t0, Direction::right, r.state});
                r.from_a1.push_back(
                    {t1, Direction::left, ClassicalPayload{BranchInstruction{r.basis->axis(), r.branch, r.direction}}});
                if (r.branch == 0) {
                    expect_broadcast();
                } else {
                    expect_qubit_at(r.direction);
                }
                break;
            }
        }
        plan.rounds.push_back(std::move(r));
        plan.expected.push_back(std::move(ex));
    }
    return plan;
}

// ---------------------------------------------------------------------------

void StationAgent::schedule(Scheduler &sched, AgentId self) const {
    for (std::size_t k = 0; k < emissions_.size(); k++) {
        sched.wake_at(self, emissions_[k].second.time, k);
    }
}

void StationAgent::on_signal(AgentContext &ctx, const Signal &signal) {
    if (signal.is_quantum()) {
        ctx.deposit(signal.qubit());
    }
}

void StationAgent::on_wakeup(AgentContext &ctx, std::uint64_t token) {
    const auto &[round, e] = emissions_.at(token);
    if (const auto *c = std::get_if<ClassicalPayload>(&e.payload)) {
        ctx.emit(e.direction, *c, round);
    } else {
        QubitHandle h = ctx.create_qubit(std::get<PureRegister>(e.payload));
        ctx.emit_qubit(e.direction, h, round);
    }
}

// ---------------------------------------------------------------------------

bool TagAgent::is_input(const Signal &s) const {
    if (s.is_quantum()) {
        return s.direction == Direction::right;
    }
    PayloadKind k = s.kind();
    if (s.direction == Direction::right) {
        return cfg_.scheme == SchemeId::II && k == PayloadKind::route_index;
    }
    switch (cfg_.scheme) {
        case SchemeId::I:
            return k == PayloadKind::route_bit;
        case SchemeId::II:
            return k == PayloadKind::route_index;
        case SchemeId::III:
        case SchemeId::V:
            return k == PayloadKind::basis_trit;
        case SchemeId::IV:
            return k == PayloadKind::basis_axis;
        case SchemeId::VI:
            return k == PayloadKind::branch_instruction;
    }
    return false;
}

bool TagAgent::complete(const Group &g) const {
    bool needs_left = cfg_.scheme == SchemeId::II;
    return g.qubit && g.from_right && (!needs_left || g.from_left);
}

void TagAgent::on_signal(AgentContext &ctx, const Signal &signal) {
    if (!powered_ || !is_input(signal)) {
        return;
    }
    const double eps = cfg_.timing_tolerance;
    if (group_ && ctx.now() > group_->opened + eps) {
        group_.reset();
    }
    if (!group_) {
        group_ = Group{next_serial_++, ctx.now(), signal.round, {}, {}, {}, false};
        ctx.wake_at(ctx.now() + eps, group_->serial);
    }
    Group &g = *group_;
    if (g.done) {
        ctx.log("excess_input", std::string(kind_name(signal.kind())) + " after the round was complete", signal.round);
        return;
    }
    bool filled = false;
    if (signal.is_quantum()) {
        if (!g.qubit) {
            ctx.deposit(signal.qubit());
            g.qubit = signal.qubit();
            filled = true;
        }
    } else if (signal.direction == Direction::right) {
        if (!g.from_left) {
            g.from_left = signal.classical();
            filled = true;
        }
    } else if (!g.from_right) {
        g.from_right = signal.classical();
        filled = true;
    }
    if (!filled) {
        ctx.log("excess_input", std::string("duplicate ") + kind_name(signal.kind()), signal.round);
        return;
    }
    if (signal.is_quantum()) {
        g.round = signal.round;
    }
    if (complete(g)) {
        act(ctx, g);
        g.done = true;
    }
}

void TagAgent::on_wakeup(AgentContext &ctx, std::uint64_t token) {
    if (!group_ || group_->serial != token || group_->done) {
        return;
    }
    ctx.log("malformed_round", "partner input missing within the simultaneity tolerance", group_->round);
    if (group_->qubit) {
        ctx.discard(*group_->qubit);
    }
    group_.reset();
}

void TagAgent::broadcast_measurement(AgentContext &ctx, QubitHandle q, const MeasBasis &basis, int round) {
    int bit = ctx.measure(q, basis);
    ctx.emit(Direction::left, OutcomeReport{bit}, round);
    ctx.emit(Direction::right, OutcomeReport{bit}, round);
}

void TagAgent::act(AgentContext &ctx, Group &g) {
    QubitHandle q = *g.qubit;
    const ClassicalPayload &right = *g.from_right;
    auto send_toward = [&](int station) {
        ctx.emit_qubit(station == 0 ? Direction::left : Direction::right, q, g.round);
    };
    switch (cfg_.scheme) {
        case SchemeId::I:
            send_toward(std::get<RouteBit>(right).bit);
            break;
        case SchemeId::II:
            send_toward(cfg_.route(std::get<RouteIndex>(*g.from_left).value, std::get<RouteIndex>(right).value));
            break;
        case SchemeId::III:
        case SchemeId::V: {
            auto bases = scheme_bases(cfg_.scheme);
            broadcast_measurement(ctx, q, bases.at(static_cast<std::size_t>(std::get<BasisTrit>(right).trit)), g.round);
            break;
        }
        case SchemeId::IV:
            broadcast_measurement(ctx, q, MeasBasis::from_axis(std::get<BasisAxis>(right).axis), g.round);
            break;
        case SchemeId::VI: {
            const auto &instr = std::get<BranchInstruction>(right);
            if (instr.branch == 0) {
                broadcast_measurement(ctx, q, MeasBasis::from_axis(instr.axis), g.round);
            } else {
                send_toward(instr.direction);
            }
            break;
        }
    }
}

}  // namespace qtag
