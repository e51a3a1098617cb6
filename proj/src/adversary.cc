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

#include "qtag/adversary.h"

#include <cmath>
#include <map>
#include <stdexcept>

namespace qtag {

namespace {

bool is_station_instruction(const Signal &s) {
    if (s.is_quantum() || s.direction != Direction::left) {
        return false;
    }
    switch (s.kind()) {
        case PayloadKind::route_bit:
        case PayloadKind::route_index:
        case PayloadKind::basis_trit:
        case PayloadKind::basis_axis:
        case PayloadKind::branch_instruction:
            return true;
        default:
            return false;
    }
}

/// Right-hand routing value carried by an A1 instruction (Schemes I and II).
int right_route_of(const ClassicalPayload &p) {
    if (const auto *b = std::get_if<RouteBit>(&p)) {
        return b->bit;
    }
    return std::get<RouteIndex>(p).value;
}

struct SiteCommon {
    int side = 0;  // 0: E0, 1: E1
    SchemeConfig scheme;
    AdversaryConfig cfg;
    AgentId tag = kNoAgent;
    double lo = 0;
    double hi = 0;
    std::shared_ptr<AdversaryStats> stats;

    Direction outward() const { return side == 0 ? Direction::left : Direction::right; }
    Direction inward() const { return side == 0 ? Direction::right : Direction::left; }
    void send_internal(AgentContext &ctx, ClassicalPayload p, int round) const {
        ctx.emit_confined(inward(), std::move(p), round, lo, hi);
    }
};

class PassiveSite : public Agent {
   public:
    void on_signal(AgentContext &, const Signal &) override {}
};

// Jams everything the tag sends outward and re-sends classical outputs later
// from the site. Quantum outputs cannot be copied, so they are absorbed.
class RecordReplaySite : public Agent {
   public:
    explicit RecordReplaySite(SiteCommon c) : c_(std::move(c)) {}

    void on_signal(AgentContext &ctx, const Signal &s) override {
        if (s.origin != c_.tag || s.direction != c_.outward()) {
            return;
        }
        if (s.is_quantum()) {
            ctx.discard(s.qubit());
            c_.stats->destroyed_qubits++;
            return;
        }
        ctx.jam();
        ctx.emit_at(ctx.now() + c_.cfg.replay_delay, c_.outward(), s.classical(), s.round);
        c_.stats->replayed_signals++;
    }

   private:
    SiteCommon c_;
};

// E0 holds the qubit until the A1 routing instruction reaches it, then sends
// it where the instruction says. Only correct in time when the route is A0.
class StoreAndWaitSite : public Agent {
   public:
    explicit StoreAndWaitSite(SiteCommon c) : c_(std::move(c)) {}

    void on_signal(AgentContext &ctx, const Signal &s) override {
        if (s.direction == Direction::right && s.origin != c_.tag) {
            if (s.is_quantum()) {
                ctx.deposit(s.qubit());
                pending_[s.round].qubit = s.qubit();
            } else if (s.kind() == PayloadKind::route_index) {
                pending_[s.round].a = std::get<RouteIndex>(s.classical()).value;
            }
        } else if (is_station_instruction(s)) {
            pending_[s.round].b = right_route_of(s.classical());
        } else {
            return;
        }
        try_release(ctx, s.round);
    }

   private:
    struct Pending {
        std::optional<QubitHandle> qubit;
        std::optional<int> a;
        std::optional<int> b;
    };

    void try_release(AgentContext &ctx, int round) {
        auto it = pending_.find(round);
        Pending &p = it->second;
        bool needs_a = c_.scheme.scheme == SchemeId::II;
        if (!p.qubit || !p.b || (needs_a && !p.a)) {
            return;
        }
        int dest = c_.scheme.route(p.a.value_or(1), *p.b);
        ctx.emit_qubit(dest == 0 ? Direction::left : Direction::right, *p.qubit, round);
        pending_.erase(it);
    }

    SiteCommon c_;
    std::map<int, Pending> pending_;
};

// E0 measures each qubit on arrival in a basis of its own choosing and reports
// the result: rightward at once, leftward when the A1 instruction passes E0.
class GuessMeasureSite : public Agent {
   public:
    GuessMeasureSite(SiteCommon c, Rng rng) : c_(std::move(c)), rng_(std::move(rng)) {}

    void on_signal(AgentContext &ctx, const Signal &s) override {
        if (s.is_quantum() && s.direction == Direction::right && s.origin != c_.tag) {
            ctx.deposit(s.qubit());
            MeasBasis basis = guess_basis();
            int bit = ctx.measure(s.qubit(), basis);
            guesses_.emplace(s.round, Guess{bit, basis});
            ctx.emit(Direction::right, OutcomeReport{bit}, s.round);
            return;
        }
        if (!is_station_instruction(s)) {
            return;
        }
        auto it = guesses_.find(s.round);
        if (it == guesses_.end()) {
            return;
        }
        const Guess &g = it->second;
        const auto *branch = std::get_if<BranchInstruction>(&s.classical());
        if (branch && branch->branch == 1) {
            // Re-prepare the post-measurement state and send it where asked.
            QubitHandle q = ctx.create_qubit(g.basis.state_register(g.bit));
            ctx.emit_qubit(branch->direction == 0 ? Direction::left : Direction::right, q, s.round);
        } else {
            ctx.emit(Direction::left, OutcomeReport{g.bit}, s.round);
        }
        guesses_.erase(it);
    }

   private:
    struct Guess {
        int bit;
        MeasBasis basis;
    };

    MeasBasis guess_basis() {
        SchemeId id = c_.scheme.scheme;
        if (id == SchemeId::III || id == SchemeId::V) {
            auto bases = scheme_bases(id);
            return bases[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, 2)(rng_))];
        }
        return MeasBasis::from_axis(sample_hemisphere_axis(rng_));
    }

    SiteCommon c_;
    Rng rng_;
    std::map<int, Guess> guesses_;
};

// Teleportation attack on the routing schemes. Each round uses a batch of
// singlets labelled (round, j), one per possible left routing value j. E0
// teleports the qubit into half (round, a) and ships the Bell outcome to E1.
// E1 learns b first: halves whose route f(j, b) is 0 go straight back toward
// E0, the rest wait at E1 for the Bell outcome. Whichever site ends up holding
// half (round, a) with the Bell outcome corrects it and forwards it outward.
class TeleportRoutingSite : public Agent {
   public:
    TeleportRoutingSite(SiteCommon c, std::map<int, std::vector<QubitHandle>> halves)
        : c_(std::move(c)), halves_(std::move(halves)) {}

    void on_signal(AgentContext &ctx, const Signal &s) override {
        if (c_.side == 0) {
            on_signal_e0(ctx, s);
        } else {
            on_signal_e1(ctx, s);
        }
    }

   private:
    struct Round {
        std::optional<QubitHandle> input;
        std::optional<int> a;
        std::optional<BellOutcome> bell;
        std::optional<int> b;
        std::optional<int> teleported_label;
    };

    bool needs_left_route() const { return c_.scheme.scheme == SchemeId::II; }

    void on_signal_e0(AgentContext &ctx, const Signal &s) {
        Round &r = rounds_[s.round];
        if (s.direction == Direction::right && s.origin != c_.tag) {
            if (s.is_quantum()) {
                ctx.deposit(s.qubit());
                r.input = s.qubit();
            } else if (s.kind() == PayloadKind::route_index) {
                r.a = std::get<RouteIndex>(s.classical()).value;
            } else {
                return;
            }
            if (!needs_left_route()) {
                r.a = 1;
            }
            if (r.input && r.a && !r.bell) {
                teleport(ctx, s.round, r);
            }
            return;
        }
        if (s.is_quantum() && s.direction == Direction::left) {
            auto label = ctx.label(s.qubit());
            if (!label) {
                return;
            }
            Round &lr = rounds_[label->round];
            if (lr.bell && lr.a && label->slot == *lr.a) {
                ctx.apply_pauli(s.qubit(), correction_for(*lr.bell));
                ctx.emit_qubit(Direction::left, s.qubit(), label->round);
            } else {
                ctx.discard(s.qubit());
            }
        }
    }

    void teleport(AgentContext &ctx, int round, Round &r) {
        auto &batch = halves_.at(round);
        int a = *r.a;
        QubitHandle half = batch.at(static_cast<std::size_t>(a - 1));
        r.bell = ctx.bell_measure(*r.input, half);
        c_.stats->teleportations++;
        for (int j = 1; j <= static_cast<int>(batch.size()); j++) {
            if (j != a) {
                ctx.discard(batch[static_cast<std::size_t>(j - 1)]);
            }
        }
        halves_.erase(round);
        c_.send_internal(ctx, TeleportData{a, *r.bell}, round);
    }

    void on_signal_e1(AgentContext &ctx, const Signal &s) {
        if (is_station_instruction(s)) {
            Round &r = rounds_[s.round];
            r.b = right_route_of(s.classical());
            auto &batch = halves_.at(s.round);
            for (int j = 1; j <= static_cast<int>(batch.size()); j++) {
                if (c_.scheme.route(j, *r.b) == 0) {
                    ctx.emit_qubit(Direction::left, batch[static_cast<std::size_t>(j - 1)], s.round);
                }
            }
            return;
        }
        if (s.kind() != PayloadKind::teleport_data || s.direction != Direction::right) {
            return;
        }
        const auto &data = std::get<TeleportData>(s.classical());
        Round &r = rounds_[s.round];
        auto &batch = halves_.at(s.round);
        for (int j = 1; j <= static_cast<int>(batch.size()); j++) {
            if (c_.scheme.route(j, *r.b) == 0) {
                continue;  // already sent toward E0
            }
            QubitHandle h = batch[static_cast<std::size_t>(j - 1)];
            if (j == data.label) {
                ctx.apply_pauli(h, correction_for(data.outcome));
                ctx.emit_qubit(Direction::right, h, s.round);
            } else {
                ctx.discard(h);
            }
        }
        halves_.erase(s.round);
        rounds_.erase(s.round);
    }

    SiteCommon c_;
    std::map<int, std::vector<QubitHandle>> halves_;
    std::map<int, Round> rounds_;
};

// Teleportation attack on the measure-and-broadcast schemes. E0 teleports the
// qubit into singlet half i and ships the Bell outcome right; E1 measures its
// half in the commanded basis as soon as the instruction arrives and ships
// the raw outcome left. Each site then combines the two pieces into the bit it
// reports outward. Scheme VI forwarding rounds reuse the routing trick.
class TeleportMeasureSite : public Agent {
   public:
    TeleportMeasureSite(SiteCommon c, std::map<int, QubitHandle> halves)
        : c_(std::move(c)), halves_(std::move(halves)) {}

    void on_signal(AgentContext &ctx, const Signal &s) override {
        if (c_.side == 0) {
            on_signal_e0(ctx, s);
        } else {
            on_signal_e1(ctx, s);
        }
    }

   private:
    struct Round {
        std::optional<BellOutcome> bell;
        std::optional<int> raw;
        std::optional<BlochVector> axis;
        bool forward_right = false;
    };

    void on_signal_e0(AgentContext &ctx, const Signal &s) {
        if (s.is_quantum() && s.direction == Direction::right && s.origin != c_.tag) {
            ctx.deposit(s.qubit());
            Round &r = rounds_[s.round];
            r.bell = ctx.bell_measure(s.qubit(), halves_.at(s.round));
            halves_.erase(s.round);
            c_.stats->teleportations++;
            c_.send_internal(ctx, TeleportData{0, *r.bell}, s.round);
            return;
        }
        if (s.kind() == PayloadKind::remote_measurement && s.direction == Direction::left) {
            const auto &m = std::get<RemoteMeasurement>(s.classical());
            Round &r = rounds_.at(s.round);
            int bit = m.raw ^ static_cast<int>(infer_flip(*r.bell, m.axis).flip);
            ctx.emit(Direction::left, OutcomeReport{bit}, s.round);
            rounds_.erase(s.round);
            return;
        }
        if (s.is_quantum() && s.direction == Direction::left) {
            auto label = ctx.label(s.qubit());
            if (!label) {
                return;
            }
            auto it = rounds_.find(label->round);
            ctx.apply_pauli(s.qubit(), correction_for(*it->second.bell));
            ctx.emit_qubit(Direction::left, s.qubit(), label->round);
            rounds_.erase(it);
        }
    }

    std::optional<BlochVector> commanded_axis(const ClassicalPayload &p) const {
        if (const auto *t = std::get_if<BasisTrit>(&p)) {
            return scheme_bases(c_.scheme.scheme).at(static_cast<std::size_t>(t->trit)).axis();
        }
        if (const auto *a = std::get_if<BasisAxis>(&p)) {
            return a->axis;
        }
        const auto &b = std::get<BranchInstruction>(p);
        if (b.branch == 0) {
            return b.axis;
        }
        return std::nullopt;
    }

    void on_signal_e1(AgentContext &ctx, const Signal &s) {
        if (is_station_instruction(s)) {
            Round &r = rounds_[s.round];
            QubitHandle half = halves_.at(s.round);
            auto axis = commanded_axis(s.classical());
            if (!axis) {
                const auto &b = std::get<BranchInstruction>(s.classical());
                if (b.direction == 0) {
                    ctx.emit_qubit(Direction::left, half, s.round);
                    halves_.erase(s.round);
                    rounds_.erase(s.round);
                } else {
                    r.forward_right = true;
                }
                return;
            }
            r.raw = ctx.measure(half, MeasBasis::from_axis(*axis));
            r.axis = axis;
            halves_.erase(s.round);
            c_.send_internal(ctx, RemoteMeasurement{*r.raw, *axis}, s.round);
            return;
        }
        if (s.kind() != PayloadKind::teleport_data || s.direction != Direction::right) {
            return;
        }
        const auto &data = std::get<TeleportData>(s.classical());
        auto it = rounds_.find(s.round);
        if (it == rounds_.end()) {
            return;
        }
        Round &r = it->second;
        if (r.forward_right) {
            QubitHandle half = halves_.at(s.round);
            ctx.apply_pauli(half, correction_for(data.outcome));
            ctx.emit_qubit(Direction::right, half, s.round);
            halves_.erase(s.round);
        } else if (r.raw) {
            InferenceRule rule = infer_flip(data.outcome, *r.axis);
            c_.stats->inference_rounds++;
            if (!rule.exact) {
                c_.stats->inexact_inferences++;
            }
            ctx.emit(Direction::right, OutcomeReport{*r.raw ^ static_cast<int>(rule.flip)}, s.round);
        }
        rounds_.erase(it);
    }

    SiteCommon c_;
    std::map<int, QubitHandle> halves_;
    std::map<int, Round> rounds_;
};

}  // namespace

const char *adversary_name(AdversaryKind k) {
    switch (k) {
        case AdversaryKind::none:
            return "none";
        case AdversaryKind::tag_off_silent:
            return "tag_off_silent";
        case AdversaryKind::record_replay:
            return "record_replay";
        case AdversaryKind::store_and_wait:
            return "store_and_wait";
        case AdversaryKind::guess_measure:
            return "guess_measure";
        case AdversaryKind::teleport_I_II:
            return "teleport_I_II";
        case AdversaryKind::teleport_III_style:
            return "teleport_III_style";
    }
    return "?";
}

std::optional<AdversaryKind> parse_adversary(std::string_view text) {
    for (auto k : kAllAdversaries) {
        if (text == adversary_name(k)) {
            return k;
        }
    }
    return std::nullopt;
}

double AdversaryConfig::e0_or_default(const Geometry &g) const {
    return std::isnan(e0) ? (g.a0 + g.t_plus) / 2 : e0;
}

double AdversaryConfig::e1_or_default(const Geometry &g) const {
    return std::isnan(e1) ? (g.t_plus + g.a1) / 2 : e1;
}

int AdversaryConfig::required_singlets(const SchemeConfig &scheme) const {
    switch (kind) {
        case AdversaryKind::teleport_I_II:
            return scheme.left_choices();
        case AdversaryKind::teleport_III_style:
            return 1;
        default:
            return 0;
    }
}

void AdversaryConfig::validate(const SchemeConfig &scheme) const {
    const auto &g = scheme.geometry;
    double p0 = e0_or_default(g);
    double p1 = e1_or_default(g);
    if (!(g.a0 < p0)) throw std::invalid_argument("a0 < e0 required");
    if (!(p0 < g.t_plus)) throw std::invalid_argument("e0 < t required");
    if (!(g.t_plus < p1)) throw std::invalid_argument("t < e1 required");
    if (!(p1 < g.a1)) throw std::invalid_argument("e1 < a1 required");
    if (singlets_per_round < 0) throw std::invalid_argument("singlets per round must be nonnegative");
    if (singlets_per_round > 0 && singlets_per_round < required_singlets(scheme)) {
        throw std::invalid_argument("insufficient singlet supply: " + std::string(adversary_name(kind)) + " needs " +
                                    std::to_string(required_singlets(scheme)) + " per round");
    }
    if (kind == AdversaryKind::record_replay && !(replay_delay >= 0)) {
        throw std::invalid_argument("replay delay must be nonnegative");
    }
    std::string reason;
    if (!applicable(kind, scheme.scheme, &reason)) {
        throw std::invalid_argument(reason);
    }
}

bool applicable(AdversaryKind kind, SchemeId scheme, std::string *reason) {
    bool routing = scheme == SchemeId::I || scheme == SchemeId::II;
    bool ok = true;
    const char *why = "";
    switch (kind) {
        case AdversaryKind::store_and_wait:
        case AdversaryKind::teleport_I_II:
            ok = routing;
            why = "needs a routing scheme (I or II)";
            break;
        case AdversaryKind::guess_measure:
        case AdversaryKind::teleport_III_style:
            ok = !routing;
            why = "needs a measure-and-broadcast scheme (III to VI)";
            break;
        default:
            break;
    }
    if (!ok && reason) {
        *reason = std::string(adversary_name(kind)) + " " + why;
    }
    return ok;
}

bool tag_powered_for(AdversaryKind kind) {
    return kind == AdversaryKind::none || kind == AdversaryKind::record_replay;
}

BlochVector nearest_pauli_axis(const BlochVector &axis) {
    double ax = std::abs(axis.x), ay = std::abs(axis.y), az = std::abs(axis.z);
    if (az >= ax && az >= ay) return {0, 0, axis.z >= 0 ? 1.0 : -1.0};
    if (ax >= ay) return {axis.x >= 0 ? 1.0 : -1.0, 0, 0};
    return {0, axis.y >= 0 ? 1.0 : -1.0, 0};
}

InferenceRule infer_flip(BellOutcome k, const BlochVector &axis) {
    Pauli c = correction_for(k);
    BasisAction action = basis_action(c, MeasBasis::from_axis(axis));
    if (action != BasisAction::not_preserved) {
        return {action == BasisAction::preserved_flipped, true};
    }
    action = basis_action(c, MeasBasis::from_axis(nearest_pauli_axis(axis)));
    return {action == BasisAction::preserved_flipped, false};
}

AdversarySites install_adversary(Scheduler &sched, const AdversaryConfig &cfg, const SchemeConfig &scheme,
                                 AgentId tag, Rng eve_rng) {
    cfg.validate(scheme);
    const auto &g = scheme.geometry;
    AdversarySites sites;
    sites.stats = std::make_shared<AdversaryStats>();

    SiteCommon common;
    common.scheme = scheme;
    common.cfg = cfg;
    common.tag = tag;
    common.lo = cfg.e0_or_default(g);
    common.hi = cfg.e1_or_default(g);
    common.stats = sites.stats;
    SiteCommon left = common;
    left.side = 0;
    SiteCommon right = common;
    right.side = 1;

    int per_round = cfg.singlets_per_round > 0 ? cfg.singlets_per_round : cfg.required_singlets(scheme);

    switch (cfg.kind) {
        case AdversaryKind::none:
        case AdversaryKind::tag_off_silent:
            sites.e0 = sched.add_agent("E0", left.lo, std::make_unique<PassiveSite>());
            sites.e1 = sched.add_agent("E1", right.hi, std::make_unique<PassiveSite>());
            break;
        case AdversaryKind::record_replay:
            sites.e0 = sched.add_agent("E0", left.lo, std::make_unique<RecordReplaySite>(left));
            sites.e1 = sched.add_agent("E1", right.hi, std::make_unique<RecordReplaySite>(right));
            break;
        case AdversaryKind::store_and_wait:
            sites.e0 = sched.add_agent("E0", left.lo, std::make_unique<StoreAndWaitSite>(left));
            sites.e1 = sched.add_agent("E1", right.hi, std::make_unique<PassiveSite>());
            break;
        case AdversaryKind::guess_measure:
            sites.e0 = sched.add_agent("E0", left.lo, std::make_unique<GuessMeasureSite>(left, std::move(eve_rng)));
            sites.e1 = sched.add_agent("E1", right.hi, std::make_unique<PassiveSite>());
            break;
        case AdversaryKind::teleport_I_II: {
            // Agent ids are needed as owners before the halves exist, so add
            // the sites first and hand them their halves afterwards.
            std::map<int, std::vector<QubitHandle>> halves0;
            std::map<int, std::vector<QubitHandle>> halves1;
            AgentId id0 = static_cast<AgentId>(sched.agent_count());
            AgentId id1 = id0 + 1;
            for (int i = 0; i < scheme.rounds; i++) {
                for (int j = 1; j <= per_round; j++) {
                    auto [h0, h1] = sched.store().create_pair(make_singlet(), id0, id1, QubitLabel{i, j});
                    if (j <= scheme.left_choices()) {
                        halves0[i].push_back(h0);
                        halves1[i].push_back(h1);
                    }
                    sites.stats->singlets_installed++;
                }
            }
            sites.e0 = sched.add_agent("E0", left.lo, std::make_unique<TeleportRoutingSite>(left, std::move(halves0)));
            sites.e1 = sched.add_agent("E1", right.hi, std::make_unique<TeleportRoutingSite>(right, std::move(halves1)));
            break;
        }
        case AdversaryKind::teleport_III_style: {
            std::map<int, QubitHandle> halves0;
            std::map<int, QubitHandle> halves1;
            AgentId id0 = static_cast<AgentId>(sched.agent_count());
            AgentId id1 = id0 + 1;
            for (int i = 0; i < scheme.rounds; i++) {
                for (int j = 1; j <= per_round; j++) {
                    auto [h0, h1] = sched.store().create_pair(make_singlet(), id0, id1, QubitLabel{i, j});
                    if (j == 1) {
                        halves0.emplace(i, h0);
                        halves1.emplace(i, h1);
                    }
                    sites.stats->singlets_installed++;
                }
            }
            sites.e0 = sched.add_agent("E0", left.lo, std::make_unique<TeleportMeasureSite>(left, std::move(halves0)));
            sites.e1 = sched.add_agent("E1", right.hi, std::make_unique<TeleportMeasureSite>(right, std::move(halves1)));
            break;
        }
    }
    return sites;
}

}  // namespace qtag
