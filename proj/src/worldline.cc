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

#include "qtag/worldline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qtag {

namespace {

std::string handle_text(std::uint64_t id) { return "qubit#" + std::to_string(id); }

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const char *direction_name(Direction d) { return d == Direction::right ? "right" : "left"; }

// ---------------------------------------------------------------------------
// QuantumStore

std::uint64_t QuantumStore::add_register(PureRegister state, std::vector<std::uint64_t> qubits) {
    std::uint64_t id = next_register_++;
    for (auto q : qubits) {
        slots_.at(q).reg = id;
    }
    registers_.emplace(id, Register{std::move(state), std::move(qubits)});
    return id;
}

QubitHandle QuantumStore::create(const PureRegister &state, AgentId owner, std::optional<QubitLabel> label) {
    if (state.num_qubits() != 1) {
        throw std::invalid_argument("QuantumStore::create: expected a single-qubit state");
    }
    std::uint64_t h = next_handle_++;
    slots_[h] = Slot{Owner{OwnerState::stored, owner, 0}, 0, label};
    add_register(state, {h});
    return QubitHandle{h};
}

std::pair<QubitHandle, QubitHandle> QuantumStore::create_pair(
    const PureRegister &state, AgentId owner_first, AgentId owner_second, std::optional<QubitLabel> label) {
    if (state.num_qubits() != 2) {
        throw std::invalid_argument("QuantumStore::create_pair: expected a two-qubit state");
    }
    std::uint64_t a = next_handle_++;
    std::uint64_t b = next_handle_++;
    slots_[a] = Slot{Owner{OwnerState::stored, owner_first, 0}, 0, label};
    slots_[b] = Slot{Owner{OwnerState::stored, owner_second, 0}, 0, label};
    add_register(state, {a, b});
    return {QubitHandle{a}, QubitHandle{b}};
}

QuantumStore::Slot &QuantumStore::owned_slot(QubitHandle h, AgentId agent, const char *op) {
    auto it = slots_.find(h.id);
    if (it == slots_.end()) {
        throw NoCloneViolation(std::string(op) + ": unknown " + handle_text(h.id));
    }
    Slot &s = it->second;
    if (s.owner.state == OwnerState::consumed) {
        throw NoCloneViolation(std::string(op) + ": " + handle_text(h.id) + " was already consumed");
    }
    if (s.owner.agent != agent || s.owner.state == OwnerState::in_flight) {
        throw NoCloneViolation(std::string(op) + ": agent " + std::to_string(agent) + " does not own " +
                               handle_text(h.id));
    }
    return s;
}

void QuantumStore::deposit(QubitHandle h, AgentId agent) {
    Slot &s = owned_slot(h, agent, "deposit");
    if (s.owner.state != OwnerState::held) {
        throw NoCloneViolation("deposit: " + handle_text(h.id) + " is already in the store");
    }
    s.owner.state = OwnerState::stored;
}

void QuantumStore::withdraw(QubitHandle h, AgentId agent) {
    Slot &s = owned_slot(h, agent, "withdraw");
    if (s.owner.state != OwnerState::stored) {
        throw NoCloneViolation("withdraw: " + handle_text(h.id) + " is not in the store");
    }
    s.owner.state = OwnerState::held;
}

std::size_t QuantumStore::index_in(const Register &r, std::uint64_t qubit) const {
    auto it = std::find(r.qubits.begin(), r.qubits.end(), qubit);
    if (it == r.qubits.end()) {
        throw std::logic_error("QuantumStore: register bookkeeping lost " + handle_text(qubit));
    }
    return static_cast<std::size_t>(it - r.qubits.begin());
}

void QuantumStore::consume(std::uint64_t qubit) {
    Slot &s = slots_.at(qubit);
    s.owner = Owner{OwnerState::consumed, kNoAgent, 0};
    s.reg = 0;
}

void QuantumStore::remove_qubit(std::uint64_t qubit, const MeasBasis &basis, Rng &rng, int *outcome_out) {
    std::uint64_t reg_id = slots_.at(qubit).reg;
    Register &r = registers_.at(reg_id);
    std::size_t idx = index_in(r, qubit);
    auto result = measure_qubit(r.state, idx, basis, rng);
    if (result.rest) {
        r.state = *result.rest;
        r.qubits.erase(r.qubits.begin() + static_cast<std::ptrdiff_t>(idx));
    } else {
        registers_.erase(reg_id);
    }
    consume(qubit);
    if (outcome_out) {
        *outcome_out = result.outcome;
    }
}

void QuantumStore::discard(QubitHandle h, AgentId agent) {
    owned_slot(h, agent, "discard");
    remove_qubit(h.id, MeasBasis::pauli(0), rng_, nullptr);
}

int QuantumStore::measure(QubitHandle h, AgentId agent, const MeasBasis &basis) {
    owned_slot(h, agent, "measure");
    int outcome = 0;
    remove_qubit(h.id, basis, rng_, &outcome);
    return outcome;
}

std::uint64_t QuantumStore::merge(std::uint64_t ra, std::uint64_t rb) {
    if (ra == rb) {
        return ra;
    }
    Register a = std::move(registers_.at(ra));
    Register b = std::move(registers_.at(rb));
    registers_.erase(ra);
    registers_.erase(rb);
    PureRegister joint = tensor(a.state, b.state);
    std::vector<std::uint64_t> qubits = std::move(a.qubits);
    qubits.insert(qubits.end(), b.qubits.begin(), b.qubits.end());
    return add_register(std::move(joint), std::move(qubits));
}

BellOutcome QuantumStore::bell_measure(QubitHandle a, QubitHandle b, AgentId agent) {
    if (a == b) {
        throw std::invalid_argument("bell_measure: qubits must be distinct");
    }
    Slot &sa = owned_slot(a, agent, "bell_measure");
    Slot &sb = owned_slot(b, agent, "bell_measure");
    std::uint64_t reg_id = merge(sa.reg, sb.reg);
    Register &r = registers_.at(reg_id);
    std::size_t ia = index_in(r, a.id);
    std::size_t ib = index_in(r, b.id);
    auto result = qtag::bell_measure(r.state, ia, ib, rng_);
    if (result.rest) {
        std::vector<std::uint64_t> remaining;
        for (auto q : r.qubits) {
            if (q != a.id && q != b.id) {
                remaining.push_back(q);
            }
        }
        r.state = *result.rest;
        r.qubits = std::move(remaining);
    } else {
        registers_.erase(reg_id);
    }
    consume(a.id);
    consume(b.id);
    return result.outcome;
}

void QuantumStore::apply_pauli(QubitHandle h, AgentId agent, Pauli p) {
    Slot &s = owned_slot(h, agent, "apply_pauli");
    Register &r = registers_.at(s.reg);
    r.state = qtag::apply_pauli(r.state, index_in(r, h.id), p);
}

bool QuantumStore::projective_test(QubitHandle h, AgentId agent, const PureRegister &target, Rng &rng) {
    owned_slot(h, agent, "projective_test");
    if (target.num_qubits() != 1) {
        throw std::invalid_argument("projective_test: target must be a single qubit");
    }
    // Outcome 0 of this basis is the projector onto the target state.
    auto basis = MeasBasis::from_axis(target.bloch());
    int outcome = 0;
    remove_qubit(h.id, basis, rng, &outcome);
    return outcome == 0;
}

const Owner &QuantumStore::owner(QubitHandle h) const {
    auto it = slots_.find(h.id);
    if (it == slots_.end()) {
        throw NoCloneViolation("owner: unknown " + handle_text(h.id));
    }
    return it->second.owner;
}

std::optional<QubitLabel> QuantumStore::label(QubitHandle h) const {
    auto it = slots_.find(h.id);
    return it == slots_.end() ? std::nullopt : it->second.label;
}

std::optional<PureRegister> QuantumStore::peek_unentangled(QubitHandle h) const {
    auto it = slots_.find(h.id);
    if (it == slots_.end() || it->second.owner.state == OwnerState::consumed) {
        return std::nullopt;
    }
    const Register &r = registers_.at(it->second.reg);
    if (r.qubits.size() != 1) {
        return std::nullopt;
    }
    return r.state;
}

bool QuantumStore::is_live(QubitHandle h) const {
    auto it = slots_.find(h.id);
    return it != slots_.end() && it->second.owner.state != OwnerState::consumed;
}

std::size_t QuantumStore::live_count() const {
    return static_cast<std::size_t>(std::count_if(slots_.begin(), slots_.end(), [](const auto &kv) {
        return kv.second.owner.state != OwnerState::consumed;
    }));
}

void QuantumStore::launch(QubitHandle h, AgentId from, std::uint64_t signal) {
    Slot &s = owned_slot(h, from, "emit");
    s.owner = Owner{OwnerState::in_flight, kNoAgent, signal};
}

void QuantumStore::land(QubitHandle h, AgentId at, std::uint64_t signal) {
    auto it = slots_.find(h.id);
    if (it == slots_.end() || it->second.owner.state != OwnerState::in_flight || it->second.owner.signal != signal) {
        throw NoCloneViolation("land: " + handle_text(h.id) + " is not carried by signal " + std::to_string(signal));
    }
    it->second.owner = Owner{OwnerState::held, at, 0};
}

void QuantumStore::lose(QubitHandle h, std::uint64_t signal) {
    auto it = slots_.find(h.id);
    if (it == slots_.end() || it->second.owner.state != OwnerState::in_flight || it->second.owner.signal != signal) {
        throw NoCloneViolation("lose: " + handle_text(h.id) + " is not carried by signal " + std::to_string(signal));
    }
    remove_qubit(h.id, MeasBasis::pauli(0), rng_, nullptr);
}

void QuantumStore::check_invariants() const {
    for (const auto &[id, slot] : slots_) {
        if (slot.owner.state == OwnerState::consumed) {
            continue;
        }
        auto r = registers_.find(slot.reg);
        if (r == registers_.end() ||
            std::count(r->second.qubits.begin(), r->second.qubits.end(), id) != 1) {
            throw NoCloneViolation("store sweep: " + handle_text(id) + " is not in exactly one register");
        }
    }
    for (const auto &[rid, reg] : registers_) {
        if (reg.qubits.size() != reg.state.num_qubits()) {
            throw std::logic_error("store sweep: register width mismatch");
        }
        for (auto q : reg.qubits) {
            const Slot &s = slots_.at(q);
            if (s.reg != rid || s.owner.state == OwnerState::consumed) {
                throw NoCloneViolation("store sweep: " + handle_text(q) + " has conflicting ownership");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Scheduler

AgentId Scheduler::add_agent(std::string name, double position, std::unique_ptr<Agent> agent) {
    if (started_) {
        throw std::logic_error("add_agent: scheduler already running");
    }
    if (!std::isfinite(position)) {
        throw std::invalid_argument("add_agent: position must be finite");
    }
    for (const auto &a : agents_) {
        if (a.position == position) {
            throw std::invalid_argument("add_agent: two agents at position " + number(position));
        }
    }
    agents_.push_back(AgentEntry{name, position, std::move(agent)});
    transcript_.agent_names.push_back(std::move(name));
    transcript_.agent_positions.push_back(position);
    return static_cast<AgentId>(agents_.size() - 1);
}

std::optional<Scheduler::Interception> Scheduler::interceptor_after(const Signal &s, double from_pos) const {
    std::optional<Interception> best;
    double best_dist = 0;
    for (AgentId id = 0; id < agents_.size(); id++) {
        double pos = agents_[id].position;
        double dist = sign_of(s.direction) * (pos - from_pos);
        if (dist <= 0 || pos < s.reach_lo || pos > s.reach_hi) {
            continue;
        }
        if (!best || dist < best_dist) {
            best = Interception{id, s.emit_time + std::abs(pos - s.emit_pos)};
            best_dist = dist;
        }
    }
    return best;
}

std::optional<Scheduler::Interception> Scheduler::next_interceptor(const Signal &s) const {
    return interceptor_after(s, s.emit_pos);
}

void Scheduler::schedule_hop(const Signal &s, double from_pos) {
    auto next = interceptor_after(s, from_pos);
    if (!next) {
        if (s.is_quantum()) {
            store_.lose(s.qubit(), s.id);
            transcript_.notes.push_back(
                LogRecord{now_, kNoAgent, s.round, "qubit_left_line", handle_text(s.qubit().id) + " traced out"});
        }
        in_flight_.erase(s.id);
        return;
    }
    queue_.push(Event{next->time, agents_[next->agent].position, next_seq_++, EventType::delivery, next->agent, s.id});
}

const Signal &Scheduler::emit(AgentId from, double time, Direction d, SignalPayload payload, int round,
                              double reach_lo, double reach_hi) {
    if (from >= agents_.size()) {
        throw std::invalid_argument("emit: unknown agent");
    }
    if (!(time >= now_)) {
        throw CausalityViolation("emit: agent " + agents_[from].name + " emitting at t=" + number(time) +
                                 " before current time " + number(now_));
    }
    std::uint64_t id = next_signal_++;
    if (auto *h = std::get_if<QubitHandle>(&payload)) {
        store_.launch(*h, from, id);
    }
    Signal s{id, time, agents_[from].position, d, from, round, std::move(payload), reach_lo, reach_hi};
    auto [it, inserted] = in_flight_.emplace(id, std::move(s));
    schedule_hop(it->second, it->second.emit_pos);
    return it->second;
}

void Scheduler::wake_at(AgentId agent, double time, std::uint64_t token) {
    if (!(time >= now_)) {
        throw CausalityViolation("wake_at: time " + number(time) + " is in the past");
    }
    queue_.push(Event{time, agents_.at(agent).position, next_seq_++, EventType::wakeup, agent, token});
}

void Scheduler::check_light_cone(const Signal &s, double time, double pos) const {
    double dt = time - s.emit_time;
    double dx = std::abs(pos - s.emit_pos);
    double slack = 1e-12 * std::max({1.0, std::abs(time), std::abs(pos)});
    if (dt < 0 || std::abs(dt - dx) > slack) {
        throw CausalityViolation("delivery at t=" + number(time) + ", x=" + number(pos) +
                                 " is off the light cone of emission t=" + number(s.emit_time) +
                                 ", x=" + number(s.emit_pos));
    }
}

void Scheduler::finish_context(AgentContext &ctx) {
    for (auto h : ctx.withdrawn_) {
        if (store_.is_live(h)) {
            const Owner &o = store_.owner(h);
            if (o.state == OwnerState::held && o.agent == ctx.self_) {
                store_.deposit(h, ctx.self_);
            }
        }
    }
}

void Scheduler::deliver(const Event &e) {
    Signal s = in_flight_.at(e.payload);
    double pos = agents_[e.agent].position;
    check_light_cone(s, e.time, pos);
    if (s.is_quantum()) {
        store_.land(s.qubit(), e.agent, s.id);
    }

    AgentContext ctx(*this, e.agent);
    try {
        agents_[e.agent].impl->on_signal(ctx, s);
    } catch (const std::exception &ex) {
        // Re-throw the same type family with event context attached.
        std::string where = "while delivering " + std::string(kind_name(s.kind())) + " (round " +
                            std::to_string(s.round) + ") to " + agents_[e.agent].name + " at t=" + number(e.time) +
                            ": ";
        if (dynamic_cast<const NoCloneViolation *>(&ex)) throw NoCloneViolation(where + ex.what());
        if (dynamic_cast<const CausalityViolation *>(&ex)) throw CausalityViolation(where + ex.what());
        throw std::runtime_error(where + ex.what());
    }

    bool absorbed = false;
    if (s.is_quantum()) {
        const Owner &o = store_.owner(s.qubit());
        absorbed = !(o.state == OwnerState::held && o.agent == e.agent);
    } else {
        absorbed = ctx.jammed_;
    }
    finish_context(ctx);

    DeliveryRecord rec;
    rec.time = e.time;
    rec.position = pos;
    rec.agent = e.agent;
    rec.direction = s.direction;
    rec.signal = s.id;
    rec.emit_time = s.emit_time;
    rec.emit_pos = s.emit_pos;
    rec.origin = s.origin;
    rec.round = s.round;
    rec.kind = s.kind();
    if (s.is_quantum()) {
        rec.qubit = s.qubit();
        rec.label = store_.label(s.qubit());
    } else {
        rec.classical = s.classical();
    }
    rec.absorbed = absorbed;
    transcript_.deliveries.push_back(std::move(rec));

    if (absorbed) {
        in_flight_.erase(s.id);
        return;
    }
    if (s.is_quantum()) {
        store_.launch(s.qubit(), e.agent, s.id);
    }
    schedule_hop(in_flight_.at(s.id), pos);
}

void Scheduler::wake(const Event &e) {
    AgentContext ctx(*this, e.agent);
    agents_[e.agent].impl->on_wakeup(ctx, e.payload);
    finish_context(ctx);
}

const Transcript &Scheduler::run(double until) {
    started_ = true;
    while (!queue_.empty() && queue_.top().time <= until) {
        Event e = queue_.top();
        queue_.pop();
        now_ = e.time;
        if (e.type == EventType::delivery) {
            deliver(e);
        } else {
            wake(e);
        }
        if (check_invariants_) {
            check_invariants();
        }
    }
    return transcript_;
}

void Scheduler::check_invariants() const {
    store_.check_invariants();
    std::size_t carried = 0;
    for (const auto &[id, s] : in_flight_) {
        if (!s.is_quantum()) {
            continue;
        }
        carried++;
        const Owner &o = store_.owner(s.qubit());
        if (o.state != OwnerState::in_flight || o.signal != id) {
            throw NoCloneViolation("sweep: signal " + std::to_string(id) + " carries a qubit it does not own");
        }
    }
    (void)carried;
}

// ---------------------------------------------------------------------------
// AgentContext

double AgentContext::now() const { return sched_.now_; }
double AgentContext::position() const { return sched_.agents_[self_].position; }

void AgentContext::emit(Direction d, ClassicalPayload payload, int round) {
    sched_.emit(self_, sched_.now_, d, std::move(payload), round);
}

void AgentContext::emit_at(double time, Direction d, ClassicalPayload payload, int round) {
    sched_.emit(self_, time, d, std::move(payload), round);
}

void AgentContext::emit_confined(Direction d, ClassicalPayload payload, int round, double reach_lo, double reach_hi) {
    sched_.emit(self_, sched_.now_, d, std::move(payload), round, reach_lo, reach_hi);
}

void AgentContext::emit_qubit(Direction d, QubitHandle h, int round) { sched_.emit(self_, sched_.now_, d, h, round); }

void AgentContext::jam() { jammed_ = true; }

void AgentContext::deposit(QubitHandle h) { sched_.store_.deposit(h, self_); }

void AgentContext::withdraw(QubitHandle h) {
    sched_.store_.withdraw(h, self_);
    withdrawn_.push_back(h);
}

void AgentContext::discard(QubitHandle h) { sched_.store_.discard(h, self_); }

int AgentContext::measure(QubitHandle h, const MeasBasis &basis) { return sched_.store_.measure(h, self_, basis); }

BellOutcome AgentContext::bell_measure(QubitHandle a, QubitHandle b) {
    return sched_.store_.bell_measure(a, b, self_);
}

void AgentContext::apply_pauli(QubitHandle h, Pauli p) { sched_.store_.apply_pauli(h, self_, p); }

QubitHandle AgentContext::create_qubit(const PureRegister &state, std::optional<QubitLabel> label) {
    return sched_.store_.create(state, self_, label);
}

std::optional<QubitLabel> AgentContext::label(QubitHandle h) const { return sched_.store_.label(h); }

void AgentContext::wake_at(double time, std::uint64_t token) { sched_.wake_at(self_, time, token); }

void AgentContext::log(std::string kind, std::string detail, int round) {
    sched_.transcript_.notes.push_back(LogRecord{sched_.now_, self_, round, std::move(kind), std::move(detail)});
}

// ---------------------------------------------------------------------------
// Transcript

std::string summarize(const DeliveryRecord &d) {
    std::string s = "agent=" + std::to_string(d.agent) + ";origin=" + std::to_string(d.origin) +
                    ";round=" + std::to_string(d.round) + ";";
    if (d.classical) {
        s += summarize(*d.classical);
    } else if (d.qubit) {
        s += handle_text(d.qubit->id);
        if (d.label) {
            s += ";label=" + std::to_string(d.label->round) + "/" + std::to_string(d.label->slot);
        }
    }
    if (d.absorbed) {
        s += ";absorbed";
    }
    return s;
}

std::string Transcript::to_text() const {
    std::string out;
    for (const auto &d : deliveries) {
        out += number(d.time);
        out += ' ';
        out += number(d.position);
        out += ' ';
        out += direction_name(d.direction);
        out += ' ';
        out += kind_name(d.kind);
        out += ' ';
        out += summarize(d);
        out += '\n';
    }
    return out;
}

}  // namespace qtag
