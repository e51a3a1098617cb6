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

// Discrete-event propagation of classical and quantum signals along a line at
// c = 1, between stationary agents.
//
// Signals are delivered agent by agent in travel order. A classical signal is
// copied to every agent it passes unless one of them jams it or it leaves its
// reach interval. A quantum signal carries a handle into the QuantumStore; the
// agent it reaches holds it for the duration of the handler call and either
// keeps it (deposit, measure, re-emit) or lets it continue unchanged.

#ifndef QTAG_WORLDLINE_H
#define QTAG_WORLDLINE_H

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qtag/payload.h"
#include "qtag/qstate.h"

namespace qtag {

class NoCloneViolation : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

class CausalityViolation : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

enum class Direction : std::uint8_t { left, right };

inline double sign_of(Direction d) { return d == Direction::right ? 1.0 : -1.0; }
inline Direction opposite(Direction d) { return d == Direction::right ? Direction::left : Direction::right; }
const char *direction_name(Direction d);

using AgentId = std::uint32_t;
inline constexpr AgentId kNoAgent = std::numeric_limits<AgentId>::max();

struct QubitHandle {
    std::uint64_t id = 0;
    friend auto operator<=>(QubitHandle, QubitHandle) = default;
};

/// Identifies one qubit of a labelled batch: the round it is reserved for and
/// its slot within the batch.
struct QubitLabel {
    int round = 0;
    int slot = 0;
    friend bool operator==(QubitLabel, QubitLabel) = default;
};

enum class OwnerState : std::uint8_t { in_flight, held, stored, consumed };

struct Owner {
    OwnerState state = OwnerState::consumed;
    AgentId agent = kNoAgent;
    std::uint64_t signal = 0;
};

/// Owns every live quantum register and tracks exactly one owner per qubit.
/// All physical operations check that the caller owns the qubits involved.
class QuantumStore {
   public:
    explicit QuantumStore(Rng physics) : rng_(std::move(physics)) {}

    QubitHandle create(const PureRegister &state, AgentId owner, std::optional<QubitLabel> label = std::nullopt);
    std::pair<QubitHandle, QubitHandle> create_pair(
        const PureRegister &state, AgentId owner_first, AgentId owner_second,
        std::optional<QubitLabel> label = std::nullopt);

    void deposit(QubitHandle h, AgentId agent);
    void withdraw(QubitHandle h, AgentId agent);
    /// Traces the qubit out by measuring it in the computational basis and dropping the outcome.
    void discard(QubitHandle h, AgentId agent);

    int measure(QubitHandle h, AgentId agent, const MeasBasis &basis);
    BellOutcome bell_measure(QubitHandle a, QubitHandle b, AgentId agent);
    void apply_pauli(QubitHandle h, AgentId agent, Pauli p);
    /// Consumes the qubit; randomness comes from the caller's stream.
    bool projective_test(QubitHandle h, AgentId agent, const PureRegister &target, Rng &rng);

    const Owner &owner(QubitHandle h) const;
    std::optional<QubitLabel> label(QubitHandle h) const;
    /// The qubit's state when it is not entangled with anything else.
    std::optional<PureRegister> peek_unentangled(QubitHandle h) const;
    bool is_live(QubitHandle h) const;
    std::size_t live_count() const;

    // Transitions driven by the scheduler.
    void launch(QubitHandle h, AgentId from, std::uint64_t signal);
    void land(QubitHandle h, AgentId at, std::uint64_t signal);
    void lose(QubitHandle h, std::uint64_t signal);

    /// Every live handle belongs to exactly one register and the register
    /// bookkeeping agrees with the handle table.
    void check_invariants() const;

   private:
    struct Slot {
        Owner owner;
        std::uint64_t reg = 0;
        std::optional<QubitLabel> label;
    };
    struct Register {
        PureRegister state;
        std::vector<std::uint64_t> qubits;
    };

    Slot &owned_slot(QubitHandle h, AgentId agent, const char *op);
    std::uint64_t merge(std::uint64_t ra, std::uint64_t rb);
    std::size_t index_in(const Register &r, std::uint64_t qubit) const;
    void remove_qubit(std::uint64_t qubit, const MeasBasis &basis, Rng &rng, int *outcome_out);
    void consume(std::uint64_t qubit);
    std::uint64_t add_register(PureRegister state, std::vector<std::uint64_t> qubits);

    Rng rng_;
    std::uint64_t next_handle_ = 1;
    std::uint64_t next_register_ = 1;
    std::map<std::uint64_t, Slot> slots_;
    std::map<std::uint64_t, Register> registers_;
};

using SignalPayload = std::variant<ClassicalPayload, QubitHandle>;

struct Signal {
    std::uint64_t id = 0;
    double emit_time = 0;
    double emit_pos = 0;
    Direction direction = Direction::right;
    AgentId origin = kNoAgent;
    int round = -1;
    SignalPayload payload;
    /// Positions outside [reach_lo, reach_hi] never receive this signal.
    double reach_lo = -std::numeric_limits<double>::infinity();
    double reach_hi = std::numeric_limits<double>::infinity();

    bool is_quantum() const { return std::holds_alternative<QubitHandle>(payload); }
    const ClassicalPayload &classical() const { return std::get<ClassicalPayload>(payload); }
    QubitHandle qubit() const { return std::get<QubitHandle>(payload); }
    PayloadKind kind() const { return is_quantum() ? PayloadKind::qubit : kind_of(classical()); }
    double position_at(double t) const { return emit_pos + sign_of(direction) * (t - emit_time); }
};

struct DeliveryRecord {
    double time = 0;
    double position = 0;
    AgentId agent = kNoAgent;
    Direction direction = Direction::right;
    std::uint64_t signal = 0;
    double emit_time = 0;
    double emit_pos = 0;
    AgentId origin = kNoAgent;
    int round = -1;
    PayloadKind kind = PayloadKind::qubit;
    std::optional<ClassicalPayload> classical;
    std::optional<QubitHandle> qubit;
    std::optional<QubitLabel> label;
    /// The receiving agent kept, jammed, or consumed the signal.
    bool absorbed = false;
};

struct LogRecord {
    double time = 0;
    AgentId agent = kNoAgent;
    int round = -1;
    std::string kind;
    std::string detail;
};

struct Transcript {
    std::vector<std::string> agent_names;
    std::vector<double> agent_positions;
    std::vector<DeliveryRecord> deliveries;
    std::vector<LogRecord> notes;

    /// One line per delivery: `time position direction kind summary`.
    std::string to_text() const;
};

std::string summarize(const DeliveryRecord &d);

class AgentContext;

class Agent {
   public:
    virtual ~Agent() = default;
    virtual void on_signal(AgentContext &ctx, const Signal &signal) = 0;
    virtual void on_wakeup(AgentContext &, std::uint64_t) {}
};

class Scheduler;

/// Capabilities handed to an agent while it handles one event.
class AgentContext {
   public:
    double now() const;
    double position() const;
    AgentId self() const { return self_; }

    void emit(Direction d, ClassicalPayload payload, int round);
    void emit_at(double time, Direction d, ClassicalPayload payload, int round);
    /// Classical emission confined to [reach_lo, reach_hi].
    void emit_confined(Direction d, ClassicalPayload payload, int round, double reach_lo, double reach_hi);
    void emit_qubit(Direction d, QubitHandle h, int round);

    /// Stops the classical signal being delivered from travelling further.
    void jam();

    void deposit(QubitHandle h);
    void withdraw(QubitHandle h);
    void discard(QubitHandle h);
    int measure(QubitHandle h, const MeasBasis &basis);
    BellOutcome bell_measure(QubitHandle a, QubitHandle b);
    void apply_pauli(QubitHandle h, Pauli p);
    QubitHandle create_qubit(const PureRegister &state, std::optional<QubitLabel> label = std::nullopt);
    std::optional<QubitLabel> label(QubitHandle h) const;

    void wake_at(double time, std::uint64_t token);
    void log(std::string kind, std::string detail, int round);

   private:
    friend class Scheduler;
    AgentContext(Scheduler &s, AgentId self) : sched_(s), self_(self) {}
    Scheduler &sched_;
    AgentId self_;
    bool jammed_ = false;
    std::vector<QubitHandle> withdrawn_;
};

class Scheduler {
   public:
    explicit Scheduler(Rng physics) : store_(std::move(physics)) {}
    Scheduler(const Scheduler &) = delete;
    Scheduler &operator=(const Scheduler &) = delete;

    /// Agents must sit at distinct positions and be registered before the first event runs.
    AgentId add_agent(std::string name, double position, std::unique_ptr<Agent> agent);
    Agent &agent(AgentId id) { return *agents_[id].impl; }
    double position_of(AgentId id) const { return agents_[id].position; }
    std::size_t agent_count() const { return agents_.size(); }

    QuantumStore &store() { return store_; }
    const QuantumStore &store() const { return store_; }
    double now() const { return now_; }

    /// Queues a signal leaving `from` at `time`. Quantum payloads must be owned by `from`.
    const Signal &emit(AgentId from, double time, Direction d, SignalPayload payload, int round,
                       double reach_lo = -std::numeric_limits<double>::infinity(),
                       double reach_hi = std::numeric_limits<double>::infinity());
    void wake_at(AgentId agent, double time, std::uint64_t token);

    struct Interception {
        AgentId agent;
        double time;
    };
    /// First registered agent strictly beyond the emission point in the travel direction, within reach.
    std::optional<Interception> next_interceptor(const Signal &s) const;

    /// Processes every event with time <= until, in (time, position, sequence) order.
    const Transcript &run(double until = std::numeric_limits<double>::infinity());
    const Transcript &transcript() const { return transcript_; }

    /// Enables the ownership sweep after every event.
    void set_invariant_checks(bool on) { check_invariants_ = on; }
    void check_invariants() const;

   private:
    friend class AgentContext;

    struct AgentEntry {
        std::string name;
        double position;
        std::unique_ptr<Agent> impl;
    };
    enum class EventType : std::uint8_t { delivery, wakeup };
    struct Event {
        double time;
        double position;
        std::uint64_t seq;
        EventType type;
        AgentId agent;
        std::uint64_t payload;  // signal id or wakeup token
        bool operator>(const Event &o) const {
            if (time != o.time) return time > o.time;
            if (position != o.position) return position > o.position;
            return seq > o.seq;
        }
    };

    std::optional<Interception> interceptor_after(const Signal &s, double from_pos) const;
    void schedule_hop(const Signal &s, double from_pos);
    void deliver(const Event &e);
    void wake(const Event &e);
    void finish_context(AgentContext &ctx);
    void check_light_cone(const Signal &s, double time, double pos) const;

    QuantumStore store_;
    std::vector<AgentEntry> agents_;
    std::map<std::uint64_t, Signal> in_flight_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_signal_ = 1;
    double now_ = 0;
    bool started_ = false;
    bool check_invariants_ = false;
    Transcript transcript_;
};

}  // namespace qtag

#endif
