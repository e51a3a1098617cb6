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

#ifndef QTAG_PAYLOAD_H
#define QTAG_PAYLOAD_H

#include <string>
#include <variant>

#include "qtag/qstate.h"

namespace qtag {

// Classical message bodies. All of them are plain values and copy freely.

/// Scheme I instruction: send the qubit toward A0 (0) or A1 (1).
struct RouteBit {
    int bit = 0;
};

/// Scheme II routing number, 1-based as sent on the wire.
struct RouteIndex {
    int value = 1;
};

/// Basis selector for the three-basis schemes (III and V).
struct BasisTrit {
    int trit = 0;
};

/// Continuous basis selector (Scheme IV).
struct BasisAxis {
    BlochVector axis;
};

/// Scheme VI instruction: basis plus branch bit and direction bit.
struct BranchInstruction {
    BlochVector axis;
    int branch = 0;     // 0: measure and broadcast, 1: forward the qubit
    int direction = 0;  // destination station when branch == 1
};

/// Measurement outcome broadcast toward the stations.
struct OutcomeReport {
    int bit = 0;
};

/// Bell outcome shipped between adversary sites, with the entanglement label.
struct TeleportData {
    int label = 0;
    BellOutcome outcome;
};

/// Raw outcome of measuring the receiving half, plus the basis used.
struct RemoteMeasurement {
    int raw = 0;
    BlochVector axis;
};

using ClassicalPayload =
    std::variant<RouteBit, RouteIndex, BasisTrit, BasisAxis, BranchInstruction, OutcomeReport, TeleportData,
                 RemoteMeasurement>;

enum class PayloadKind {
    route_bit,
    route_index,
    basis_trit,
    basis_axis,
    branch_instruction,
    outcome_report,
    teleport_data,
    remote_measurement,
    qubit,
};

PayloadKind kind_of(const ClassicalPayload &p);
const char *kind_name(PayloadKind k);
std::string summarize(const ClassicalPayload &p);

/// True for messages that only ever travel between adversary sites.
inline bool is_adversary_internal(PayloadKind k) {
    return k == PayloadKind::teleport_data || k == PayloadKind::remote_measurement;
}

}  // namespace qtag

#endif
