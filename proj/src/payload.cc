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

#include "qtag/payload.h"

#include <sstream>

namespace qtag {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string axis_text(const BlochVector &v) {
    std::ostringstream out;
    out.precision(6);
    out << "(" << v.x << "," << v.y << "," << v.z << ")";
    return out.str();
}

}  // namespace

PayloadKind kind_of(const ClassicalPayload &p) {
    return std::visit(
        overloaded{
            [](const RouteBit &) { return PayloadKind::route_bit; },
            [](const RouteIndex &) { return PayloadKind::route_index; },
            [](const BasisTrit &) { return PayloadKind::basis_trit; },
            [](const BasisAxis &) { return PayloadKind::basis_axis; },
            [](const BranchInstruction &) { return PayloadKind::branch_instruction; },
            [](const OutcomeReport &) { return PayloadKind::outcome_report; },
            [](const TeleportData &) { return PayloadKind::teleport_data; },
            [](const RemoteMeasurement &) { return PayloadKind::remote_measurement; },
        },
        p);
}

const char *kind_name(PayloadKind k) {
    switch (k) {
        case PayloadKind::route_bit:
            return "route_bit";
        case PayloadKind::route_index:
            return "route_index";
        case PayloadKind::basis_trit:
            return "basis_trit";
        case PayloadKind::basis_axis:
            return "basis_axis";
        case PayloadKind::branch_instruction:
            return "branch_instruction";
        case PayloadKind::outcome_report:
            return "outcome_report";
        case PayloadKind::teleport_data:
            return "teleport_data";
        case PayloadKind::remote_measurement:
            return "remote_measurement";
        case PayloadKind::qubit:
            return "qubit";
    }
    return "?";
}

std::string summarize(const ClassicalPayload &p) {
    return std::visit(
        overloaded{
            [](const RouteBit &v) { return "bit=" + std::to_string(v.bit); },
            [](const RouteIndex &v) { return "index=" + std::to_string(v.value); },
            [](const BasisTrit &v) { return "trit=" + std::to_string(v.trit); },
            [](const BasisAxis &v) { return "axis=" + axis_text(v.axis); },
            [](const BranchInstruction &v) {
                return "axis=" + axis_text(v.axis) + ",branch=" + std::to_string(v.branch) +
                       ",direction=" + std::to_string(v.direction);
            },
            [](const OutcomeReport &v) { return "outcome=" + std::to_string(v.bit); },
            [](const TeleportData &v) {
                return "label=" + std::to_string(v.label) + ",bell=" + std::to_string(v.outcome.bits);
            },
            [](const RemoteMeasurement &v) { return "raw=" + std::to_string(v.raw) + ",axis=" + axis_text(v.axis); },
        },
        p);
}

}  // namespace qtag
