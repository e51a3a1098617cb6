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

#include "qtag/qstate.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qtag {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double norm_squared(std::span<const Amplitude> amps) {
    double total = 0;
    for (const auto &a : amps) {
        total += std::norm(a);
    }
    return total;
}

std::size_t bit_of(std::size_t index, std::size_t num_qubits, std::size_t qubit) {
    return (index >> (num_qubits - 1 - qubit)) & 1;
}

void check_index(std::size_t qubit, std::size_t num_qubits) {
    if (qubit >= num_qubits) {
        throw std::out_of_range(
            "qubit index " + std::to_string(qubit) + " out of range for " + std::to_string(num_qubits) + " qubits");
    }
}

// Index over the qubits that survive after removing the ones flagged in `removed`.
std::size_t compact_index(std::size_t full, std::size_t num_qubits, std::size_t removed_mask) {
    std::size_t out = 0;
    for (std::size_t q = 0; q < num_qubits; q++) {
        if (removed_mask & (std::size_t{1} << q)) {
            continue;
        }
        out = (out << 1) | bit_of(full, num_qubits, q);
    }
    return out;
}

// Projects the qubits in `removed_mask` onto a product-or-entangled bra given by
// `coefficient(full_index)`; returns the unnormalized remainder.
template <typename Coef>
std::vector<Amplitude> project(const PureRegister &reg, std::size_t removed_mask, std::size_t removed_count, Coef coefficient) {
    std::size_t n = reg.num_qubits();
    std::vector<Amplitude> rest(std::size_t{1} << (n - removed_count));
    for (std::size_t f = 0; f < reg.amplitudes().size(); f++) {
        rest[compact_index(f, n, removed_mask)] += coefficient(f) * reg[f];
    }
    return rest;
}

std::size_t sample_index(std::span<const double> probabilities, Rng &rng) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0;
    for (std::size_t k = 0; k < probabilities.size(); k++) {
        acc += probabilities[k];
        if (u < acc) {
            return k;
        }
    }
    // Rounding left u above the cumulative total; pick the last nonzero outcome.
    for (std::size_t k = probabilities.size(); k-- > 0;) {
        if (probabilities[k] > 0) {
            return k;
        }
    }
    throw std::logic_error("sample_index: all probabilities are zero");
}

std::optional<PureRegister> normalized_rest(std::vector<Amplitude> rest, double probability) {
    if (rest.size() == 1) {
        return std::nullopt;
    }
    double scale = 1.0 / std::sqrt(probability);
    for (auto &a : rest) {
        a *= scale;
    }
    return PureRegister::from_amplitudes(std::move(rest));
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(dot(*this)); }

bool BlochVector::approx_equal(const BlochVector &other, double tol) const {
    return std::abs(x - other.x) <= tol && std::abs(y - other.y) <= tol && std::abs(z - other.z) <= tol;
}

PureRegister PureRegister::from_amplitudes(std::vector<Amplitude> amplitudes) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < amplitudes.size()) {
        n++;
    }
    if (n < 1 || n > kMaxQubits || (std::size_t{1} << n) != amplitudes.size()) {
        throw std::invalid_argument(
            "register needs 2^n amplitudes with 1 <= n <= 3, got " + std::to_string(amplitudes.size()));
    }
    for (const auto &a : amplitudes) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw std::invalid_argument("register amplitude is not finite");
        }
    }
    double total = norm_squared(amplitudes);
    if (std::abs(total - 1.0) > kAlgebraTolerance) {
        throw std::invalid_argument("register is not normalized: sum |a|^2 = " + std::to_string(total));
    }
    return PureRegister(n, std::move(amplitudes));
}

PureRegister PureRegister::basis_state(std::size_t num_qubits, std::size_t index) {
    if (num_qubits < 1 || num_qubits > kMaxQubits || index >= (std::size_t{1} << num_qubits)) {
        throw std::invalid_argument("basis_state: bad qubit count or index");
    }
    std::vector<Amplitude> amps(std::size_t{1} << num_qubits);
    amps[index] = 1.0;
    return PureRegister(num_qubits, std::move(amps));
}

PureRegister PureRegister::from_bloch(const BlochVector &axis) {
    double r = axis.norm();
    if (!(r > 0) || !std::isfinite(r)) {
        throw std::invalid_argument("from_bloch: axis must be a finite nonzero vector");
    }
    double z = std::clamp(axis.z / r, -1.0, 1.0);
    double theta = std::acos(z);
    double phi = std::atan2(axis.y, axis.x);
    return PureRegister(1, {Amplitude(std::cos(theta / 2), 0.0), std::polar(std::sin(theta / 2), phi)});
}

BlochVector PureRegister::bloch() const {
    if (num_qubits_ != 1) {
        throw std::invalid_argument("bloch: register must hold exactly one qubit");
    }
    Amplitude c = std::conj(amplitudes_[0]) * amplitudes_[1];
    return {2 * c.real(), 2 * c.imag(), std::norm(amplitudes_[0]) - std::norm(amplitudes_[1])};
}

std::string PureRegister::to_string() const {
    std::ostringstream out;
    out.precision(17);
    out << "[";
    for (std::size_t k = 0; k < amplitudes_.size(); k++) {
        if (k) {
            out << ", ";
        }
        out << "(" << amplitudes_[k].real() << "," << amplitudes_[k].imag() << ")";
    }
    out << "]";
    return out.str();
}

PureRegister tensor(const PureRegister &a, const PureRegister &b) {
    if (a.num_qubits() + b.num_qubits() > kMaxQubits) {
        throw std::invalid_argument("tensor: result would exceed 3 qubits");
    }
    std::vector<Amplitude> amps;
    amps.reserve(a.amplitudes().size() * b.amplitudes().size());
    for (const auto &x : a.amplitudes()) {
        for (const auto &y : b.amplitudes()) {
            amps.push_back(x * y);
        }
    }
    return PureRegister::from_amplitudes(std::move(amps));
}

MeasBasis MeasBasis::from_axis(const BlochVector &axis) {
    if (std::abs(axis.norm() - 1.0) > kAlgebraTolerance) {
        throw std::invalid_argument("MeasBasis: axis must be a unit vector");
    }
    auto plus = PureRegister::from_bloch(axis);
    auto minus = PureRegister::from_bloch(-axis);
    return MeasBasis(axis, {{{plus[0], plus[1]}, {minus[0], minus[1]}}});
}

MeasBasis MeasBasis::pauli(int index) {
    switch (index) {
        case 0:
            return from_axis({0, 0, 1});
        case 1:
            return from_axis({1, 0, 0});
        case 2:
            return from_axis({0, 1, 0});
        default:
            throw std::invalid_argument("MeasBasis::pauli: index must be 0, 1 or 2");
    }
}

PureRegister MeasBasis::state_register(int outcome) const {
    const auto &s = state(outcome);
    return PureRegister::from_amplitudes({s[0], s[1]});
}

const char *pauli_name(Pauli p) {
    switch (p) {
        case Pauli::I:
            return "I";
        case Pauli::X:
            return "X";
        case Pauli::Z:
            return "Z";
        case Pauli::XZ:
            return "XZ";
    }
    return "?";
}

const char *basis_action_name(BasisAction a) {
    switch (a) {
        case BasisAction::preserved_same:
            return "preserved_same";
        case BasisAction::preserved_flipped:
            return "preserved_flipped";
        case BasisAction::not_preserved:
            return "not_preserved";
    }
    return "?";
}

std::array<std::array<Amplitude, 4>, 4> bell_states() {
    const double h = kInvSqrt2;
    return {{
        {h, 0, 0, h},
        {0, h, h, 0},
        {h, 0, 0, -h},
        {0, h, -h, 0},
    }};
}

BlochVector sample_uniform_axis(Rng &rng) {
    double z = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    double phi = std::uniform_real_distribution<double>(0.0, 2 * std::numbers::pi)(rng);
    double r = std::sqrt(std::max(0.0, 1 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

PureRegister sample_uniform_bloch(Rng &rng) { return PureRegister::from_bloch(sample_uniform_axis(rng)); }

BlochVector canonical_hemisphere(BlochVector axis) {
    bool flip = axis.z < 0 || (axis.z == 0 && (axis.x < 0 || (axis.x == 0 && axis.y < 0)));
    return flip ? -axis : axis;
}

BlochVector sample_hemisphere_axis(Rng &rng) { return canonical_hemisphere(sample_uniform_axis(rng)); }

PureRegister make_singlet() { return PureRegister::from_amplitudes({0.0, kInvSqrt2, -kInvSqrt2, 0.0}); }

double outcome_probability(const PureRegister &reg, std::size_t qubit_index, const MeasBasis &basis, int outcome) {
    check_index(qubit_index, reg.num_qubits());
    const auto &e = basis.state(outcome);
    std::size_t n = reg.num_qubits();
    auto rest = project(reg, std::size_t{1} << qubit_index, 1, [&](std::size_t f) {
        return std::conj(e[bit_of(f, n, qubit_index)]);
    });
    return norm_squared(rest);
}

MeasureResult measure_qubit(PureRegister reg, std::size_t qubit_index, const MeasBasis &basis, Rng &rng) {
    check_index(qubit_index, reg.num_qubits());
    std::size_t n = reg.num_qubits();
    std::array<std::vector<Amplitude>, 2> rests;
    std::array<double, 2> probs{};
    for (int o = 0; o < 2; o++) {
        const auto &e = basis.state(o);
        rests[o] = project(reg, std::size_t{1} << qubit_index, 1, [&](std::size_t f) {
            return std::conj(e[bit_of(f, n, qubit_index)]);
        });
        probs[o] = norm_squared(rests[o]);
    }
    int outcome = static_cast<int>(sample_index(probs, rng));
    return {outcome, normalized_rest(std::move(rests[outcome]), probs[outcome])};
}

BellMeasureResult bell_measure(PureRegister reg, std::size_t q_a, std::size_t q_b, Rng &rng) {
    std::size_t n = reg.num_qubits();
    check_index(q_a, n);
    check_index(q_b, n);
    if (q_a == q_b) {
        throw std::invalid_argument("bell_measure: qubits must be distinct");
    }
    auto bells = bell_states();
    std::size_t mask = (std::size_t{1} << q_a) | (std::size_t{1} << q_b);
    std::array<std::vector<Amplitude>, 4> rests;
    std::array<double, 4> probs{};
    for (std::size_t k = 0; k < 4; k++) {
        rests[k] = project(reg, mask, 2, [&](std::size_t f) {
            return std::conj(bells[k][2 * bit_of(f, n, q_a) + bit_of(f, n, q_b)]);
        });
        probs[k] = norm_squared(rests[k]);
    }
    std::size_t k = sample_index(probs, rng);
    return {BellOutcome{static_cast<std::uint8_t>(k)}, normalized_rest(std::move(rests[k]), probs[k])};
}

Pauli correction_for(BellOutcome k) {
    // Singlet resource with sender pair (input, half) and receiver half.
    switch (k.bits & 3) {
        case 0:
            return Pauli::XZ;
        case 1:
            return Pauli::Z;
        case 2:
            return Pauli::X;
        default:
            return Pauli::I;
    }
}

PureRegister apply_pauli(PureRegister reg, std::size_t qubit_index, Pauli p) {
    std::size_t n = reg.num_qubits();
    check_index(qubit_index, n);
    std::vector<Amplitude> amps(reg.amplitudes().begin(), reg.amplitudes().end());
    std::size_t bit = std::size_t{1} << (n - 1 - qubit_index);
    if (p == Pauli::Z || p == Pauli::XZ) {
        for (std::size_t f = 0; f < amps.size(); f++) {
            if (f & bit) {
                amps[f] = -amps[f];
            }
        }
    }
    if (p == Pauli::X || p == Pauli::XZ) {
        for (std::size_t f = 0; f < amps.size(); f++) {
            if (!(f & bit)) {
                std::swap(amps[f], amps[f | bit]);
            }
        }
    }
    return PureRegister::from_amplitudes(std::move(amps));
}

BlochVector pauli_rotate(Pauli p, const BlochVector &v) {
    switch (p) {
        case Pauli::I:
            return v;
        case Pauli::X:
            return {v.x, -v.y, -v.z};
        case Pauli::Z:
            return {-v.x, -v.y, v.z};
        case Pauli::XZ:
            return {-v.x, v.y, -v.z};
    }
    return v;
}

BasisAction basis_action(Pauli p, const MeasBasis &basis) {
    BlochVector image = pauli_rotate(p, basis.axis());
    if (image.approx_equal(basis.axis())) {
        return BasisAction::preserved_same;
    }
    if (image.approx_equal(-basis.axis())) {
        return BasisAction::preserved_flipped;
    }
    return BasisAction::not_preserved;
}

bool projective_test(PureRegister reg, const PureRegister &target, Rng &rng) {
    if (reg.num_qubits() != 1 || target.num_qubits() != 1) {
        throw std::invalid_argument("projective_test: both registers must be single qubits");
    }
    double pass = fidelity(reg, target);
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < pass;
}

double fidelity(const PureRegister &a, const PureRegister &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    Amplitude overlap = 0;
    for (std::size_t k = 0; k < a.amplitudes().size(); k++) {
        overlap += std::conj(a[k]) * b[k];
    }
    return std::min(1.0, std::norm(overlap));
}

}  // namespace qtag
