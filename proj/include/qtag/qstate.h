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

#ifndef QTAG_QSTATE_H
#define QTAG_QSTATE_H

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qtag {

using Amplitude = std::complex<double>;

/// Explicit random source. Every stochastic operation takes one; there is no
/// hidden global randomness anywhere in the library.
using Rng = std::mt19937_64;

inline constexpr double kAlgebraTolerance = 1e-9;
inline constexpr std::size_t kMaxQubits = 3;

struct BlochVector {
    double x = 0;
    double y = 0;
    double z = 1;

    double dot(const BlochVector &other) const { return x * other.x + y * other.y + z * other.z; }
    double norm() const;
    BlochVector operator-() const { return {-x, -y, -z}; }
    bool approx_equal(const BlochVector &other, double tol = kAlgebraTolerance) const;
};

/// Normalized state vector over 1 to 3 qubits. Qubit 0 is the most significant
/// bit of the amplitude index, so amplitudes are in |q0 q1 q2> order.
///
/// Operations that measure a register take it by value and return the
/// successor; a measured qubit is factored out and the register shrinks.
class PureRegister {
   public:
    /// |0> on one qubit.
    PureRegister() : num_qubits_(1), amplitudes_{1.0, 0.0} {}

    static PureRegister from_amplitudes(std::vector<Amplitude> amplitudes);
    static PureRegister basis_state(std::size_t num_qubits, std::size_t index);
    /// Single qubit pointing along the given Bloch axis (need not be unit; it is normalized).
    static PureRegister from_bloch(const BlochVector &axis);

    std::size_t num_qubits() const { return num_qubits_; }
    std::span<const Amplitude> amplitudes() const { return amplitudes_; }
    const Amplitude &operator[](std::size_t k) const { return amplitudes_[k]; }

    /// Bloch vector of a single-qubit register.
    BlochVector bloch() const;

    /// Debug dump as a list of (re,im) pairs.
    std::string to_string() const;

   private:
    PureRegister(std::size_t n, std::vector<Amplitude> amps) : num_qubits_(n), amplitudes_(std::move(amps)) {}

    std::size_t num_qubits_;
    std::vector<Amplitude> amplitudes_;
};

PureRegister tensor(const PureRegister &a, const PureRegister &b);

/// Two-outcome projective measurement on one qubit. Outcome 0 is the +axis
/// eigenstate, outcome 1 the -axis eigenstate.
class MeasBasis {
   public:
    static MeasBasis from_axis(const BlochVector &axis);
    /// B0 = {|0>,|1>}, B1 = {|+>,|->}, B2 = {|i>,|-i>}.
    static MeasBasis pauli(int index);

    const BlochVector &axis() const { return axis_; }
    /// Eigenstate for the given outcome (0 or 1).
    const std::array<Amplitude, 2> &state(int outcome) const { return states_[outcome & 1]; }
    PureRegister state_register(int outcome) const;

   private:
    MeasBasis(BlochVector axis, std::array<std::array<Amplitude, 2>, 2> states)
        : axis_(axis), states_(states) {}
    BlochVector axis_;
    std::array<std::array<Amplitude, 2>, 2> states_;
};

enum class Pauli : std::uint8_t { I, X, Z, XZ };

const char *pauli_name(Pauli p);

/// One of the four Bell states. Bit 0 is the parity bit (|01>,|10> support),
/// bit 1 the phase bit:
///   0: (|00>+|11>)/sqrt2   1: (|01>+|10>)/sqrt2
///   2: (|00>-|11>)/sqrt2   3: (|01>-|10>)/sqrt2 (singlet)
struct BellOutcome {
    std::uint8_t bits = 0;
    friend bool operator==(BellOutcome, BellOutcome) = default;
};

/// The four Bell states as 2-qubit amplitude vectors indexed by BellOutcome::bits.
std::array<std::array<Amplitude, 4>, 4> bell_states();

enum class BasisAction : std::uint8_t { preserved_same, preserved_flipped, not_preserved };

const char *basis_action_name(BasisAction a);

struct MeasureResult {
    int outcome = 0;
    /// Remaining qubits, in original order with the measured one removed; empty
    /// when the input had a single qubit.
    std::optional<PureRegister> rest;
};

struct BellMeasureResult {
    BellOutcome outcome;
    std::optional<PureRegister> rest;
};

PureRegister sample_uniform_bloch(Rng &rng);
BlochVector sample_uniform_axis(Rng &rng);
/// Uniform axis folded onto the z >= 0 hemisphere (ties toward x >= 0, then y >= 0).
BlochVector sample_hemisphere_axis(Rng &rng);
BlochVector canonical_hemisphere(BlochVector axis);

PureRegister make_singlet();

/// Born probability that measuring qubit `qubit_index` in `basis` yields `outcome`.
double outcome_probability(const PureRegister &reg, std::size_t qubit_index, const MeasBasis &basis, int outcome);

MeasureResult measure_qubit(PureRegister reg, std::size_t qubit_index, const MeasBasis &basis, Rng &rng);
BellMeasureResult bell_measure(PureRegister reg, std::size_t q_a, std::size_t q_b, Rng &rng);

/// The Pauli that restores the teleported state on the receiving half of a
/// singlet after the sender observes Bell outcome `k`.
Pauli correction_for(BellOutcome k);

PureRegister apply_pauli(PureRegister reg, std::size_t qubit_index, Pauli p);

/// Image of a Bloch vector under conjugation by the Pauli.
BlochVector pauli_rotate(Pauli p, const BlochVector &v);
BasisAction basis_action(Pauli p, const MeasBasis &basis);

/// Passes with probability |<target|reg>|^2. Consumes `reg`.
bool projective_test(PureRegister reg, const PureRegister &target, Rng &rng);

double fidelity(const PureRegister &a, const PureRegister &b);

}  // namespace qtag

#endif
