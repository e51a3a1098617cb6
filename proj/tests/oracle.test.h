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

// Reference computations written directly from textbook formulas with plain
// 2x2 matrices and explicit vectors. Nothing here calls into the library, so
// the tests can hold the library to these values.

#ifndef QTAG_TESTS_ORACLE_TEST_H
#define QTAG_TESTS_ORACLE_TEST_H

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using C = std::complex<double>;
using Vec2 = std::array<C, 2>;
using Vec4 = std::array<C, 4>;
using Mat2 = std::array<std::array<C, 2>, 2>;

struct Axis {
    double x, y, z;
};

inline Mat2 mul(const Mat2 &a, const Mat2 &b) {
    Mat2 r{};
    for (int i = 0; i < 2; i++)
        for (int j = 0; j < 2; j++)
            for (int k = 0; k < 2; k++) r[i][j] += a[i][k] * b[k][j];
    return r;
}

inline Vec2 act(const Mat2 &m, const Vec2 &v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline const Mat2 kI{{{1, 0}, {0, 1}}};
inline const Mat2 kX{{{0, 1}, {1, 0}}};
inline const Mat2 kZ{{{1, 0}, {0, -1}}};
/// Index order I, X, Z, XZ (the product X times Z).
inline Mat2 pauli(int index) {
    switch (index) {
        case 1:
            return kX;
        case 2:
            return kZ;
        case 3:
            return mul(kX, kZ);
        default:
            return kI;
    }
}

inline C inner(const Vec2 &a, const Vec2 &b) { return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]; }

inline double overlap(const Vec2 &a, const Vec2 &b) { return std::norm(inner(a, b)); }

/// Spin-up state along the axis: cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
inline Vec2 state_along(Axis n) {
    double r = std::sqrt(n.x * n.x + n.y * n.y + n.z * n.z);
    double theta = std::acos(std::clamp(n.z / r, -1.0, 1.0));
    double phi = std::atan2(n.y, n.x);
    return {C(std::cos(theta / 2), 0), std::polar(std::sin(theta / 2), phi)};
}

inline Axis bloch_of(const Vec2 &v) {
    C rho01 = v[0] * std::conj(v[1]);
    return {2 * rho01.real(), -2 * rho01.imag(), std::norm(v[0]) - std::norm(v[1])};
}

inline Axis random_axis(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    double x = g(rng), y = g(rng), z = g(rng);
    double r = std::sqrt(x * x + y * y + z * z);
    return {x / r, y / r, z / r};
}

/// Bell basis on (first, second) qubits with index 2*b1 + b0 for bits
/// (b0: X-type parity, b1: phase): 0 Phi+, 1 Psi+, 2 Phi-, 3 Psi-.
inline Vec4 bell(int k) {
    const double h = 1 / std::sqrt(2.0);
    switch (k) {
        case 0:
            return {h, 0, 0, h};
        case 1:
            return {0, h, h, 0};
        case 2:
            return {h, 0, 0, -h};
        default:
            return {0, h, -h, 0};
    }
}

/// Teleport `psi` (qubit 0) through a singlet on qubits (1, 2), projecting
/// qubits (0, 1) onto Bell state k. Returns the outcome probability and the
/// normalized state left on qubit 2.
struct Conditional {
    double probability;
    Vec2 state;
};
inline Conditional teleport_conditional(const Vec2 &psi, int k) {
    const double h = 1 / std::sqrt(2.0);
    // |psi>|singlet>, index = 4*q0 + 2*q1 + q2.
    std::array<C, 8> full{};
    for (int q0 = 0; q0 < 2; q0++) {
        full[4 * q0 + 0 + 1] = psi[q0] * h;
        full[4 * q0 + 2 + 0] = -psi[q0] * h;
    }
    Vec4 b = bell(k);
    Vec2 out{0, 0};
    for (int q2 = 0; q2 < 2; q2++) {
        for (int j = 0; j < 4; j++) {
            out[q2] += std::conj(b[j]) * full[2 * j + q2];
        }
    }
    double p = std::norm(out[0]) + std::norm(out[1]);
    double s = std::sqrt(p);
    return {p, {out[0] / s, out[1] / s}};
}

/// 0: P maps the basis to itself keeping outcomes, 1: swapping them, 2: neither.
inline int conjugation_action(const Mat2 &p, Axis axis) {
    Axis moved = bloch_of(act(p, state_along(axis)));
    auto near = [](Axis a, Axis b) {
        return std::abs(a.x - b.x) < 1e-9 && std::abs(a.y - b.y) < 1e-9 && std::abs(a.z - b.z) < 1e-9;
    };
    double r = std::sqrt(axis.x * axis.x + axis.y * axis.y + axis.z * axis.z);
    Axis unit{axis.x / r, axis.y / r, axis.z / r};
    if (near(moved, unit)) return 0;
    if (near(moved, {-unit.x, -unit.y, -unit.z})) return 1;
    return 2;
}

}  // namespace oracle

#endif
