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

#include "qtag/verdict.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace qtag {

namespace {

constexpr double kDeterministicTolerance = 1e-9;

bool delivery_has_kind(const DeliveryRecord &d, ExpectKind k) {
    if (k == ExpectKind::qubit) {
        return d.qubit.has_value();
    }
    return d.kind == PayloadKind::outcome_report;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

const char *failure_kind_name(FailureKind k) {
    switch (k) {
        case FailureKind::missing:
            return "missing";
        case FailureKind::mistimed:
            return "mistimed";
        case FailureKind::projective_fail:
            return "projective_fail";
        case FailureKind::outcome_mismatch:
            return "outcome_mismatch";
        case FailureKind::statistical:
            return "statistical";
    }
    return "?";
}

TimingResult check_timing(const Transcript &transcript, const SessionPlan &plan, const StationIds &stations,
                          const VerifierConfig &cfg) {
    TimingResult out;
    for (const auto &ex : plan.expected) {
        for (const auto &item : ex.items) {
            out.matches.push_back(Match{ex.round, item.station, item.kind, item.time, std::nullopt});
        }
    }

    // Candidate deliveries per (station, kind), in arrival order.
    std::map<std::pair<int, int>, std::vector<std::size_t>> candidates;
    for (std::size_t k = 0; k < transcript.deliveries.size(); k++) {
        const auto &d = transcript.deliveries[k];
        for (int station = 0; station < 2; station++) {
            if (d.agent != stations.of(station)) {
                continue;
            }
            for (ExpectKind kind : {ExpectKind::qubit, ExpectKind::outcome}) {
                if (delivery_has_kind(d, kind)) {
                    candidates[{station, static_cast<int>(kind)}].push_back(k);
                }
            }
        }
    }

    if (cfg.check_timing) {
        const double half = plan.config.period() / 2;
        std::vector<bool> used(transcript.deliveries.size(), false);
        for (auto &m : out.matches) {
            const auto &cands = candidates[{m.station, static_cast<int>(m.kind)}];
            std::optional<std::size_t> best;
            double best_gap = 0;
            for (std::size_t k : cands) {
                double delta = transcript.deliveries[k].time - m.expected_time;
                if (used[k] || delta < -half || delta >= half) {
                    continue;
                }
                if (!best || std::abs(delta) < best_gap) {
                    best = k;
                    best_gap = std::abs(delta);
                }
            }
            if (!best) {
                out.failures.push_back(
                    Failure{m.round, m.station, FailureKind::missing, "nothing arrived near t=" + fmt(m.expected_time),
                            std::nullopt});
                continue;
            }
            used[*best] = true;
            m.delivery = best;
            double delta = transcript.deliveries[*best].time - m.expected_time;
            if (std::abs(delta) > cfg.timing_tolerance) {
                out.failures.push_back(Failure{m.round, m.station, FailureKind::mistimed,
                                               "arrived at t=" + fmt(transcript.deliveries[*best].time) +
                                                   ", expected t=" + fmt(m.expected_time),
                                               delta});
            }
        }
        return out;
    }

    // Timing disabled: pair in order of expected time and arrival time.
    std::map<std::pair<int, int>, std::vector<std::size_t>> expectations;
    for (std::size_t k = 0; k < out.matches.size(); k++) {
        expectations[{out.matches[k].station, static_cast<int>(out.matches[k].kind)}].push_back(k);
    }
    for (auto &[key, idx] : expectations) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
            return out.matches[x].expected_time < out.matches[y].expected_time;
        });
        const auto &cands = candidates[key];
        for (std::size_t j = 0; j < idx.size(); j++) {
            Match &m = out.matches[idx[j]];
            if (j < cands.size()) {
                m.delivery = cands[j];
            } else {
                out.failures.push_back(
                    Failure{m.round, m.station, FailureKind::missing, "fewer deliveries than expected", std::nullopt});
            }
        }
    }
    return out;
}

std::vector<Failure> check_projective(const Transcript &transcript, const SessionPlan &plan,
                                      const TimingResult &timing, const StationIds &stations, QuantumStore &store,
                                      Rng &rng, ProjectiveTally *tally) {
    std::vector<Failure> failures;
    for (const auto &m : timing.matches) {
        if (m.kind != ExpectKind::qubit || !m.delivery) {
            continue;
        }
        const auto &target = plan.expected.at(static_cast<std::size_t>(m.round)).target;
        if (!target) {
            throw std::logic_error("check_projective: qubit expectation without a target state");
        }
        QubitHandle h = *transcript.deliveries[*m.delivery].qubit;
        AgentId station = stations.of(m.station);
        bool pass = false;
        if (store.is_live(h) && store.owner(h).agent == station && store.owner(h).state == OwnerState::stored) {
            pass = store.projective_test(h, station, *target, rng);
        }
        if (tally) {
            tally->tests++;
            tally->passes += pass ? 1 : 0;
        }
        if (!pass) {
            failures.push_back(Failure{m.round, m.station, FailureKind::projective_fail,
                                       "qubit failed the projective test", std::nullopt});
        }
    }
    return failures;
}

double poisson_binomial_two_sided(const std::vector<double> &p, long k) {
    std::vector<double> pmf(p.size() + 1, 0.0);
    pmf[0] = 1;
    for (std::size_t i = 0; i < p.size(); i++) {
        for (std::size_t j = i + 1; j > 0; j--) {
            pmf[j] = pmf[j] * (1 - p[i]) + pmf[j - 1] * p[i];
        }
        pmf[0] *= 1 - p[i];
    }
    if (k < 0 || k > static_cast<long>(p.size())) {
        return 0;
    }
    double lower = 0;
    double upper = 0;
    for (std::size_t j = 0; j < pmf.size(); j++) {
        if (static_cast<long>(j) <= k) lower += pmf[j];
        if (static_cast<long>(j) >= k) upper += pmf[j];
    }
    return std::min(1.0, 2 * std::min(lower, upper));
}

StatReport check_statistics(const Transcript &transcript, const SessionPlan &plan, const TimingResult &timing,
                            const StatTestConfig &cfg, std::vector<Failure> *failures) {
    if (cfg.bins < 1) {
        throw std::invalid_argument("check_statistics: need at least one bin");
    }
    StatReport report;
    std::map<int, RoundOutcome> rounds;
    for (const auto &m : timing.matches) {
        if (m.kind != ExpectKind::outcome) {
            continue;
        }
        RoundOutcome &ro = rounds[m.round];
        ro.round = m.round;
        ro.p0 = plan.expected.at(static_cast<std::size_t>(m.round)).p0.value_or(0.5);
        if (!m.delivery) {
            continue;
        }
        int bit = std::get<OutcomeReport>(*transcript.deliveries[*m.delivery].classical).bit;
        (m.station == 0 ? ro.bit0 : ro.bit1) = bit;
    }

    auto fail = [&](Failure f) {
        report.pass = false;
        if (failures) failures->push_back(std::move(f));
    };

    std::vector<std::vector<double>> bin_p(static_cast<std::size_t>(cfg.bins));
    std::vector<long> bin_zeros(static_cast<std::size_t>(cfg.bins), 0);
    for (auto &[round, ro] : rounds) {
        report.outcomes.push_back(ro);
        if (ro.bit0 && ro.bit1 && *ro.bit0 != *ro.bit1) {
            fail(Failure{round, -1, FailureKind::outcome_mismatch,
                         "A0 saw " + std::to_string(*ro.bit0) + ", A1 saw " + std::to_string(*ro.bit1), std::nullopt});
        }
        std::optional<int> bit = ro.bit0 ? ro.bit0 : ro.bit1;
        if (!bit) {
            continue;
        }
        if (ro.p0 >= 1 - kDeterministicTolerance || ro.p0 <= kDeterministicTolerance) {
            report.deterministic_rounds++;
            int forced = ro.p0 >= 0.5 ? 0 : 1;
            if (*bit != forced) {
                report.deterministic_violations++;
                fail(Failure{round, -1, FailureKind::statistical,
                             "outcome " + std::to_string(*bit) + " has probability zero", std::nullopt});
            }
            continue;
        }
        auto b = static_cast<std::size_t>(std::min(cfg.bins - 1, static_cast<int>(ro.p0 * cfg.bins)));
        bin_p[b].push_back(ro.p0);
        bin_zeros[b] += *bit == 0 ? 1 : 0;
    }

    long nonempty = std::count_if(bin_p.begin(), bin_p.end(), [](const auto &v) { return !v.empty(); });
    report.threshold = nonempty > 0 ? cfg.alpha / static_cast<double>(nonempty) : cfg.alpha;
    for (std::size_t b = 0; b < bin_p.size(); b++) {
        BinReport br;
        br.lo = static_cast<double>(b) / cfg.bins;
        br.hi = static_cast<double>(b + 1) / cfg.bins;
        br.rounds = static_cast<long>(bin_p[b].size());
        br.zeros = bin_zeros[b];
        for (double p : bin_p[b]) br.expected_zeros += p;
        if (br.rounds > 0) {
            br.p_value = poisson_binomial_two_sided(bin_p[b], br.zeros);
            br.pass = br.p_value >= report.threshold;
            if (!br.pass) {
                fail(Failure{-1, -1, FailureKind::statistical,
                             "bin [" + fmt(br.lo) + ", " + fmt(br.hi) + "): " + std::to_string(br.zeros) + " zeros of " +
                                 std::to_string(br.rounds) + ", expected " + fmt(br.expected_zeros) +
                                 ", p=" + fmt(br.p_value),
                             std::nullopt});
            }
        }
        report.bins.push_back(br);
    }
    return report;
}

long Verdict::count(FailureKind k) const {
    return std::count_if(failures.begin(), failures.end(), [k](const Failure &f) { return f.kind == k; });
}

Verdict verify(const Transcript &transcript, const SessionPlan &plan, const StationIds &stations,
               QuantumStore &store, const VerifierConfig &cfg, Rng &rng) {
    Verdict v;
    TimingResult timing = check_timing(transcript, plan, stations, cfg);
    v.failures = timing.failures;
    auto proj = check_projective(transcript, plan, timing, stations, store, rng, &v.projective);
    v.failures.insert(v.failures.end(), proj.begin(), proj.end());
    v.stats = check_statistics(transcript, plan, timing, cfg.stats, &v.failures);
    v.accept = v.failures.empty();
    return v;
}

Interval wilson_interval(long successes, long trials) {
    if (trials <= 0) {
        return {0, 1};
    }
    const double z = 1.96;
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double denom = 1 + z * z / n;
    double centre = (p + z * z / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace qtag
