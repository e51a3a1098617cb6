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

#include "qtag/report.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

namespace qtag {

namespace {

std::string trim(const std::string &s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(trim(cur));
    }
    return out;
}

double parse_real(const std::string &text, const std::string &what) {
    const char *begin = text.c_str();
    char *end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(what + ": malformed number '" + text + "'");
    }
    return v;
}

long long parse_int(const std::string &text, const std::string &what, long long lo) {
    const char *begin = text.c_str();
    char *end = nullptr;
    errno = 0;
    long long v = std::strtoll(begin, &end, 10);
    if (text.empty() || end != begin + text.size() || errno == ERANGE) {
        throw ConfigError(what + ": malformed integer '" + text + "'");
    }
    if (v < lo) {
        throw ConfigError(what + ": must be at least " + std::to_string(lo));
    }
    return v;
}

std::uint64_t parse_u64(const std::string &text, const std::string &what) {
    const char *begin = text.c_str();
    char *end = nullptr;
    errno = 0;
    unsigned long long v = std::strtoull(begin, &end, 0);
    if (text.empty() || text[0] == '-' || end != begin + text.size() || errno == ERANGE) {
        throw ConfigError(what + ": malformed seed '" + text + "'");
    }
    return v;
}

bool parse_switch(const std::string &text, const std::string &what) {
    if (text == "on" || text == "true" || text == "1") return true;
    if (text == "off" || text == "false" || text == "0") return false;
    throw ConfigError(what + ": expected on or off, got '" + text + "'");
}

std::string fmt(double v, const char *f = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> sample_transcript(const SessionResult &r, int rounds) {
    std::vector<std::string> out;
    const auto &names = r.transcript.agent_names;
    for (const auto &d : r.transcript.deliveries) {
        if (d.round < 0 || d.round >= rounds) {
            continue;
        }
        std::string line = "t=" + fmt(d.time, "%.9g") + " " + names.at(d.agent) + " <- " +
                           (d.origin < names.size() ? names[d.origin] : std::string("?")) + " " +
                           direction_name(d.direction) + " r" + std::to_string(d.round) + " ";
        line += d.classical ? summarize(*d.classical) : std::string(kind_name(d.kind));
        if (d.absorbed) {
            line += " [absorbed]";
        }
        out.push_back(std::move(line));
    }
    return out;
}

SessionSpec row_spec(const RunSpec &spec, SchemeId scheme, AdversaryKind adversary) {
    SessionSpec s = spec.session;
    s.scheme.scheme = scheme;
    s.adversary.kind = adversary;
    return s;
}

}  // namespace

void parse_geometry(const std::string &text, Geometry &g, AdversaryConfig &adv) {
    for (const auto &part : split(text, ',')) {
        if (part.empty()) {
            continue;
        }
        auto eq = part.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("geometry: expected key=value, got '" + part + "'");
        }
        std::string key = trim(part.substr(0, eq));
        double v = parse_real(trim(part.substr(eq + 1)), "geometry " + key);
        if (key == "a0") {
            g.a0 = v;
        } else if (key == "t" || key == "t_plus") {
            g.t_plus = v;
        } else if (key == "a1") {
            g.a1 = v;
        } else if (key == "e0") {
            adv.e0 = v;
        } else if (key == "e1") {
            adv.e1 = v;
        } else {
            throw ConfigError("geometry: unknown key '" + key + "'");
        }
    }
}

std::vector<std::vector<int>> parse_route_table(const std::string &text) {
    std::vector<std::vector<int>> table;
    for (const auto &row : split(text, ';')) {
        std::vector<int> r;
        for (char c : row) {
            if (c == '0' || c == '1') {
                r.push_back(c - '0');
            } else if (c != ' ' && c != ',') {
                throw ConfigError("f-table: entries must be 0 or 1, got '" + std::string(1, c) + "'");
            }
        }
        if (r.empty()) {
            throw ConfigError("f-table: empty row");
        }
        table.push_back(std::move(r));
    }
    if (table.empty()) {
        throw ConfigError("f-table: empty table");
    }
    return table;
}

void apply_setting(RunSpec &spec, const std::string &key, const std::string &value, const std::string &context) {
    const std::string what = context.empty() ? key : context;
    auto &sc = spec.session.scheme;
    auto &adv = spec.session.adversary;
    try {
        if (key == "scheme") {
            spec.schemes.clear();
            for (const auto &s : split(value, ',')) {
                if (s == "all") {
                    spec.schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));
                    continue;
                }
                auto id = parse_scheme(s);
                if (!id) throw ConfigError(what + ": unknown scheme '" + s + "'");
                spec.schemes.push_back(*id);
            }
        } else if (key == "adversary") {
            spec.adversaries.clear();
            for (const auto &s : split(value, ',')) {
                if (s == "all") {
                    spec.adversaries.assign(std::begin(kAllAdversaries), std::end(kAllAdversaries));
                    continue;
                }
                auto k = parse_adversary(s);
                if (!k) throw ConfigError(what + ": unknown adversary '" + s + "'");
                spec.adversaries.push_back(*k);
            }
        } else if (key == "rounds") {
            sc.rounds = static_cast<int>(parse_int(value, what, 1));
        } else if (key == "seed") {
            spec.seed = parse_u64(value, what);
        } else if (key == "trials") {
            spec.trials = static_cast<long>(parse_int(value, what, 1));
        } else if (key == "geometry") {
            parse_geometry(value, sc.geometry, adv);
        } else if (key == "tau") {
            sc.round_period = parse_real(value, what);
        } else if (key == "m") {
            sc.m = static_cast<int>(parse_int(value, what, 1));
        } else if (key == "n") {
            sc.n = static_cast<int>(parse_int(value, what, 1));
        } else if (key == "f-table") {
            sc.route_table = parse_route_table(value);
        } else if (key == "alpha") {
            double a = parse_real(value, what);
            if (!(a > 0 && a < 1)) throw ConfigError(what + ": alpha must lie in (0, 1)");
            spec.session.verifier.stats.alpha = a;
        } else if (key == "bins") {
            spec.session.verifier.stats.bins = static_cast<int>(parse_int(value, what, 1));
        } else if (key == "timing") {
            spec.session.verifier.check_timing = parse_switch(value, what);
        } else if (key == "replay-delay") {
            adv.replay_delay = parse_real(value, what);
        } else if (key == "tag") {
            if (value == "auto") {
                spec.session.tag_on.reset();
            } else {
                spec.session.tag_on = parse_switch(value, what);
            }
        } else if (key == "singlets") {
            adv.singlets_per_round = static_cast<int>(parse_int(value, what, 0));
        } else if (key == "transcript-rounds") {
            spec.transcript_rounds = static_cast<int>(parse_int(value, what, 0));
        } else if (key == "json") {
            spec.json_path = value;
        } else if (key == "csv") {
            spec.csv_path = value;
        } else {
            throw ConfigError(what + ": unknown setting '" + key + "'");
        }
    } catch (const ConfigError &e) {
        std::string msg = e.what();
        if (!context.empty() && msg.rfind(context, 0) != 0) {
            msg = context + ": " + msg;
        }
        throw ConfigError(msg);
    }
}

void load_config_file(const std::string &path, RunSpec &spec) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open config file");
    }
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        std::string ctx = path + ":" + std::to_string(lineno);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(ctx + ": expected key=value");
        }
        apply_setting(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), ctx);
    }
}

void finalize(RunSpec &spec, std::vector<std::string> *warnings) {
    if (spec.schemes.empty()) {
        spec.schemes.push_back(spec.session.scheme.scheme);
    }
    if (spec.adversaries.empty()) {
        spec.adversaries.push_back(spec.session.adversary.kind);
    }
    bool has_ii = false;
    for (SchemeId s : spec.schemes) {
        has_ii = has_ii || s == SchemeId::II;
    }
    if (has_ii && spec.session.scheme.route_table.empty() && warnings) {
        warnings->push_back("Scheme II: no f-table given, using f(a, b) = (a + b) mod 2");
    }
    for (SchemeId s : spec.schemes) {
        for (AdversaryKind a : spec.adversaries) {
            SessionSpec row = row_spec(spec, s, a);
            try {
                row.scheme.validate();
                if (applicable(a, s)) {
                    row.adversary.validate(row.scheme);
                }
            } catch (const std::invalid_argument &e) {
                throw ConfigError(std::string("scheme ") + scheme_name(s) + " / " + adversary_name(a) + ": " +
                                  e.what());
            }
        }
    }
}

Report run_matrix(const RunSpec &spec, std::vector<std::string> warnings) {
    Report report;
    report.spec = spec;
    report.generated_at = utc_now();
    report.warnings = std::move(warnings);
    for (SchemeId s : spec.schemes) {
        for (AdversaryKind a : spec.adversaries) {
            ReportRow row;
            row.scheme = s;
            row.adversary = a;
            row.applicable = applicable(a, s, &row.reason);
            SessionSpec session = row_spec(spec, s, a);
            row.tag_on = session.tag_powered();
            if (!row.applicable) {
                report.rows.push_back(std::move(row));
                continue;
            }
            try {
                row.estimate = estimate_spoof_rate(session, spec.trials, spec.seed, [&](long t, const SessionResult &r) {
                    if (t == 0) {
                        row.transcript_sample = sample_transcript(r, spec.transcript_rounds);
                    }
                });
            } catch (const std::exception &e) {
                report.partial = true;
                report.error = std::string("scheme ") + scheme_name(s) + " / " + adversary_name(a) + ": " + e.what();
                return report;
            }
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

nlohmann::json to_json(const Report &r) {
    using nlohmann::json;
    const auto &ss = r.spec.session;
    const auto &g = ss.scheme.geometry;
    json config;
    config["seed"] = r.spec.seed;
    config["seed_rule"] = "splitmix64(splitmix64(seed ^ fnv1a(stream)) + trial), streams plan/physics/eve/verifier";
    config["trials"] = r.spec.trials;
    config["rounds"] = ss.scheme.rounds;
    config["geometry"] = {{"a0", g.a0},
                          {"t", g.t_plus},
                          {"a1", g.a1},
                          {"e0", ss.adversary.e0_or_default(g)},
                          {"e1", ss.adversary.e1_or_default(g)}};
    config["tau"] = ss.scheme.period();
    config["m"] = ss.scheme.m;
    config["n"] = ss.scheme.n;
    config["f_table"] = ss.scheme.route_table.empty() ? default_route_table(ss.scheme.m, ss.scheme.n)
                                                      : ss.scheme.route_table;
    config["alpha"] = ss.verifier.stats.alpha;
    config["bins"] = ss.verifier.stats.bins;
    config["timing"] = ss.verifier.check_timing;
    config["timing_tolerance"] = ss.verifier.timing_tolerance;
    config["replay_delay"] = ss.adversary.replay_delay;
    config["singlets"] = ss.adversary.singlets_per_round;
    config["tag"] = ss.tag_on ? (*ss.tag_on ? "on" : "off") : "auto";
    config["transcript_rounds"] = r.spec.transcript_rounds;
    json schemes = json::array();
    for (auto s : r.spec.schemes) schemes.push_back(scheme_name(s));
    json adversaries = json::array();
    for (auto a : r.spec.adversaries) adversaries.push_back(adversary_name(a));
    config["schemes"] = schemes;
    config["adversaries"] = adversaries;

    json rows = json::array();
    for (const auto &row : r.rows) {
        json j;
        j["scheme"] = scheme_name(row.scheme);
        j["adversary"] = adversary_name(row.adversary);
        j["applicable"] = row.applicable;
        j["tag_on"] = row.tag_on;
        if (!row.applicable) {
            j["reason"] = row.reason;
            rows.push_back(j);
            continue;
        }
        const auto &e = row.estimate;
        j["trials"] = e.trials;
        j["accepts"] = e.accepts;
        j["p_hat"] = e.p_hat;
        j["ci95"] = {e.ci.lo, e.ci.hi};
        auto dom = e.dominant_failure();
        j["dominant_failure"] = dom ? failure_kind_name(*dom) : "none";
        json with = json::object();
        json totals = json::object();
        for (auto [k, n] : e.sessions_with) with[failure_kind_name(k)] = n;
        for (auto [k, n] : e.failure_totals) totals[failure_kind_name(k)] = n;
        j["sessions_with_failure"] = with;
        j["failure_totals"] = totals;
        json hist = json::array();
        for (auto [late, n] : e.lateness_histogram) hist.push_back({late, n});
        j["lateness_histogram"] = hist;
        j["projective"] = {{"tests", e.projective.tests}, {"passes", e.projective.passes}};
        j["statistics"] = {{"bins_failed", e.statistical_bins_failed},
                           {"deterministic_violations", e.deterministic_violations}};
        j["adversary_stats"] = {{"singlets_installed", e.adversary.singlets_installed},
                                {"teleportations", e.adversary.teleportations},
                                {"inference_rounds", e.adversary.inference_rounds},
                                {"inexact_inferences", e.adversary.inexact_inferences},
                                {"replayed_signals", e.adversary.replayed_signals},
                                {"destroyed_qubits", e.adversary.destroyed_qubits}};
        j["transcript_sample"] = row.transcript_sample;
        rows.push_back(j);
    }

    json out;
    out["schema_version"] = kReportSchemaVersion;
    out["generated_at"] = r.generated_at;
    out["partial"] = r.partial;
    if (r.partial) {
        out["error"] = r.error;
    }
    out["warnings"] = r.warnings;
    out["config"] = config;
    out["rows"] = rows;
    return out;
}

std::string text_table(const Report &r) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-6s %-20s %-4s %7s %7s %8s %-19s %s\n", "scheme", "adversary", "tag", "N",
                  "trials", "p_hat", "ci95", "dominant_failure");
    out << buf;
    for (const auto &row : r.rows) {
        if (!row.applicable) {
            std::snprintf(buf, sizeof(buf), "%-6s %-20s %-4s %7s %7s %8s %-19s %s\n", scheme_name(row.scheme),
                          adversary_name(row.adversary), "-", "-", "-", "n/a", "-", row.reason.c_str());
            out << buf;
            continue;
        }
        const auto &e = row.estimate;
        auto dom = e.dominant_failure();
        std::string ci = "[" + fmt(e.ci.lo) + ", " + fmt(e.ci.hi) + "]";
        std::snprintf(buf, sizeof(buf), "%-6s %-20s %-4s %7d %7ld %8.4f %-19s %s\n", scheme_name(row.scheme),
                      adversary_name(row.adversary), row.tag_on ? "on" : "off", r.spec.session.scheme.rounds, e.trials,
                      e.p_hat, ci.c_str(), dom ? failure_kind_name(*dom) : "none");
        out << buf;
    }
    if (r.partial) {
        out << "PARTIAL: " << r.error << "\n";
    }
    return out.str();
}

std::string csv_table(const Report &r) {
    std::ostringstream out;
    out << "scheme,adversary,tag,rounds,trials,accepts,p_hat,ci_lo,ci_hi,dominant_failure\n";
    for (const auto &row : r.rows) {
        out << scheme_name(row.scheme) << ',' << adversary_name(row.adversary) << ',';
        if (!row.applicable) {
            out << "-,-,-,-,n/a,-,-,\"" << row.reason << "\"\n";
            continue;
        }
        const auto &e = row.estimate;
        auto dom = e.dominant_failure();
        out << (row.tag_on ? "on" : "off") << ',' << r.spec.session.scheme.rounds << ',' << e.trials << ','
            << e.accepts << ',' << fmt(e.p_hat, "%.6g") << ',' << fmt(e.ci.lo, "%.6g") << ',' << fmt(e.ci.hi, "%.6g")
            << ',' << (dom ? failure_kind_name(*dom) : "none") << '\n';
    }
    return out.str();
}

}  // namespace qtag
