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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "qtag/report.h"

namespace {

struct Flags {
    std::string config;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option *> options;
    bool no_timing = false;
};

void add_common(CLI::App *app, Flags &f) {
    app->add_option("--config", f.config, "key=value config file, applied before the flags");
    auto add = [&](const std::string &key, const std::string &help) {
        f.options[key] = app->add_option("--" + key, f.values[key], help);
    };
    add("scheme", "I..VI (comma list or 'all' for matrix)");
    add("adversary", "strategy name (comma list or 'all' for matrix)");
    add("rounds", "rounds per session (N)");
    add("seed", "master seed (default: $QTAG_SEED or built-in)");
    add("trials", "independent sessions per row");
    add("geometry", "a0=..,t=..,a1=..,e0=..,e1=..");
    add("tau", "round period (0 = 4 * (a1 - a0))");
    add("m", "Scheme II left alphabet size");
    add("n", "Scheme II right alphabet size");
    add("f-table", "Scheme II routing table, rows separated by ';', e.g. 01;10");
    add("alpha", "statistical significance");
    add("bins", "probability bins for the statistical test");
    add("replay-delay", "record_replay re-emission delay");
    add("tag", "on, off or auto");
    add("singlets", "singlets installed per round (0 = strategy requirement)");
    add("transcript-rounds", "rounds included in the report's transcript sample");
    add("json", "write the JSON report to this path ('-' for stdout)");
    add("csv", "write the summary table as CSV to this path");
    app->add_flag("--no-timing", f.no_timing, "disable timing checks in the verifier");
}

qtag::RunSpec build_spec(const Flags &f, std::vector<std::string> &warnings, bool matrix) {
    qtag::RunSpec spec;
    if (const char *env = std::getenv("QTAG_SEED"); env && *env) {
        qtag::apply_setting(spec, "seed", env, "QTAG_SEED");
    }
    if (matrix) {
        spec.schemes.assign(std::begin(qtag::kAllSchemes), std::end(qtag::kAllSchemes));
        spec.adversaries.assign(std::begin(qtag::kAllAdversaries), std::end(qtag::kAllAdversaries));
    }
    if (!f.config.empty()) {
        qtag::load_config_file(f.config, spec);
    }
    for (const auto &[key, opt] : f.options) {
        if (opt->count() > 0) {
            qtag::apply_setting(spec, key, f.values.at(key), "--" + key);
        }
    }
    if (f.no_timing) {
        spec.session.verifier.check_timing = false;
    }
    qtag::finalize(spec, &warnings);
    return spec;
}

bool write_file(const std::string &path, const std::string &text) {
    if (path == "-") {
        std::cout << text;
        return true;
    }
    std::ofstream out(path);
    out << text;
    return static_cast<bool>(out);
}

int emit_report(const qtag::Report &report) {
    bool json_on_stdout = report.spec.json_path == "-" || report.spec.csv_path == "-";
    (json_on_stdout ? std::cerr : std::cout) << qtag::text_table(report);
    bool ok = true;
    if (!report.spec.json_path.empty()) {
        ok = write_file(report.spec.json_path, qtag::to_json(report).dump(2) + "\n") && ok;
    }
    if (!report.spec.csv_path.empty()) {
        ok = write_file(report.spec.csv_path, qtag::csv_table(report)) && ok;
    }
    if (!ok) {
        std::cerr << "error: failed to write an output file\n";
        return 1;
    }
    if (report.partial) {
        std::cerr << "error: " << report.error << "\n";
        return 1;
    }
    return 0;
}

int run_transcript(const qtag::RunSpec &spec) {
    qtag::SessionSpec session = spec.session;
    session.scheme.scheme = spec.schemes.front();
    session.adversary.kind = spec.adversaries.front();
    std::string reason;
    if (!qtag::applicable(session.adversary.kind, session.scheme.scheme, &reason)) {
        std::cerr << "error: " << reason << "\n";
        return 2;
    }
    session.invariant_checks = true;
    qtag::SessionResult r = qtag::run_session(session, spec.seed, 0);
    std::cout << r.transcript.to_text();
    std::cout << "verdict: " << (r.verdict.accept ? "accept" : "reject") << "\n";
    for (const auto &fail : r.verdict.failures) {
        std::cout << "  round " << fail.round << " station " << fail.station << " "
                  << qtag::failure_kind_name(fail.kind) << ": " << fail.detail << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qtag: quantum tagging protocol simulator"};
    app.require_subcommand(1);
    Flags run_flags, matrix_flags, transcript_flags;
    CLI::App *run = app.add_subcommand("run", "estimate the acceptance rate of one scheme/adversary pair");
    CLI::App *matrix = app.add_subcommand("matrix", "run every scheme x adversary pair (defaults to all)");
    CLI::App *transcript = app.add_subcommand("transcript", "print one session's event transcript and verdict");
    add_common(run, run_flags);
    add_common(matrix, matrix_flags);
    add_common(transcript, transcript_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        std::vector<std::string> warnings;
        if (run->parsed() || transcript->parsed()) {
            const Flags &f = run->parsed() ? run_flags : transcript_flags;
            qtag::RunSpec spec = build_spec(f, warnings, false);
            if (spec.schemes.size() != 1 || spec.adversaries.size() != 1) {
                std::cerr << "error: use 'matrix' for more than one scheme or adversary\n";
                return 2;
            }
            for (const auto &w : warnings) std::cerr << "warning: " << w << "\n";
            if (transcript->parsed()) {
                return run_transcript(spec);
            }
            return emit_report(qtag::run_matrix(spec, warnings));
        }
        qtag::RunSpec spec = build_spec(matrix_flags, warnings, true);
        for (const auto &w : warnings) std::cerr << "warning: " << w << "\n";
        return emit_report(qtag::run_matrix(spec, warnings));
    } catch (const qtag::ConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
