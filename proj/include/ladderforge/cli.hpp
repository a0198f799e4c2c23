#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ladderforge/synth.hpp"

// Command-line front end.  Command bodies live here (not in the binary) so
// tests can drive them in-process.  Exit codes: 0 success, 2 usage or input
// error, 3 numeric or degenerate-data error.
namespace ladderforge::cli {

// Dataset description consumed by synth and manifest: the synthetic grid
// plus how many shots to name and the frame rate used in job templates.
struct DatasetSpec {
    SynthConfig synth;
    int num_shots = 1;
    std::string shot_prefix = "shot";
    double fps = 24.0;
};

// Parses the JSON config.  Unknown keys are rejected so typos surface as
// errors instead of silently falling back to defaults.
DatasetSpec parse_config_json(const std::string& text);
DatasetSpec load_config(const std::string& path);

// Shot ids are prefix + zero-padded index: shot000, shot001, ...
std::string shot_name(const DatasetSpec& spec, int index);

// Job-template expansion for manifest generation.  Placeholders {size},
// {width}, {height}, {fps}, {preset}, {preset_idx}, {crf}, {shot}, {in} and
// {out} are replaced; anything else raises InputError naming the token.
struct ManifestOptions {
    std::string job_template;  // must use {size} {fps} {preset} {crf} {in} {out}
    std::string in_pattern = "{shot}_{size}.yuv";
    std::string out_pattern = "{shot}_p{preset_idx}_crf{crf}_{size}.bin";
    std::string time_wrapper = "/usr/bin/time -f %U -o {out}.cpu";
    bool use_time_wrapper = true;
};
std::vector<std::string> build_manifest(const DatasetSpec& spec,
                                        const ManifestOptions& options);

// Runs manifest job lines through /bin/sh with worker_count() workers and
// returns per-job exit codes and user-CPU seconds, in job order.
struct JobResult {
    int exit_code = 0;
    double user_s = 0.0;
};
std::vector<JobResult> execute_manifest(const std::vector<std::string>& jobs);

// Entry point used by main(); never throws.
int run(int argc, const char* const* argv);

// Testable variant: args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ladderforge::cli
