#include "ladderforge/cli.hpp"

#include <spawn.h>
#include <sys/resource.h>
#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "ladderforge/assembler.hpp"
#include "ladderforge/io.hpp"
#include "ladderforge/metrics.hpp"
#include "ladderforge/rdtfit.hpp"
#include "ladderforge/util.hpp"

extern char** environ;

namespace ladderforge::cli {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (const auto& item : obj.items()) {
        if (allowed.find(item.key()) == allowed.end()) {
            throw InputError("config: unknown key '" + item.key() + "' in " + where);
        }
    }
}

double get_number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        throw InputError(std::string("config: '") + key + "' must be a number");
    }
    return obj[key].get<double>();
}

long get_integer(const json& obj, const char* key, long fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) {
        throw InputError(std::string("config: '") + key + "' must be an integer");
    }
    return obj[key].get<long>();
}

}  // namespace

DatasetSpec parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InputError("config: top level must be an object");
    require_keys(j,
                 {"c", "k1", "k2", "presets", "resolutions", "crf", "r0_kbps", "t0_s",
                  "noise_sigma", "seed", "duration_s", "num_shots", "shot_prefix", "fps"},
                 "top level");

    DatasetSpec spec;
    spec.synth = default_synth_config();
    auto& s = spec.synth;
    s.c = get_number(j, "c", s.c);
    s.k1 = get_number(j, "k1", s.k1);
    s.k2 = get_number(j, "k2", s.k2);
    s.r0_kbps = get_number(j, "r0_kbps", s.r0_kbps);
    s.t0_s = get_number(j, "t0_s", s.t0_s);
    s.noise_sigma = get_number(j, "noise_sigma", s.noise_sigma);
    s.duration_s = get_number(j, "duration_s", s.duration_s);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) {
            throw InputError("config: 'seed' must be a non-negative integer");
        }
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("crf")) {
        const auto& c = j["crf"];
        if (!c.is_object()) throw InputError("config: 'crf' must be an object");
        require_keys(c, {"min", "max", "step"}, "'crf'");
        s.crf_range.min = static_cast<int>(get_integer(c, "min", s.crf_range.min));
        s.crf_range.max = static_cast<int>(get_integer(c, "max", s.crf_range.max));
        s.crf_range.step = static_cast<int>(get_integer(c, "step", s.crf_range.step));
    }
    if (j.contains("presets")) {
        const auto& arr = j["presets"];
        if (!arr.is_array()) throw InputError("config: 'presets' must be an array");
        s.presets.clear();
        for (const auto& p : arr) {
            if (!p.is_object()) throw InputError("config: preset entries must be objects");
            require_keys(p, {"index", "name", "time_factor"}, "preset entry");
            PresetSpec preset;
            preset.index = static_cast<int>(get_integer(p, "index", 0));
            preset.time_factor = get_number(p, "time_factor", 0.0);
            if (p.contains("name")) {
                if (!p["name"].is_string()) {
                    throw InputError("config: preset 'name' must be a string");
                }
                preset.name = p["name"].get<std::string>();
            }
            s.presets.push_back(std::move(preset));
        }
    }
    if (j.contains("resolutions")) {
        const auto& arr = j["resolutions"];
        if (!arr.is_array()) throw InputError("config: 'resolutions' must be an array");
        s.resolutions.clear();
        for (const auto& r : arr) {
            if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() ||
                !r[1].is_number_integer()) {
                throw InputError("config: resolutions must be [width, height] pairs");
            }
            s.resolutions.emplace_back(r[0].get<int>(), r[1].get<int>());
        }
    }
    const long num_shots = get_integer(j, "num_shots", 1);
    if (num_shots < 1 || num_shots > 100000) {
        throw InputError("config: 'num_shots' must be between 1 and 100000");
    }
    spec.num_shots = static_cast<int>(num_shots);
    if (j.contains("shot_prefix")) {
        if (!j["shot_prefix"].is_string()) {
            throw InputError("config: 'shot_prefix' must be a string");
        }
        spec.shot_prefix = j["shot_prefix"].get<std::string>();
    }
    spec.fps = get_number(j, "fps", spec.fps);
    if (!(spec.fps > 0.0) || !std::isfinite(spec.fps)) {
        throw InputError("config: 'fps' must be positive");
    }
    validate_synth_config(spec.synth);
    shot_name(spec, 0);  // validates the prefix charset
    return spec;
}

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw InputError("failed reading '" + path + "'");
    return buf.str();
}

}  // namespace

DatasetSpec load_config(const std::string& path) {
    try {
        return parse_config_json(read_text_file(path));
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string shot_name(const DatasetSpec& spec, int index) {
    const std::size_t digits = std::to_string(std::max(spec.num_shots - 1, 0)).size();
    const int width = static_cast<int>(std::max<std::size_t>(3, digits));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*d", width, index);
    std::string name = spec.shot_prefix + buf;
    for (const char ch : name) {
        if (ch == ',' || ch == ';' || ch == '=' || ch == ' ' || ch == '\t' ||
            static_cast<unsigned char>(ch) < 0x20) {
            throw InputError("config: shot prefix produces invalid shot id '" + name + "'");
        }
    }
    return name;
}

namespace {

std::string expand_template(std::string_view tpl,
                            const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(tpl.size());
    for (std::size_t i = 0; i < tpl.size(); ++i) {
        if (tpl[i] != '{') {
            out += tpl[i];
            continue;
        }
        const std::size_t close = tpl.find('}', i + 1);
        if (close == std::string_view::npos) {
            throw InputError("template: unterminated placeholder near '" +
                             std::string(tpl.substr(i)) + "'");
        }
        const std::string name(tpl.substr(i + 1, close - i - 1));
        const auto it = vars.find(name);
        if (it == vars.end()) {
            throw InputError("template: unknown placeholder '{" + name + "}'");
        }
        out += it->second;
        i = close;
    }
    return out;
}

}  // namespace

std::vector<std::string> build_manifest(const DatasetSpec& spec,
                                        const ManifestOptions& options) {
    for (const char* required :
         {"{size}", "{fps}", "{preset}", "{crf}", "{in}", "{out}"}) {
        if (options.job_template.find(required) == std::string::npos) {
            throw InputError(std::string("template: missing required placeholder ") +
                             required);
        }
    }
    std::vector<int> crfs;
    for (int q = spec.synth.crf_range.min; q <= spec.synth.crf_range.max;
         q += spec.synth.crf_range.step) {
        crfs.push_back(q);
    }
    std::vector<std::string> jobs;
    jobs.reserve(static_cast<std::size_t>(spec.num_shots) * spec.synth.presets.size() *
                 spec.synth.resolutions.size() * crfs.size());
    for (int i = 0; i < spec.num_shots; ++i) {
        const std::string shot = shot_name(spec, i);
        for (const auto& preset : spec.synth.presets) {
            for (const auto& res : spec.synth.resolutions) {
                for (const int crf : crfs) {
                    std::map<std::string, std::string> vars;
                    vars["shot"] = shot;
                    vars["width"] = std::to_string(res.first);
                    vars["height"] = std::to_string(res.second);
                    vars["size"] =
                        std::to_string(res.first) + "x" + std::to_string(res.second);
                    vars["fps"] = io::format_double(spec.fps);
                    vars["preset"] =
                        preset.name.empty() ? std::to_string(preset.index) : preset.name;
                    vars["preset_idx"] = std::to_string(preset.index);
                    vars["crf"] = std::to_string(crf);
                    vars["in"] = expand_template(options.in_pattern, vars);
                    vars["out"] = expand_template(options.out_pattern, vars);
                    std::string line = expand_template(options.job_template, vars);
                    if (options.use_time_wrapper) {
                        line = expand_template(options.time_wrapper, vars) + " " + line;
                    }
                    jobs.push_back(std::move(line));
                }
            }
        }
    }
    return jobs;
}

std::vector<JobResult> execute_manifest(const std::vector<std::string>& jobs) {
    std::vector<JobResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const char* argv[] = {"/bin/sh", "-c", jobs[i].c_str(), nullptr};
            pid_t pid = -1;
            const int rc = posix_spawn(&pid, "/bin/sh", nullptr, nullptr,
                                       const_cast<char* const*>(argv), environ);
            if (rc != 0) {
                results[i] = {127, 0.0};
                continue;
            }
            int status = 0;
            struct rusage ru {};
            if (wait4(pid, &status, 0, &ru) < 0) {
                results[i] = {127, 0.0};
                continue;
            }
            JobResult r;
            r.user_s = static_cast<double>(ru.ru_utime.tv_sec) +
                       static_cast<double>(ru.ru_utime.tv_usec) / 1e6;
            r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status)
                                            : 128 + WTERMSIG(status);
            results[i] = r;
        }
    };
    const std::size_t n_workers = std::min<std::size_t>(worker_count(), jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

namespace {

void cmd_synth(const std::string& config_path, const std::string& out_path,
               std::ostream& out) {
    const DatasetSpec spec = load_config(config_path);
    std::vector<ShotRecord> shots;
    shots.reserve(static_cast<std::size_t>(spec.num_shots));
    std::size_t total_points = 0;
    for (int i = 0; i < spec.num_shots; ++i) {
        shots.push_back(gen_shot(spec.synth, shot_name(spec, i)));
        total_points += shots.back().points.size();
    }
    io::save_dataset(out_path, shots);
    out << "wrote " << out_path << " (" << shots.size() << " shots, " << total_points
        << " points)\n";
}

void cmd_analyze(const std::string& in_path, const std::string& out_path,
                 std::ostream& out, std::ostream& err) {
    auto shots = io::load_dataset(in_path);
    const ValidationReport report = validate_dataset(shots);
    for (const auto& msg : report.messages()) err << "ladderforge: " << msg << '\n';
    if (!report.ok()) {
        throw InputError("dataset failed validation, see messages above");
    }
    const auto outcomes = analyze_dataset(std::move(shots));
    std::vector<ShotRecord> analyzed;
    analyzed.reserve(outcomes.size());
    std::size_t hull_points = 0, fits = 0;
    for (const auto& outcome : outcomes) {
        for (const auto& warning : outcome.warnings) {
            err << "ladderforge: warning: " << warning << '\n';
        }
        hull_points += outcome.shot.hull_indices ? outcome.shot.hull_indices->size() : 0;
        fits += outcome.shot.fit ? 1 : 0;
        analyzed.push_back(outcome.shot);
    }
    io::save_analysis(out_path, analyzed);
    out << "wrote " << out_path << " (" << analyzed.size() << " shots, " << hull_points
        << " hull points, " << fits << " fits)\n";
}

void cmd_table(const std::string& analysis_path, const std::string& out_path,
               double dedup_tol, std::ostream& out, std::ostream& err) {
    const auto shots = io::load_analysis(analysis_path);
    std::vector<std::string> shot_ids;
    shot_ids.reserve(shots.size());
    for (const auto& shot : shots) {
        shot_ids.push_back(shot.shot_id);
        if (!shot.multipliers) {
            err << "ladderforge: warning: shot '" << shot.shot_id
                << "' contributes no multipliers\n";
        }
    }
    const MultiplierGrid grid = build_multiplier_grid(shots, dedup_tol);
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw InputError("cannot open '" + out_path + "' for writing");
    io::write_table_header(file);
    std::size_t rows = 0;
    for_each_table_row(shots, grid, [&](const RdtTableRow& row) {
        io::write_table_row(file, row, shot_ids);
        ++rows;
    });
    file.flush();
    if (!file) throw InputError("failed writing '" + out_path + "'");
    out << "wrote " << out_path << " (" << grid.lambdas.size() << " lambda x "
        << grid.mus.size() << " mu = " << rows << " rows)\n";
}

std::vector<double> parse_targets(const std::string& text) {
    std::vector<double> targets;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = std::min(text.find(',', start), text.size());
        targets.push_back(io::parse_double(text.substr(start, pos - start), "targets"));
        start = pos + 1;
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    return targets;
}

void cmd_ladder(const std::string& table_path, const std::string& targets_text,
                double tolerance, const std::optional<double>& budget,
                const std::optional<std::string>& reference_path, int bit_depth,
                const std::string& out_path, std::ostream& out) {
    const io::TableDoc doc = io::load_table(table_path);
    LadderQuery query;
    query.target_rates = parse_targets(targets_text);
    query.rate_tolerance = tolerance;
    query.time_budget = budget;
    const auto entries = query_ladder(doc.rows, query);
    std::optional<ComparisonReport> comparison;
    if (reference_path) {
        const io::LadderDoc reference = io::load_ladder(*reference_path);
        comparison = comparison_report(entries, reference.entries, bit_depth);
    }
    io::save_ladder(out_path, entries, doc.shot_ids, comparison);
    std::size_t found = 0;
    for (const auto& entry : entries) found += entry.row ? 1 : 0;
    out << "wrote " << out_path << " (" << found << "/" << entries.size()
        << " targets matched)\n";
    if (comparison) {
        out << "bd_rate_pct=" << io::format_double(comparison->bd_rate_pct)
            << " complexity_ratio_pct="
            << io::format_double(comparison->complexity_ratio_pct)
            << " rungs_compared=" << comparison->rungs_compared << '\n';
    }
}

void cmd_manifest(const std::string& config_path, const ManifestOptions& options,
                  const std::string& out_path, bool execute,
                  const std::optional<std::string>& report_path, std::ostream& out) {
    const DatasetSpec spec = load_config(config_path);
    const std::vector<std::string> jobs = build_manifest(spec, options);
    {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) throw InputError("cannot open '" + out_path + "' for writing");
        file << "# ladderforge-v1 manifest\n";
        for (const auto& job : jobs) file << job << '\n';
        file.flush();
        if (!file) throw InputError("failed writing '" + out_path + "'");
    }
    out << "wrote " << out_path << " (" << jobs.size() << " jobs)\n";
    if (!execute) return;

    const std::vector<JobResult> results = execute_manifest(jobs);
    const std::string report = report_path ? *report_path : out_path + ".times.csv";
    std::ofstream file(report, std::ios::binary);
    if (!file) throw InputError("cannot open '" + report + "' for writing");
    file << "# ladderforge-v1 timings\njob_idx,exit_code,user_s\n";
    std::size_t failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        file << i << ',' << results[i].exit_code << ','
             << io::format_double(results[i].user_s) << '\n';
        failures += results[i].exit_code != 0 ? 1 : 0;
    }
    file.flush();
    if (!file) throw InputError("failed writing '" + report + "'");
    out << "executed " << results.size() << " jobs, " << failures << " failed; timings in "
        << report << '\n';
    if (failures > 0) {
        throw NumericError(std::to_string(failures) + " job(s) failed, see " + report);
    }
}

std::string sniff_kind(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw InputError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string prefix = "# ladderforge-v1 ";
    if (line.rfind(prefix, 0) != 0) {
        throw InputError(path + ": missing '# ladderforge-v1 <kind>' header");
    }
    return line.substr(prefix.size());
}

void cmd_plotdata(const std::string& in_path, const std::optional<std::string>& analysis_path,
                  int bit_depth, const std::string& out_path, std::ostream& out) {
    const std::string kind = sniff_kind(in_path);
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw InputError("cannot open '" + out_path + "' for writing");
    file << "# ladderforge-v1 plotdata\n# columns: series,key,x,y\n";
    std::size_t rows = 0;
    auto emit = [&](const std::string& series, const std::string& key, double x, double y) {
        file << series << ',' << key << ',' << io::format_double(x) << ','
             << io::format_double(y) << '\n';
        ++rows;
    };

    if (kind == "table") {
        if (analysis_path) {
            throw InputError("--analysis applies only to ladder inputs");
        }
        const io::TableDoc doc = io::load_table(in_path);
        if (doc.rows.empty()) throw InputError(in_path + ": table has no rows");
        double t_max = 0.0;
        for (const auto& row : doc.rows) {
            t_max = std::max(t_max, row.representation.agg_time);
        }
        for (std::size_t i = 0; i < doc.rows.size(); ++i) {
            const auto& row = doc.rows[i];
            const auto& rep = row.representation;
            const std::string key = std::to_string(i);
            emit("log2rate_psnr", key, std::log2(rep.agg_rate),
                 psnr_from_mse(rep.agg_distortion, bit_depth));
            emit("lambda_rate", key, row.multipliers.lambda, rep.agg_rate);
            emit("mu_time", key, row.multipliers.mu, rep.agg_time);
            emit("rate_complexity", key, rep.agg_rate, 100.0 * rep.agg_time / t_max);
        }
    } else if (kind == "ladder") {
        const io::LadderDoc doc = io::load_ladder(in_path);
        std::vector<ShotRecord> shots;
        if (analysis_path) shots = io::load_analysis(*analysis_path);
        for (const auto& entry : doc.entries) {
            if (!entry.row) continue;
            const auto& rep = entry.row->representation;
            const std::string key = io::format_double(entry.target);
            emit("ladder_rate_psnr", key, rep.agg_rate,
                 psnr_from_mse(rep.agg_distortion, bit_depth));
            emit("ladder_rate_time", key, rep.agg_rate, rep.agg_time);
            if (!analysis_path) continue;
            std::map<int, std::size_t> preset_counts;
            for (std::size_t i = 0; i < doc.shot_ids.size(); ++i) {
                const ShotRecord* shot = nullptr;
                for (const auto& candidate : shots) {
                    if (candidate.shot_id == doc.shot_ids[i]) {
                        shot = &candidate;
                        break;
                    }
                }
                if (shot == nullptr) {
                    throw InputError("plotdata: shot '" + doc.shot_ids[i] +
                                     "' not present in analysis");
                }
                const std::size_t idx = rep.selection[i];
                if (idx >= shot->points.size()) {
                    throw InputError("plotdata: selection index out of range for shot '" +
                                     shot->shot_id + "'");
                }
                ++preset_counts[shot->points[idx].params.preset_idx];
            }
            for (const auto& [preset, count] : preset_counts) {
                emit("preset_hist", key, static_cast<double>(preset),
                     static_cast<double>(count));
            }
        }
    } else {
        throw InputError(in_path + ": expected a table or ladder file, found '" + kind +
                         "'");
    }
    file.flush();
    if (!file) throw InputError("failed writing '" + out_path + "'");
    out << "wrote " << out_path << " (" << rows << " rows)\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Per-shot rate-distortion-complexity ladder toolkit"};
    app.name("ladderforge");
    app.require_subcommand(1);

    std::string config_path, input_path, output_path, analysis_path, table_path;
    std::string targets_text;
    double dedup_tol = 1e-3;
    double tolerance = 0.10;
    int bit_depth = 10;
    std::optional<double> budget;
    std::optional<std::string> reference_path, report_path, plot_analysis;
    ManifestOptions manifest_options;
    std::string template_text, template_file;
    bool execute = false, no_time_wrapper = false;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--config", config_path, "JSON config")->required();
    synth->add_option("-o,--output", output_path, "dataset CSV to write")->required();

    auto* analyze = app.add_subcommand("analyze", "hull, fit and multipliers per shot");
    analyze->add_option("-i,--input", input_path, "dataset CSV")->required();
    analyze->add_option("-o,--output", output_path, "analysis file to write")->required();

    auto* table = app.add_subcommand("table", "sweep the multiplier grid");
    table->add_option("-a,--analysis", analysis_path, "analysis file")->required();
    table->add_option("-o,--output", output_path, "table file to write")->required();
    table->add_option("--dedup-tol", dedup_tol,
                      "multiplier merge tolerance in log space (0 = exact)");

    auto* ladder = app.add_subcommand("ladder", "pick table rows for bitrate targets");
    ladder->add_option("-t,--table", table_path, "table file")->required();
    ladder->add_option("-o,--output", output_path, "ladder file to write")->required();
    ladder->add_option("--targets", targets_text, "comma-separated bitrate targets, kbps")
        ->required();
    ladder->add_option("--tolerance", tolerance, "relative band half-width around targets");
    ladder->add_option("--budget", budget, "total CPU-seconds cap per rung");
    ladder->add_option("--reference", reference_path,
                       "reference ladder file for bd-rate and complexity comparison");
    ladder->add_option("--bit-depth", bit_depth, "sample bit depth for PSNR");

    auto* manifest = app.add_subcommand("manifest", "emit encode job lines");
    manifest->add_option("--config", config_path, "JSON config")->required();
    manifest->add_option("-o,--output", output_path, "manifest file to write")->required();
    manifest->add_option("--template", template_text, "job template string");
    manifest->add_option("--template-file", template_file, "file holding the job template");
    manifest->add_option("--in-pattern", manifest_options.in_pattern,
                         "input path pattern");
    manifest->add_option("--out-pattern", manifest_options.out_pattern,
                         "output path pattern");
    manifest->add_option("--time-wrapper", manifest_options.time_wrapper,
                         "timing prefix placed before each job");
    manifest->add_flag("--no-time-wrapper", no_time_wrapper, "emit bare job lines");
    manifest->add_flag("--execute", execute, "run the jobs and record user CPU times");
    manifest->add_option("--report", report_path,
                         "timings CSV path (default: <output>.times.csv)");

    auto* plotdata = app.add_subcommand("plotdata", "flatten a table or ladder for plotting");
    plotdata->add_option("-i,--input", input_path, "table or ladder file")->required();
    plotdata->add_option("--analysis", plot_analysis,
                         "analysis file, enables the preset histogram (ladder input only)");
    plotdata->add_option("--bit-depth", bit_depth, "sample bit depth for PSNR");
    plotdata->add_option("-o,--output", output_path, "plotdata CSV to write")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("ladderforge");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "ladderforge: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*synth) {
            cmd_synth(config_path, output_path, out);
        } else if (*analyze) {
            cmd_analyze(input_path, output_path, out, err);
        } else if (*table) {
            cmd_table(analysis_path, output_path, dedup_tol, out, err);
        } else if (*ladder) {
            cmd_ladder(table_path, targets_text, tolerance, budget, reference_path,
                       bit_depth, output_path, out);
        } else if (*manifest) {
            if (template_text.empty() == template_file.empty()) {
                throw InputError("manifest: give exactly one of --template/--template-file");
            }
            manifest_options.job_template =
                template_text.empty() ? read_text_file(template_file) : template_text;
            // Templates read from files may carry a trailing newline.
            while (!manifest_options.job_template.empty() &&
                   (manifest_options.job_template.back() == '\n' ||
                    manifest_options.job_template.back() == '\r')) {
                manifest_options.job_template.pop_back();
            }
            manifest_options.use_time_wrapper = !no_time_wrapper;
            cmd_manifest(config_path, manifest_options, output_path, execute, report_path,
                         out);
        } else if (*plotdata) {
            cmd_plotdata(input_path, plot_analysis, bit_depth, output_path, out);
        }
    } catch (const InputError& e) {
        err << "ladderforge: error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        err << "ladderforge: error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "ladderforge: unexpected error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace ladderforge::cli
