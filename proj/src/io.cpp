#include "ladderforge/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

namespace ladderforge::io {

namespace {

constexpr std::string_view kVersionPrefix = "# ladderforge-v1 ";
constexpr std::string_view kDatasetHeader =
    "shot_id,duration_s,preset_idx,width,height,crf,rate_kbps,mse,cpu_user_s";

[[noreturn]] void fail(std::size_t line_no, const std::string& msg) {
    throw InputError("line " + std::to_string(line_no) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

void require_shot_id(const std::string& id) {
    if (id.empty()) throw InputError("shot id must not be empty");
    for (const char ch : id) {
        if (ch == ',' || ch == ';' || ch == '=' || ch == ' ' || ch == '\t' ||
            static_cast<unsigned char>(ch) < 0x20) {
            throw InputError("shot id '" + id +
                             "' contains a separator, space or control character");
        }
    }
}

// Line-oriented reader: strips CR, tracks line numbers, skips blank lines.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-blank line, or false at end of input.
    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!trim(line).empty()) return true;
        }
        return false;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

// Reads the version line "# ladderforge-v1 <kind>" and checks the kind.
// Returns the first line after it (or the line itself when optional and
// absent); false when the stream is exhausted.
bool consume_version(LineReader& reader, std::string& line, const std::string& kind,
                     bool required) {
    if (!reader.next(line)) {
        if (required) throw InputError("empty input, expected a " + kind + " file");
        return false;
    }
    if (std::string_view(line).substr(0, kVersionPrefix.size()) == kVersionPrefix) {
        const std::string found(trim(std::string_view(line).substr(kVersionPrefix.size())));
        if (found != kind) {
            fail(reader.line_no(),
                 "expected a " + kind + " file, found '" + found + "'");
        }
        return reader.next(line);
    }
    if (required) {
        fail(reader.line_no(), "missing '" + std::string(kVersionPrefix) + kind + "' header");
    }
    return true;  // line holds data already
}

bool is_comment(const std::string& line) { return trim(line).front() == '#'; }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, const std::string& context) {
    token = trim(token);
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw InputError(context + ": invalid number '" + std::string(token) + "'");
    }
    return value;
}

long parse_long(std::string_view token, const std::string& context) {
    token = trim(token);
    long value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw InputError(context + ": invalid integer '" + std::string(token) + "'");
    }
    return value;
}

std::size_t parse_index(std::string_view token, const std::string& context) {
    const long v = parse_long(token, context);
    if (v < 0) throw InputError(context + ": index must be non-negative");
    return static_cast<std::size_t>(v);
}

void write_dataset(std::ostream& out, const std::vector<ShotRecord>& shots) {
    out << kVersionPrefix << "dataset\n" << kDatasetHeader << "\n";
    for (const auto& shot : shots) {
        require_shot_id(shot.shot_id);
        for (const auto& op : shot.points) {
            out << shot.shot_id << ',' << format_double(shot.duration_s) << ','
                << op.params.preset_idx << ',' << op.params.width << ','
                << op.params.height << ',' << op.params.crf << ','
                << format_double(op.rate_kbps) << ',' << format_double(op.mse) << ','
                << format_double(op.cpu_s) << '\n';
        }
    }
}

std::vector<ShotRecord> read_dataset(std::istream& in) {
    LineReader reader(in);
    std::string line;
    if (!consume_version(reader, line, "dataset", /*required=*/false)) {
        throw InputError("dataset: empty input");
    }
    while (is_comment(line)) {
        if (!reader.next(line)) throw InputError("dataset: missing header row");
    }
    if (trim(line) != kDatasetHeader) {
        fail(reader.line_no(), "dataset header must be exactly '" +
                                   std::string(kDatasetHeader) + "'");
    }
    std::vector<ShotRecord> shots;
    std::vector<std::string> order;  // first-appearance shot order
    while (reader.next(line)) {
        if (is_comment(line)) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 9) {
            fail(reader.line_no(), "expected 9 fields, got " + std::to_string(fields.size()));
        }
        const std::string ctx = "line " + std::to_string(reader.line_no());
        const std::string id(trim(fields[0]));
        try {
            require_shot_id(id);
        } catch (const InputError& e) {
            fail(reader.line_no(), e.what());
        }
        const double duration = parse_double(fields[1], ctx + " duration_s");
        OperatingPoint op;
        op.params.preset_idx = static_cast<int>(parse_long(fields[2], ctx + " preset_idx"));
        op.params.width = static_cast<int>(parse_long(fields[3], ctx + " width"));
        op.params.height = static_cast<int>(parse_long(fields[4], ctx + " height"));
        op.params.crf = static_cast<int>(parse_long(fields[5], ctx + " crf"));
        op.rate_kbps = parse_double(fields[6], ctx + " rate_kbps");
        op.mse = parse_double(fields[7], ctx + " mse");
        op.cpu_s = parse_double(fields[8], ctx + " cpu_user_s");

        ShotRecord* shot = nullptr;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i] == id) {
                shot = &shots[i];
                break;
            }
        }
        if (shot == nullptr) {
            order.push_back(id);
            shots.emplace_back();
            shot = &shots.back();
            shot->shot_id = id;
            shot->duration_s = duration;
        } else if (shot->duration_s != duration) {
            fail(reader.line_no(), "shot '" + id + "' changes duration mid-file");
        }
        shot->points.push_back(op);
    }
    if (shots.empty()) throw InputError("dataset: no data rows");
    return shots;
}

void write_analysis(std::ostream& out, const std::vector<ShotRecord>& shots) {
    out << kVersionPrefix << "analysis\n";
    out << "# shot,<id>,<duration_s>,<n_points>\n";
    out << "# point,<id>,<idx>,<preset_idx>,<width>,<height>,<crf>,<rate_kbps>,<mse>,"
           "<cpu_user_s>\n";
    out << "# fit,<id>,<c>,<k1>,<k2>,<r_squared>,<c_prime>\n";
    out << "# hull,<id>,<point_idx>[,<lambda>,<mu>]\n";
    for (const auto& shot : shots) {
        require_shot_id(shot.shot_id);
        out << "shot," << shot.shot_id << ',' << format_double(shot.duration_s) << ','
            << shot.points.size() << '\n';
        for (std::size_t i = 0; i < shot.points.size(); ++i) {
            const auto& op = shot.points[i];
            out << "point," << shot.shot_id << ',' << i << ',' << op.params.preset_idx
                << ',' << op.params.width << ',' << op.params.height << ','
                << op.params.crf << ',' << format_double(op.rate_kbps) << ','
                << format_double(op.mse) << ',' << format_double(op.cpu_s) << '\n';
        }
        if (shot.fit) {
            const auto& f = *shot.fit;
            out << "fit," << shot.shot_id << ',' << format_double(f.c) << ','
                << format_double(f.k1) << ',' << format_double(f.k2) << ','
                << format_double(f.r_squared) << ',' << format_double(f.c_prime) << '\n';
        }
        if (shot.multipliers &&
            (!shot.hull_indices || shot.multipliers->size() != shot.hull_indices->size())) {
            throw InputError("analysis: shot '" + shot.shot_id +
                             "' multipliers do not align with hull");
        }
        if (shot.hull_indices) {
            for (std::size_t k = 0; k < shot.hull_indices->size(); ++k) {
                out << "hull," << shot.shot_id << ',' << (*shot.hull_indices)[k];
                if (shot.multipliers) {
                    out << ',' << format_double((*shot.multipliers)[k].lambda) << ','
                        << format_double((*shot.multipliers)[k].mu);
                }
                out << '\n';
            }
        }
    }
}

std::vector<ShotRecord> read_analysis(std::istream& in) {
    LineReader reader(in);
    std::string line;
    if (!consume_version(reader, line, "analysis", /*required=*/true)) {
        throw InputError("analysis: no content after header");
    }
    std::vector<ShotRecord> shots;
    std::size_t declared_points = 0;
    bool want_more = true;
    auto current = [&]() -> ShotRecord& {
        if (shots.empty()) fail(reader.line_no(), "row before any 'shot' row");
        return shots.back();
    };
    while (want_more) {
        if (is_comment(line)) {
            want_more = reader.next(line);
            continue;
        }
        const auto fields = split(line, ',');
        const std::string ctx = "line " + std::to_string(reader.line_no());
        const std::string_view tag = trim(fields[0]);
        if (tag == "shot") {
            if (fields.size() != 4) fail(reader.line_no(), "shot row needs 4 fields");
            if (!shots.empty() && shots.back().points.size() != declared_points) {
                fail(reader.line_no(), "shot '" + shots.back().shot_id +
                                           "' point count mismatch");
            }
            ShotRecord shot;
            shot.shot_id = std::string(trim(fields[1]));
            try {
                require_shot_id(shot.shot_id);
            } catch (const InputError& e) {
                fail(reader.line_no(), e.what());
            }
            shot.duration_s = parse_double(fields[2], ctx + " duration_s");
            declared_points = parse_index(fields[3], ctx + " n_points");
            shots.push_back(std::move(shot));
        } else if (tag == "point") {
            if (fields.size() != 10) fail(reader.line_no(), "point row needs 10 fields");
            auto& shot = current();
            if (trim(fields[1]) != shot.shot_id) {
                fail(reader.line_no(), "point row for wrong shot");
            }
            if (parse_index(fields[2], ctx + " idx") != shot.points.size()) {
                fail(reader.line_no(), "point rows must be consecutive from 0");
            }
            OperatingPoint op;
            op.params.preset_idx = static_cast<int>(parse_long(fields[3], ctx));
            op.params.width = static_cast<int>(parse_long(fields[4], ctx));
            op.params.height = static_cast<int>(parse_long(fields[5], ctx));
            op.params.crf = static_cast<int>(parse_long(fields[6], ctx));
            op.rate_kbps = parse_double(fields[7], ctx + " rate_kbps");
            op.mse = parse_double(fields[8], ctx + " mse");
            op.cpu_s = parse_double(fields[9], ctx + " cpu_user_s");
            shot.points.push_back(op);
        } else if (tag == "fit") {
            if (fields.size() != 7) fail(reader.line_no(), "fit row needs 7 fields");
            auto& shot = current();
            if (trim(fields[1]) != shot.shot_id) fail(reader.line_no(), "fit row for wrong shot");
            if (shot.fit) fail(reader.line_no(), "duplicate fit row");
            RdtFit fit;
            fit.c = parse_double(fields[2], ctx + " c");
            fit.k1 = parse_double(fields[3], ctx + " k1");
            fit.k2 = parse_double(fields[4], ctx + " k2");
            fit.r_squared = parse_double(fields[5], ctx + " r_squared");
            fit.c_prime = parse_double(fields[6], ctx + " c_prime");
            shot.fit = fit;
        } else if (tag == "hull") {
            if (fields.size() != 3 && fields.size() != 5) {
                fail(reader.line_no(), "hull row needs 3 or 5 fields");
            }
            auto& shot = current();
            if (trim(fields[1]) != shot.shot_id) {
                fail(reader.line_no(), "hull row for wrong shot");
            }
            const std::size_t idx = parse_index(fields[2], ctx + " point_idx");
            if (!shot.hull_indices) shot.hull_indices.emplace();
            if (!shot.hull_indices->empty() && shot.hull_indices->back() >= idx) {
                fail(reader.line_no(), "hull indices must be strictly increasing");
            }
            shot.hull_indices->push_back(idx);
            const bool has_pair = fields.size() == 5;
            const bool expects_pair =
                shot.multipliers.has_value() || shot.hull_indices->size() == 1;
            if (has_pair) {
                if (!shot.multipliers) {
                    if (shot.hull_indices->size() != 1) {
                        fail(reader.line_no(), "hull rows mix multiplier presence");
                    }
                    shot.multipliers.emplace();
                }
                MultiplierPair pair;
                pair.lambda = parse_double(fields[3], ctx + " lambda");
                pair.mu = parse_double(fields[4], ctx + " mu");
                shot.multipliers->push_back(pair);
            } else if (expects_pair && shot.multipliers.has_value()) {
                fail(reader.line_no(), "hull rows mix multiplier presence");
            }
        } else {
            fail(reader.line_no(), "unknown row tag '" + std::string(tag) + "'");
        }
        want_more = reader.next(line);
    }
    if (!shots.empty() && shots.back().points.size() != declared_points) {
        throw InputError("analysis: shot '" + shots.back().shot_id +
                         "' point count mismatch");
    }
    for (const auto& shot : shots) {
        if (shot.hull_indices) {
            for (const std::size_t idx : *shot.hull_indices) {
                if (idx >= shot.points.size()) {
                    throw InputError("analysis: shot '" + shot.shot_id +
                                     "' hull index out of range");
                }
            }
        }
        if (shot.multipliers && !shot.fit) {
            throw InputError("analysis: shot '" + shot.shot_id +
                             "' has multipliers but no fit");
        }
    }
    if (shots.empty()) throw InputError("analysis: no shots");
    return shots;
}

namespace {

std::string selection_string(const Representation& rep,
                             const std::vector<std::string>& shot_ids) {
    if (rep.selection.size() != shot_ids.size()) {
        throw InputError("table: selection size does not match shot id count");
    }
    std::string out;
    for (std::size_t i = 0; i < shot_ids.size(); ++i) {
        if (i > 0) out += ';';
        out += shot_ids[i];
        out += '=';
        out += std::to_string(rep.selection[i]);
    }
    return out;
}

// Parses "id=idx;..." against ids (learned from the first row when empty).
std::vector<std::size_t> parse_selection(std::string_view text,
                                         std::vector<std::string>& shot_ids,
                                         std::size_t line_no) {
    const auto pairs = split(text, ';');
    const bool learning = shot_ids.empty();
    if (!learning && pairs.size() != shot_ids.size()) {
        fail(line_no, "selection shot count changes between rows");
    }
    std::vector<std::size_t> selection;
    selection.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto kv = split(pairs[i], '=');
        if (kv.size() != 2) fail(line_no, "selection entries must be id=index");
        const std::string id(trim(kv[0]));
        if (learning) {
            shot_ids.push_back(id);
        } else if (shot_ids[i] != id) {
            fail(line_no, "selection shot order changes between rows");
        }
        selection.push_back(
            parse_index(kv[1], "line " + std::to_string(line_no) + " selection"));
    }
    return selection;
}

}  // namespace

void write_table_header(std::ostream& out) {
    out << kVersionPrefix << "table\n";
    out << "# columns: lambda,mu,R_kbps,D_mse,T_s,selection\n";
}

void write_table_row(std::ostream& out, const RdtTableRow& row,
                     const std::vector<std::string>& shot_ids) {
    const auto& rep = row.representation;
    out << format_double(row.multipliers.lambda) << ',' << format_double(row.multipliers.mu)
        << ',' << format_double(rep.agg_rate) << ',' << format_double(rep.agg_distortion)
        << ',' << format_double(rep.agg_time) << ',' << selection_string(rep, shot_ids)
        << '\n';
}

TableDoc read_table(std::istream& in) {
    LineReader reader(in);
    std::string line;
    TableDoc doc;
    if (!consume_version(reader, line, "table", /*required=*/true)) return doc;
    bool want_more = true;
    while (want_more) {
        if (is_comment(line)) {
            want_more = reader.next(line);
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 6) fail(reader.line_no(), "table row needs 6 fields");
        const std::string ctx = "line " + std::to_string(reader.line_no());
        RdtTableRow row;
        row.multipliers.lambda = parse_double(fields[0], ctx + " lambda");
        row.multipliers.mu = parse_double(fields[1], ctx + " mu");
        row.representation.agg_rate = parse_double(fields[2], ctx + " R_kbps");
        row.representation.agg_distortion = parse_double(fields[3], ctx + " D_mse");
        row.representation.agg_time = parse_double(fields[4], ctx + " T_s");
        row.representation.selection =
            parse_selection(fields[5], doc.shot_ids, reader.line_no());
        doc.rows.push_back(std::move(row));
        want_more = reader.next(line);
    }
    return doc;
}

void write_ladder(std::ostream& out, const std::vector<LadderEntry>& entries,
                  const std::vector<std::string>& shot_ids,
                  const std::optional<ComparisonReport>& comparison) {
    out << kVersionPrefix << "ladder\n";
    out << "# columns: target_kbps,found,lambda,mu,R_kbps,D_mse,T_s,selection\n";
    for (const auto& entry : entries) {
        out << format_double(entry.target) << ',';
        if (entry.row) {
            const auto& rep = entry.row->representation;
            out << "1," << format_double(entry.row->multipliers.lambda) << ','
                << format_double(entry.row->multipliers.mu) << ','
                << format_double(rep.agg_rate) << ',' << format_double(rep.agg_distortion)
                << ',' << format_double(rep.agg_time) << ','
                << selection_string(rep, shot_ids) << '\n';
        } else {
            out << "0,,,,,,\n";
        }
    }
    if (comparison) {
        out << "# bd_rate_pct," << format_double(comparison->bd_rate_pct) << '\n';
        out << "# complexity_ratio_pct," << format_double(comparison->complexity_ratio_pct)
            << '\n';
        out << "# rungs_compared," << comparison->rungs_compared << '\n';
    }
}

LadderDoc read_ladder(std::istream& in) {
    LineReader reader(in);
    std::string line;
    LadderDoc doc;
    if (!consume_version(reader, line, "ladder", /*required=*/true)) return doc;
    ComparisonReport cmp;
    int cmp_fields = 0;
    bool want_more = true;
    while (want_more) {
        const std::string_view trimmed = trim(line);
        if (trimmed.front() == '#') {
            const auto body = split(trimmed.substr(1), ',');
            if (body.size() == 2) {
                const std::string_view key = trim(body[0]);
                const std::string ctx = "line " + std::to_string(reader.line_no());
                if (key == "bd_rate_pct") {
                    cmp.bd_rate_pct = parse_double(body[1], ctx);
                    ++cmp_fields;
                } else if (key == "complexity_ratio_pct") {
                    cmp.complexity_ratio_pct = parse_double(body[1], ctx);
                    ++cmp_fields;
                } else if (key == "rungs_compared") {
                    cmp.rungs_compared = parse_index(body[1], ctx);
                    ++cmp_fields;
                }
            }
            want_more = reader.next(line);
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 8) fail(reader.line_no(), "ladder row needs 8 fields");
        const std::string ctx = "line " + std::to_string(reader.line_no());
        LadderEntry entry;
        entry.target = parse_double(fields[0], ctx + " target_kbps");
        const long found = parse_long(fields[1], ctx + " found");
        if (found == 1) {
            RdtTableRow row;
            row.multipliers.lambda = parse_double(fields[2], ctx + " lambda");
            row.multipliers.mu = parse_double(fields[3], ctx + " mu");
            row.representation.agg_rate = parse_double(fields[4], ctx + " R_kbps");
            row.representation.agg_distortion = parse_double(fields[5], ctx + " D_mse");
            row.representation.agg_time = parse_double(fields[6], ctx + " T_s");
            row.representation.selection =
                parse_selection(fields[7], doc.shot_ids, reader.line_no());
            entry.row = std::move(row);
        } else if (found == 0) {
            for (std::size_t i = 2; i < 8; ++i) {
                if (!trim(fields[i]).empty()) {
                    fail(reader.line_no(), "found=0 rows must leave fields empty");
                }
            }
        } else {
            fail(reader.line_no(), "found must be 0 or 1");
        }
        doc.entries.push_back(std::move(entry));
        want_more = reader.next(line);
    }
    if (cmp_fields == 3) {
        doc.comparison = cmp;
    } else if (cmp_fields != 0) {
        throw InputError("ladder: incomplete comparison footer");
    }
    return doc;
}

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "' for reading");
    return in;
}

class FileWriter {
public:
    explicit FileWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw InputError("cannot open '" + path + "' for writing");
    }
    std::ofstream& stream() { return out_; }
    void finish() {
        out_.flush();
        if (!out_) throw InputError("failed writing '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace

std::vector<ShotRecord> load_dataset(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_dataset(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void save_dataset(const std::string& path, const std::vector<ShotRecord>& shots) {
    FileWriter writer(path);
    write_dataset(writer.stream(), shots);
    writer.finish();
}

std::vector<ShotRecord> load_analysis(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_analysis(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void save_analysis(const std::string& path, const std::vector<ShotRecord>& shots) {
    FileWriter writer(path);
    write_analysis(writer.stream(), shots);
    writer.finish();
}

TableDoc load_table(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_table(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

LadderDoc load_ladder(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_ladder(in);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void save_ladder(const std::string& path, const std::vector<LadderEntry>& entries,
                 const std::vector<std::string>& shot_ids,
                 const std::optional<ComparisonReport>& comparison) {
    FileWriter writer(path);
    write_ladder(writer.stream(), entries, shot_ids, comparison);
    writer.finish();
}

}  // namespace ladderforge::io
