#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ladderforge/assembler.hpp"
#include "ladderforge/metrics.hpp"
#include "ladderforge/model.hpp"

// Text formats.  Every file written here starts with the version line
// "# ladderforge-v1 <kind>"; readers reject files whose kind does not match.
// Doubles are written with std::to_chars (shortest representation that parses
// back to the same value) and read with std::from_chars, so writing is
// locale-independent and byte-stable and reading is lossless.
//
// Shot ids act as keys inside these formats, so they must be non-empty and
// free of whitespace, control characters, and the separators ',', ';', '='.
namespace ladderforge::io {

// Shortest round-trip decimal form of v.
std::string format_double(double v);

// Strict full-token numeric parses; context names the field in errors.
double parse_double(std::string_view token, const std::string& context);
long parse_long(std::string_view token, const std::string& context);
std::size_t parse_index(std::string_view token, const std::string& context);

// Dataset: one CSV row per encode under the header
// shot_id,duration_s,preset_idx,width,height,crf,rate_kbps,mse,cpu_user_s
// Rows of one shot share id and duration; point order is file order.  The
// version line is written but optional on read, so externally produced CSVs
// with the exact header are accepted.
void write_dataset(std::ostream& out, const std::vector<ShotRecord>& shots);
std::vector<ShotRecord> read_dataset(std::istream& in);

// Analysis: tagged rows carrying everything analyze produced.  Per shot, in
// order: a "shot" row, its "point" rows, a "fit" row when a fit exists, and
// one "hull" row per hull point (with lambda and mu appended when multipliers
// exist).  Reading rebuilds the exact ShotRecords.
void write_analysis(std::ostream& out, const std::vector<ShotRecord>& shots);
std::vector<ShotRecord> read_analysis(std::istream& in);

// Table: rows "lambda,mu,R_kbps,D_mse,T_s,selection" in the generator's
// (lambda, mu) order, where selection is "id=pointidx;..." across all shots
// in a fixed order.  Unweighted sums are not stored: representations read
// back carry aggregates and selections only, with sums left zero.
struct TableDoc {
    std::vector<std::string> shot_ids;  // selection order, from the first row
    std::vector<RdtTableRow> rows;
};
void write_table_header(std::ostream& out);
void write_table_row(std::ostream& out, const RdtTableRow& row,
                     const std::vector<std::string>& shot_ids);
TableDoc read_table(std::istream& in);

// Ladder: rows "target_kbps,found,lambda,mu,R_kbps,D_mse,T_s,selection"; a
// target with no qualifying row has found=0 and empty remaining fields.  A
// comparison against a reference ladder, when present, is appended as
// comment rows and read back.
struct LadderDoc {
    std::vector<std::string> shot_ids;  // empty when no rung was found
    std::vector<LadderEntry> entries;
    std::optional<ComparisonReport> comparison;
};
void write_ladder(std::ostream& out, const std::vector<LadderEntry>& entries,
                  const std::vector<std::string>& shot_ids,
                  const std::optional<ComparisonReport>& comparison);
LadderDoc read_ladder(std::istream& in);

// Path-based wrappers.  Open/read/write failures raise InputError naming the
// path.
std::vector<ShotRecord> load_dataset(const std::string& path);
void save_dataset(const std::string& path, const std::vector<ShotRecord>& shots);
std::vector<ShotRecord> load_analysis(const std::string& path);
void save_analysis(const std::string& path, const std::vector<ShotRecord>& shots);
TableDoc load_table(const std::string& path);
LadderDoc load_ladder(const std::string& path);
void save_ladder(const std::string& path, const std::vector<LadderEntry>& entries,
                 const std::vector<std::string>& shot_ids,
                 const std::optional<ComparisonReport>& comparison);

}  // namespace ladderforge::io
