#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bq/errors.hpp"
#include "bq/norm.hpp"
#include "bq/rational.hpp"
#include "bq/verify.hpp"
#include "bq/witness.hpp"

namespace bq {

/// A file or document does not match the expected layout.
class SchemaError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Norm descriptors: {"kind":"p","p":2.0}, {"kind":"p","p":"inf"},
// {"kind":"polygonal","vertices":[[x,y],...]}, {"kind":"blend","base":{...},"lambda":0.1}.
nlohmann::json norm_to_json(const Norm2& n);
Norm2 construct_norm(const nlohmann::json& descriptor);

/// Command-line shorthand: p:2, p:inf, poly:@file, blend:<norm>,<lambda>.
Norm2 parse_norm_flag(std::string_view flag);

nlohmann::json witness_to_json(const WitnessSet& w);
WitnessSet witness_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerifyReport& r);
VerifyReport report_from_json(const nlohmann::json& j);

/// Two-space indented text with a trailing newline. Reals are printed in the
/// shortest form that reads back to the same binary64 value.
std::string dump_json(const nlohmann::json& j);
nlohmann::json load_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Points, one line per rho-edge, anchors tagged, 100 units per rho.
std::string render_svg(const WitnessSet& w);

struct StatsRow {
  Rational q;
  std::size_t points = 0;
  std::size_t edges = 0;
  std::size_t depth = 0;
};

/// Sizes of the exact witness sets for q = m/n in lowest terms, m <= max_m,
/// n <= max_n, ordered by q.
std::vector<StatsRow> stats_table(std::int64_t max_m, std::int64_t max_n, const Norm2& source,
                                  double rho = 1.0);
std::string stats_csv(const std::vector<StatsRow>& rows);

}  // namespace bq
