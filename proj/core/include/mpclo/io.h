#pragma once

// Problem files and report emission (CSV, SVG, JSON).
//
// Problem files are JSON objects:
//
//   {
//     "format": 1,
//     "name": "elliptope",
//     "cone": [{"kind": "psd", "size": 3}],
//     "A": [[...], ...], "b": [...], "c": [...], "M": [[...], ...], "d": [...],
//     "domain": {"theta_d": [[-4, 4], [-4, 4]], "theta_p": [[-1, 1], [-1, 1]]},
//     "notes": "free text"
//   }
//
// Vectors and matrix rows are svec-encoded flat lists, or objects
// {"blocks": [...]} holding one entry per cone block: a list for an orthant
// block, a full symmetric matrix (list of rows) for a PSD block. "domain"
// and "notes" are optional.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpclo/error.h"
#include "mpclo/partition.h"
#include "mpclo/properties.h"

namespace mpclo::io {

using Box = std::vector<std::pair<double, double>>;

struct ProblemFile {
  ProblemData data;
  std::optional<Box> domain_d;
  std::optional<Box> domain_p;
  std::string notes;
};

// Throws Error(kParse) with "source:line:column: message" for syntax errors
// and "source: field 'A' row 2: message" for schema errors.
ProblemFile parse_problem(std::string_view text, std::string_view source = "<input>");
ProblemFile read_problem_file(const std::string& path);
std::string write_problem(const ProblemFile& file);

// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double x);

// Columns: index_i, index_j, coord_1..coord_r, class_tag, region_id,
// face_dim, image_1..image_r, extent_width_max, curvature.
void write_partition_csv(std::ostream& out, const PartitionReport& report);
std::string partition_csv(const PartitionReport& report);

// Cells colored by class (nonlinearity blue, linearity orange, transition
// black, outside gray) with a legend.
std::string partition_svg(const PartitionReport& report);

// Machine-readable reports. Each carries "schema": "mpclo.<kind>" and
// "version": kReportVersion.
inline constexpr int kReportVersion = 1;

std::string solution_json(const ProblemData& p, std::string_view form,
                          std::span<const double> parameter, const ConicSolution& sol,
                          const KktResiduals& kkt);
std::string mapping_json(std::string_view side, std::span<const double> point,
                         const MappingValue& mv);
std::string mapping_error_json(std::string_view side, std::span<const double> point,
                               const Error& error);
std::string partition_json(const PartitionReport& report);
std::string verdicts_json(const std::vector<PropertyVerdict>& verdicts);
std::string census_json(const std::vector<Vertex>& vertices);

}  // namespace mpclo::io
