#include "mpclo/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "mpclo/error.h"

namespace mpclo::io {
namespace {

using json = nlohmann::ordered_json;

class SchemaError {
 public:
  explicit SchemaError(std::string msg) : msg_(std::move(msg)) {}
  const std::string& message() const { return msg_; }

 private:
  std::string msg_;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw SchemaError("field '" + where + "': " + what);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "number is not finite");
  return v;
}

Vector flat_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of numbers");
  Vector out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

cones::ConeSpec parse_cone(const json& j) {
  if (!j.is_array() || j.empty()) fail("cone", "expected a nonempty list of blocks");
  std::vector<cones::ConeBlock> blocks;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string where = "cone[" + std::to_string(k) + "]";
    const json& b = j[k];
    if (!b.is_object() || !b.contains("kind") || !b.contains("size")) {
      fail(where, "expected {\"kind\": ..., \"size\": ...}");
    }
    if (!b["kind"].is_string()) fail(where + ".kind", "expected \"orthant\" or \"psd\"");
    const std::string kind = b["kind"].get<std::string>();
    if (!b["size"].is_number_unsigned() || b["size"].get<std::size_t>() == 0) {
      fail(where + ".size", "expected a positive integer");
    }
    const std::size_t size = b["size"].get<std::size_t>();
    if (kind == "orthant") {
      blocks.push_back({cones::BlockKind::kOrthant, size});
    } else if (kind == "psd") {
      blocks.push_back({cones::BlockKind::kPsd, size});
    } else {
      fail(where + ".kind", "unknown cone kind '" + kind + "'");
    }
  }
  return cones::ConeSpec(std::move(blocks));
}

// Flat svec list or {"blocks": [...]}.
Vector cone_vector(const json& j, const cones::ConeSpec& cone, const std::string& where) {
  if (j.is_array()) {
    Vector v = flat_list(j, where);
    if (v.size() != cone.dim()) {
      fail(where, "expected " + std::to_string(cone.dim()) + " entries, got " + std::to_string(v.size()));
    }
    return v;
  }
  if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array()) {
    fail(where, "expected a list or {\"blocks\": [...]}");
  }
  const json& bl = j["blocks"];
  if (bl.size() != cone.block_count()) {
    fail(where, "expected " + std::to_string(cone.block_count()) + " blocks, got " + std::to_string(bl.size()));
  }
  std::vector<cones::BlockValue> values;
  for (std::size_t k = 0; k < bl.size(); ++k) {
    const std::string bw = where + ".blocks[" + std::to_string(k) + "]";
    const cones::ConeBlock& blk = cone.blocks()[k];
    if (blk.kind == cones::BlockKind::kOrthant) {
      Vector v = flat_list(bl[k], bw);
      if (v.size() != blk.size) fail(bw, "expected " + std::to_string(blk.size) + " entries");
      values.emplace_back(std::move(v));
      continue;
    }
    if (!bl[k].is_array() || bl[k].size() != blk.size) {
      fail(bw, "expected a " + std::to_string(blk.size) + "×" + std::to_string(blk.size) + " matrix");
    }
    Matrix m(blk.size, blk.size);
    for (std::size_t i = 0; i < blk.size; ++i) {
      const Vector row = flat_list(bl[k][i], bw + "[" + std::to_string(i) + "]");
      if (row.size() != blk.size) fail(bw, "row " + std::to_string(i) + " has the wrong length");
      for (std::size_t c = 0; c < blk.size; ++c) m(i, c) = row[c];
    }
    if (!linalg::is_symmetric(m)) fail(bw, "matrix is not symmetric");
    values.emplace_back(std::move(m));
  }
  return cones::to_svec(values, cone);
}

Matrix cone_rows(const json& j, const cones::ConeSpec& cone, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of rows");
  Matrix m(j.size(), cone.dim());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = cone_vector(j[i], cone, where + " row " + std::to_string(i));
    for (std::size_t c = 0; c < row.size(); ++c) m(i, c) = row[c];
  }
  return m;
}

Box parse_box(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a list of [lo, hi] pairs");
  Box box;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const Vector pair = flat_list(j[k], where + "[" + std::to_string(k) + "]");
    if (pair.size() != 2 || !(pair[0] < pair[1])) fail(where, "interval " + std::to_string(k) + " must be [lo, hi] with lo < hi");
    box.emplace_back(pair[0], pair[1]);
  }
  return box;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json number_list(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(format_number(x)));
  return a;
}

json finite_or_string(double x) { return std::isfinite(x) ? json(x) : json(format_number(x)); }

json header(std::string_view kind) {
  json j;
  j["schema"] = "mpclo." + std::string(kind);
  j["version"] = kReportVersion;
  return j;
}

std::string list_text(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  return s + "]";
}

}  // namespace

ProblemFile parse_problem(std::string_view text, std::string_view source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw Error(ErrorCode::kParse, std::string(source) + ":" + std::to_string(line) + ":" +
                                       std::to_string(col) + ": malformed JSON");
  }
  try {
    if (!j.is_object()) throw SchemaError("top level must be an object");
    if (!j.contains("format") || !j["format"].is_number_integer() || j["format"].get<int>() != 1) {
      fail("format", "expected 1");
    }
    for (const char* key : {"cone", "A", "b", "c", "M", "d"}) {
      if (!j.contains(key)) fail(key, "missing");
    }
    ProblemFile f;
    ProblemData& p = f.data;
    if (j.contains("name")) {
      if (!j["name"].is_string()) fail("name", "expected a string");
      p.name = j["name"].get<std::string>();
    }
    p.cone = parse_cone(j["cone"]);
    p.A = cone_rows(j["A"], p.cone, "A");
    p.b = flat_list(j["b"], "b");
    if (p.b.size() != p.A.rows()) {
      fail("b", "expected " + std::to_string(p.A.rows()) + " entries to match the rows of A");
    }
    p.c = cone_vector(j["c"], p.cone, "c");
    p.M = cone_rows(j["M"], p.cone, "M");
    if (p.M.rows() == 0) fail("M", "needs at least one row");
    p.d = cone_vector(j["d"], p.cone, "d");
    if (j.contains("notes")) {
      if (!j["notes"].is_string()) fail("notes", "expected a string");
      f.notes = j["notes"].get<std::string>();
    }
    if (j.contains("domain")) {
      const json& dm = j["domain"];
      if (!dm.is_object()) fail("domain", "expected an object");
      if (dm.contains("theta_d")) f.domain_d = parse_box(dm["theta_d"], "domain.theta_d");
      if (dm.contains("theta_p")) f.domain_p = parse_box(dm["theta_p"], "domain.theta_p");
      for (const auto* box : {&f.domain_d, &f.domain_p}) {
        if (*box && (*box)->size() != p.r()) fail("domain", "box dimension differs from the rows of M");
      }
    }
    check_dimensions(p);
    return f;
  } catch (const SchemaError& e) {
    throw Error(ErrorCode::kParse, std::string(source) + ": " + e.message());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParse) throw;
    throw Error(ErrorCode::kParse, std::string(source) + ": " + e.what());
  }
}

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

std::string write_problem(const ProblemFile& file) {
  const ProblemData& p = file.data;
  std::string s = "{\n  \"format\": 1,\n";
  s += "  \"name\": " + json(p.name).dump() + ",\n  \"cone\": [";
  for (std::size_t k = 0; k < p.cone.block_count(); ++k) {
    const cones::ConeBlock& b = p.cone.blocks()[k];
    if (k) s += ", ";
    s += std::string("{\"kind\": \"") + (b.kind == cones::BlockKind::kPsd ? "psd" : "orthant") +
         "\", \"size\": " + std::to_string(b.size) + "}";
  }
  s += "],\n";
  const auto rows = [&](const Matrix& m) {
    std::string t = "[";
    for (std::size_t i = 0; i < m.rows(); ++i) t += std::string(i ? ",\n    " : "\n    ") + list_text(m.row(i));
    return t + (m.rows() ? "\n  ]" : "]");
  };
  s += "  \"A\": " + rows(p.A) + ",\n";
  s += "  \"b\": " + list_text(p.b) + ",\n";
  s += "  \"c\": " + list_text(p.c) + ",\n";
  s += "  \"M\": " + rows(p.M) + ",\n";
  s += "  \"d\": " + list_text(p.d);
  if (file.domain_d || file.domain_p) {
    s += ",\n  \"domain\": {";
    bool first = true;
    for (const auto& [key, box] : {std::pair{"theta_d", &file.domain_d}, std::pair{"theta_p", &file.domain_p}}) {
      if (!*box) continue;
      s += std::string(first ? "" : ", ") + "\"" + key + "\": [";
      for (std::size_t k = 0; k < (*box)->size(); ++k) {
        const auto [lo, hi] = (**box)[k];
        s += std::string(k ? ", " : "") + "[" + format_number(lo) + ", " + format_number(hi) + "]";
      }
      s += "]";
      first = false;
    }
    s += "}";
  }
  if (!file.notes.empty()) s += ",\n  \"notes\": " + json(file.notes).dump();
  return s + "\n}\n";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_partition_csv(std::ostream& out, const PartitionReport& report) {
  const std::size_t r = report.grid.dimension();
  out << "index_i,index_j";
  for (std::size_t k = 1; k <= r; ++k) out << ",coord_" << k;
  out << ",class_tag,region_id,face_dim";
  for (std::size_t k = 1; k <= r; ++k) out << ",image_" << k;
  out << ",extent_width_max,curvature\n";
  for (const CellClass& c : report.cells) {
    out << c.index_i << ',' << c.index_j;
    for (std::size_t k = 0; k < r; ++k) out << ',' << format_number(c.point[k]);
    out << ',' << to_string(c.tag) << ',' << c.region_id << ',' << c.face_dim;
    for (std::size_t k = 0; k < r; ++k) {
      out << ',' << (k < c.image.size() ? format_number(c.image[k]) : "nan");
    }
    out << ',' << format_number(c.extent_width_max) << ',' << format_number(c.curvature) << '\n';
  }
}

std::string partition_csv(const PartitionReport& report) {
  std::ostringstream out;
  write_partition_csv(out, report);
  return out.str();
}

std::string partition_svg(const PartitionReport& report) {
  constexpr int kCell = 12;
  constexpr int kMargin = 10;
  constexpr int kLegendWidth = 150;
  const GridSpec& g = report.grid;
  const std::size_t cols = g.resolution;
  const std::size_t rows = g.dimension() == 2 ? g.resolution : 1;
  const int width = kMargin * 3 + static_cast<int>(cols) * kCell + kLegendWidth;
  const int grid_h = static_cast<int>(rows) * kCell;
  const int height = kMargin * 2 + std::max(grid_h, 4 * 20);
  const auto color = [](CellTag t) {
    switch (t) {
      case CellTag::kNonlinearity: return "#1f77b4";
      case CellTag::kLinearity: return "#ff7f0e";
      case CellTag::kTransitionFace: return "#000000";
      case CellTag::kBoundaryOrOutside: return "#9e9e9e";
    }
    return "#9e9e9e";
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (const CellClass& c : report.cells) {
    // index_i runs along the first coordinate; the second grows upward.
    const int x = kMargin + static_cast<int>(c.index_i) * kCell;
    const int y = kMargin + static_cast<int>(rows - 1 - c.index_j) * kCell;
    s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell
      << "\" fill=\"" << color(c.tag) << "\"/>\n";
  }
  const int lx = kMargin * 2 + static_cast<int>(cols) * kCell;
  const std::pair<CellTag, const char*> legend[] = {
      {CellTag::kNonlinearity, "nonlinearity"},
      {CellTag::kLinearity, "linearity"},
      {CellTag::kTransitionFace, "transition face"},
      {CellTag::kBoundaryOrOutside, "boundary / outside"}};
  for (std::size_t k = 0; k < 4; ++k) {
    const int ly = kMargin + static_cast<int>(k) * 20;
    s << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"14\" height=\"14\" fill=\""
      << color(legend[k].first) << "\" stroke=\"#444444\"/>\n";
    s << "<text x=\"" << lx + 20 << "\" y=\"" << ly + 12
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << legend[k].second << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string solution_json(const ProblemData& p, std::string_view form,
                          std::span<const double> parameter, const ConicSolution& sol,
                          const KktResiduals& kkt) {
  json j = header("solve");
  j["problem"] = p.name;
  j["form"] = form;
  j["parameter"] = number_list(parameter);
  j["status"] = to_string(sol.status);
  j["objective"] = sol.primal_obj;
  j["dual_objective"] = sol.dual_obj;
  j["iterations"] = sol.iterations;
  j["x"] = number_list(sol.x);
  j["w"] = number_list(sol.w);
  j["s"] = number_list(sol.s);
  j["y"] = number_list(sol.y);
  j["residuals"] = {{"primal", sol.residuals.primal}, {"dual", sol.residuals.dual}, {"gap", sol.residuals.gap}};
  j["kkt"] = {{"primal", kkt.primal}, {"dual", kkt.dual}, {"complementarity", kkt.complementarity}};
  return j.dump(2) + "\n";
}

std::string mapping_json(std::string_view side, std::span<const double> point,
                         const MappingValue& mv) {
  json j = header("map");
  j["side"] = side;
  j["point"] = number_list(point);
  j["witness"] = number_list(mv.witness);
  json ext = json::array();
  for (std::size_t k = 0; k < mv.extents.size(); ++k) {
    ext.push_back({{"direction", number_list(mv.directions[k])},
                   {"lower", finite_or_string(mv.extents[k].lower)},
                   {"upper", finite_or_string(mv.extents[k].upper)}});
  }
  j["extents"] = ext;
  j["singleton"] = mv.singleton;
  j["slater"] = to_string(mv.slater);
  j["membership"] = to_string(mv.membership);
  j["optimal_value"] = mv.optimal_value;
  return j.dump(2) + "\n";
}

std::string mapping_error_json(std::string_view side, std::span<const double> point,
                               const Error& error) {
  json j = header("map");
  j["side"] = side;
  j["point"] = number_list(point);
  j["error"] = to_string(error.code());
  j["message"] = error.what();
  return j.dump(2) + "\n";
}

std::string partition_json(const PartitionReport& report) {
  json j = header("partition");
  j["side"] = to_string(report.grid.side);
  json rect = json::array();
  for (const auto& [lo, hi] : report.grid.rectangle) rect.push_back({lo, hi});
  j["rectangle"] = rect;
  j["resolution"] = report.grid.resolution;
  const PartitionSummary& s = report.summary;
  j["summary"] = {{"nonlinearity_regions", s.nonlinearity_regions},
                  {"linearity_regions", s.linearity_regions},
                  {"transition_regions", s.transition_regions},
                  {"nonlinearity_cells", s.nonlinearity_cells},
                  {"linearity_cells", s.linearity_cells},
                  {"transition_cells", s.transition_cells},
                  {"outside_cells", s.outside_cells}};
  json regions = json::array();
  for (const Region& r : report.regions) {
    regions.push_back({{"id", r.id},
                       {"tag", to_string(r.tag)},
                       {"dim", r.dim},
                       {"cells", r.cell_count},
                       {"image", number_list(r.image)}});
  }
  j["regions"] = regions;
  return j.dump(2) + "\n";
}

std::string verdicts_json(const std::vector<PropertyVerdict>& verdicts) {
  json j = header("verify");
  json rows = json::array();
  bool all = true;
  for (const PropertyVerdict& v : verdicts) {
    json w = json::array();
    for (const Vector& x : v.witnesses) w.push_back(number_list(x));
    rows.push_back({{"name", v.name},
                    {"samples", v.samples},
                    {"skipped", v.skipped},
                    {"worst_violation", finite_or_string(v.worst_violation)},
                    {"tolerance", v.tolerance},
                    {"pass", v.pass},
                    {"witnesses", w}});
    all = all && v.pass;
  }
  j["properties"] = rows;
  j["pass"] = all;
  return j.dump(2) + "\n";
}

std::string census_json(const std::vector<Vertex>& vertices) {
  json j = header("census");
  json rows = json::array();
  for (const Vertex& v : vertices) {
    rows.push_back({{"image", number_list(v.image)},
                    {"parameter", number_list(v.parameter)},
                    {"cluster_size", v.cluster_size},
                    {"x", number_list(v.x)}});
  }
  j["vertices"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace mpclo::io
