// mpclo: solve, map, partition and verify multiparametric conic programs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpclo/error.h"
#include "mpclo/io.h"
#include "mpclo/partition.h"
#include "mpclo/properties.h"

namespace {

using mpclo::Error;
using mpclo::ErrorCode;
using mpclo::Matrix;
using mpclo::Vector;

enum Exit { kOk = 0, kInputError = 1, kInfeasible = 2, kNumerical = 3, kPropertyFailed = 4 };

Vector parse_list(const std::string& text, const std::string& what) {
  Vector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, what + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, what + " is empty");
  return out;
}

mpclo::io::Box parse_grid(const std::string& text, std::size_t r) {
  const Vector v = parse_list(text, "--grid");
  if (v.size() != 2 * r) {
    throw Error(ErrorCode::kInvalidArgument,
                "--grid needs " + std::to_string(2 * r) + " numbers for " + std::to_string(r) + " parameters");
  }
  mpclo::io::Box box;
  for (std::size_t k = 0; k < r; ++k) box.emplace_back(v[2 * k], v[2 * k + 1]);
  return box;
}

std::string fmt(double x) { return mpclo::io::format_number(x); }

std::string fmt(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + ")";
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out.flush());
}

struct Common {
  std::string file;
  bool json = false;
  unsigned workers = 0;
  double tol_singleton = 1e-4;
  double eps_face = 1e-7;

  mpclo::MappingOptions mapping() const {
    mpclo::MappingOptions o;
    o.tol_singleton = tol_singleton;
    o.eps_face = eps_face;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("file", c.file, "problem file")->required();
  cmd->add_flag("--json", c.json, "machine-readable output");
}

void add_tolerances(CLI::App* cmd, Common& c) {
  cmd->add_option("--tol-singleton", c.tol_singleton, "extent width below which a value set is a point")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--eps-face", c.eps_face, "objective perturbation used to probe optimal faces")
      ->check(CLI::PositiveNumber);
}

void add_workers(CLI::App* cmd, Common& c) {
  cmd->add_option("--workers", c.workers, "worker threads (0 = all processors)");
}

std::optional<Vector> point_from(const std::string& text, const std::string& what, std::size_t r) {
  if (text.empty()) return std::nullopt;
  Vector v = parse_list(text, what);
  if (v.size() != r) {
    throw Error(ErrorCode::kDimensionMismatch,
                what + " needs " + std::to_string(r) + " coordinates, got " + std::to_string(v.size()));
  }
  return v;
}

int run_solve(const Common& c, const std::string& u_text, const std::string& v_text) {
  const mpclo::io::ProblemFile f = mpclo::io::read_problem_file(c.file);
  const mpclo::ProblemData& p = f.data;
  mpclo::validate(p);
  const auto u = point_from(u_text, "--u", p.r());
  const auto v = point_from(v_text, "--v", p.r());
  if (u.has_value() == v.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "give exactly one of --u and --v");
  }
  const bool by_u = u.has_value();
  const Vector& param = by_u ? *u : *v;
  const mpclo::ConicSolution sol =
      mpclo::solve(by_u ? mpclo::assemble_primal(p, param) : mpclo::assemble_primal_rhs(p, param));

  // Pair the solution with the parameter on the other side for the mpKKT check.
  const Vector other = by_u ? mpclo::linalg::subtract(mpclo::linalg::multiply(p.M, sol.x),
                                                       mpclo::linalg::multiply(p.M, p.d))
                             : mpclo::linalg::scaled(-1.0, sol.s);
  const Vector& uu = by_u ? param : other;
  const Vector& vv = by_u ? other : param;
  const mpclo::KktResiduals kkt = mpclo::mpkkt_residual(p, uu, vv, sol.x, sol.w, sol.y);
  if (c.json) {
    std::cout << mpclo::io::solution_json(p, by_u ? "primal" : "rhs", param, sol, kkt);
  } else {
    std::cout << "problem     " << p.name << "\n"
              << "form        " << (by_u ? "P(u)" : "R(v)") << " at " << fmt(param) << "\n"
              << "status      " << mpclo::to_string(sol.status) << "\n"
              << "objective   " << fmt(sol.primal_obj) << "\n"
              << "dual obj    " << fmt(sol.dual_obj) << "\n"
              << "iterations  " << sol.iterations << "\n"
              << (by_u ? "v = M(x-d)  " : "u = -s      ") << fmt(other) << "\n"
              << "kkt primal  " << fmt(kkt.primal) << "\n"
              << "kkt dual    " << fmt(kkt.dual) << "\n"
              << "kkt compl   " << fmt(kkt.complementarity) << "\n";
  }
  switch (sol.status) {
    case mpclo::SolveStatus::kOptimal: return kOk;
    case mpclo::SolveStatus::kPrimalInfeasible:
    case mpclo::SolveStatus::kDualInfeasibleOrUnbounded: return kInfeasible;
    case mpclo::SolveStatus::kNumericalLimit: return kNumerical;
  }
  return kNumerical;
}

int run_map(const Common& c, const std::string& side, const std::string& at) {
  const mpclo::io::ProblemFile f = mpclo::io::read_problem_file(c.file);
  const mpclo::ProblemData& p = f.data;
  const auto pt = point_from(at, "--at", p.r());
  if (!pt) throw Error(ErrorCode::kInvalidArgument, "--at is required");
  const bool dual_side = side == "d";
  const std::string_view label = dual_side ? "phi" : "psi";
  try {
    const mpclo::MappingValue mv = dual_side ? mpclo::eval_phi(p, *pt, {}, c.mapping())
                                             : mpclo::eval_psi(p, *pt, {}, c.mapping());
    if (c.json) {
      std::cout << mpclo::io::mapping_json(label, *pt, mv);
      return kOk;
    }
    std::cout << label << " at " << fmt(*pt) << "\n"
              << "witness     " << fmt(mv.witness) << "\n"
              << "singleton   " << (mv.singleton ? "yes" : "no") << "\n"
              << "slater      " << mpclo::to_string(mv.slater) << "\n"
              << "membership  " << mpclo::to_string(mv.membership) << "\n"
              << "value       " << fmt(mv.optimal_value) << "\n"
              << "extents\n";
    for (std::size_t k = 0; k < mv.extents.size(); ++k) {
      std::cout << "  along " << fmt(mv.directions[k]) << ": [" << fmt(mv.extents[k].lower) << ", "
                << fmt(mv.extents[k].upper) << "]\n";
    }
    return kOk;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kOutsideDomain && e.code() != ErrorCode::kBoundaryUndefined &&
        e.code() != ErrorCode::kNoConvergence) {
      throw;
    }
    if (c.json) {
      std::cout << mpclo::io::mapping_error_json(label, *pt, e);
    } else {
      std::cerr << "mpclo: " << e.what() << "\n";
    }
    return e.code() == ErrorCode::kNoConvergence ? kNumerical : kInfeasible;
  }
}

mpclo::Side parse_side(const std::string& side) {
  return side == "p" ? mpclo::Side::kPrimalThetaP : mpclo::Side::kDualThetaD;
}

mpclo::io::Box box_for(const mpclo::io::ProblemFile& f, const std::string& grid, mpclo::Side side) {
  if (!grid.empty()) return parse_grid(grid, f.data.r());
  const auto& box = side == mpclo::Side::kDualThetaD ? f.domain_d : f.domain_p;
  if (!box) {
    throw Error(ErrorCode::kInvalidArgument,
                "no --grid given and the problem file has no domain box for this side");
  }
  return *box;
}

void print_summary(const mpclo::PartitionSummary& s) {
  std::cout << "regions     nonlinearity " << s.nonlinearity_regions << ", linearity "
            << s.linearity_regions << ", transition " << s.transition_regions << "\n"
            << "cells       nonlinearity " << s.nonlinearity_cells << ", linearity "
            << s.linearity_cells << ", transition " << s.transition_cells << ", outside "
            << s.outside_cells << "\n";
}

struct PartitionArgs {
  std::string side = "d";
  std::string grid;
  std::size_t res = 41;
  std::string out;
  std::string svg;
  std::size_t refine = 0;
};

int run_partition(const Common& c, const PartitionArgs& a) {
  const mpclo::io::ProblemFile f = mpclo::io::read_problem_file(c.file);
  mpclo::GridSpec g;
  g.side = parse_side(a.side);
  g.rectangle = box_for(f, a.grid, g.side);
  g.resolution = a.res;
  mpclo::PartitionOptions o;
  o.mapping = c.mapping();
  o.workers = c.workers;
  const mpclo::PartitionReport report = mpclo::classify_grid(f.data, g, o);
  std::optional<mpclo::RefineReport> refined;
  if (a.refine > 0) refined = mpclo::refine_check(f.data, report, a.refine, o);

  if (!a.out.empty() && !write_file(a.out, mpclo::io::partition_csv(report))) {
    std::cerr << "mpclo: cannot write " << a.out << "\n";
    return kInputError;
  }
  if (!a.svg.empty() && !write_file(a.svg, mpclo::io::partition_svg(report))) {
    std::cerr << "mpclo: cannot write " << a.svg << "\n";
    return kInputError;
  }
  if (c.json) {
    std::cout << mpclo::io::partition_json(report);
  } else if (a.out.empty()) {
    mpclo::io::write_partition_csv(std::cout, report);
  } else {
    std::cout << "grid        " << to_string(g.side) << ", resolution " << g.resolution << "\n";
    print_summary(report.summary);
  }
  if (refined) {
    std::ostream& os = c.json ? std::cerr : std::cout;
    os << "refine      resolution " << refined->fine_resolution << ": nonlinearity "
       << refined->fine.nonlinearity_regions << ", linearity " << refined->fine.linearity_regions
       << " (" << (refined->stable ? "stable" : "changed") << ")\n";
  }
  return kOk;
}

struct VerifyArgs {
  std::vector<std::string> properties;
  std::uint64_t seed = 7;
  std::size_t samples = 100;
  std::string grid;
  std::string projection;
};

int run_verify(const Common& c, const VerifyArgs& a) {
  const mpclo::io::ProblemFile f = mpclo::io::read_problem_file(c.file);
  const mpclo::ProblemData& p = f.data;
  mpclo::PropertyOptions o;
  o.box = box_for(f, a.grid, mpclo::Side::kDualThetaD);
  o.workers = c.workers;
  o.mapping = c.mapping();
  const std::size_t r = p.r();
  Matrix S(r, r);
  if (a.projection.empty()) {
    S(0, 0) = 1.0;
  } else {
    const Vector e = parse_list(a.projection, "--projection");
    if (e.size() != r * r) throw Error(ErrorCode::kInvalidArgument, "--projection needs r*r entries");
    S = Matrix::from_rows(r, r, e);
  }
  std::vector<std::string> which = a.properties;
  if (which.empty()) which = {"monotonicity", "inverse", "complementarity", "projection"};

  std::vector<mpclo::PropertyVerdict> verdicts;
  for (const std::string& name : which) {
    if (name == "monotonicity") {
      verdicts.push_back(mpclo::check_monotonicity(p, a.samples, a.seed, o));
    } else if (name == "inverse") {
      verdicts.push_back(mpclo::check_inverse(p, a.samples, a.seed, o));
    } else if (name == "complementarity") {
      verdicts.push_back(mpclo::check_complementarity(p, a.samples, a.seed, o));
    } else {
      verdicts.push_back(mpclo::check_projection(p, S, a.samples, a.seed, o));
    }
  }
  bool all = true;
  for (const auto& v : verdicts) all = all && v.pass;
  if (c.json) {
    std::cout << mpclo::io::verdicts_json(verdicts);
  } else {
    std::printf("%-16s %8s %8s %24s %10s  %s\n", "property", "samples", "skipped", "worst violation",
                "tolerance", "result");
    for (const auto& v : verdicts) {
      std::printf("%-16s %8zu %8zu %24s %10.0e  %s\n", v.name.c_str(), v.samples, v.skipped,
                  fmt(v.worst_violation).c_str(), v.tolerance, v.pass ? "pass" : "FAIL");
    }
  }
  return all ? kOk : kPropertyFailed;
}

struct ReportArgs {
  std::uint64_t seed = 7;
  std::size_t samples = 200;
  std::size_t res = 21;
};

int run_report(const Common& c, const ReportArgs& a) {
  const mpclo::io::ProblemFile f = mpclo::io::read_problem_file(c.file);
  const mpclo::ProblemData& p = f.data;
  const mpclo::ValidationReport val = mpclo::validate(p);
  const std::vector<mpclo::Vertex> vertices = mpclo::vertex_census(p, a.samples, a.seed);
  mpclo::PartitionOptions o;
  o.mapping = c.mapping();
  o.workers = c.workers;
  std::vector<std::pair<std::string, mpclo::PartitionReport>> grids;
  for (const auto& [side, box] : {std::pair{mpclo::Side::kDualThetaD, &f.domain_d},
                                  std::pair{mpclo::Side::kPrimalThetaP, &f.domain_p}}) {
    if (!*box || p.r() > 2) continue;
    mpclo::GridSpec g;
    g.side = side;
    g.rectangle = **box;
    g.resolution = a.res;
    grids.emplace_back(std::string(to_string(side)), mpclo::classify_grid(p, g, o));
  }
  if (c.json) {
    std::cout << "{\n\"schema\": \"mpclo.report\",\n\"version\": " << mpclo::io::kReportVersion
              << ",\n\"census\": " << mpclo::io::census_json(vertices) << ",\"partitions\": [";
    for (std::size_t k = 0; k < grids.size(); ++k) {
      std::cout << (k ? "," : "") << mpclo::io::partition_json(grids[k].second);
    }
    std::cout << "]\n}\n";
    return kOk;
  }
  std::cout << "problem     " << p.name << " (m=" << p.m() << ", r=" << p.r() << ", q=" << p.q() << ")\n"
            << "ranks       A " << val.rank_a << ", M " << val.rank_m << ", [A;M] " << val.rank_stacked << "\n"
            << "slater      primal " << mpclo::to_string(val.primal_slater) << " (margin "
            << fmt(val.primal_margin) << "), dual " << mpclo::to_string(val.dual_slater)
            << " (margin " << fmt(val.dual_margin) << ")\n";
  for (const std::string& w : val.warnings) std::cout << "warning     " << w << "\n";
  std::cout << "vertices    " << vertices.size() << "\n";
  for (const auto& v : vertices) std::cout << "  image " << fmt(v.image) << "\n";
  for (const auto& [side, rep] : grids) {
    std::cout << "partition   " << side << ", resolution " << rep.grid.resolution << "\n";
    print_summary(rep.summary);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiparametric conic linear optimization toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mpclo 0.1.0");
  Common common;

  auto* solve = app.add_subcommand("solve", "solve P(u) or R(v) once");
  std::string u_text, v_text;
  add_common(solve, common);
  solve->add_option("--u", u_text, "objective parameter, comma separated");
  solve->add_option("--v", v_text, "right-hand-side parameter, comma separated");

  auto* map = app.add_subcommand("map", "evaluate phi (side d) or psi (side p) at a point");
  std::string side = "d", at;
  add_common(map, common);
  add_tolerances(map, common);
  map->add_option("--side", side, "d: phi on the dual parameter set, p: psi on the primal one")
      ->check(CLI::IsMember({"p", "d"}));
  map->add_option("--at", at, "point, comma separated")->required();

  auto* partition = app.add_subcommand("partition", "classify a parameter grid");
  PartitionArgs pa;
  add_common(partition, common);
  add_tolerances(partition, common);
  add_workers(partition, common);
  partition->add_option("--side", pa.side, "d or p")->check(CLI::IsMember({"p", "d"}));
  partition->add_option("--grid", pa.grid, "rectangle x0,x1[,y0,y1]; defaults to the file's domain");
  partition->add_option("--res", pa.res, "points per axis")->check(CLI::Range(3, 100000));
  partition->add_option("--out", pa.out, "CSV output path (stdout when omitted)");
  partition->add_option("--svg", pa.svg, "SVG output path");
  partition->add_option("--refine", pa.refine, "also classify at factor*(res-1)+1 and compare counts");

  auto* verify = app.add_subcommand("verify", "run the property battery");
  VerifyArgs va;
  add_common(verify, common);
  add_tolerances(verify, common);
  add_workers(verify, common);
  verify->add_option("--property", va.properties, "monotonicity, inverse, complementarity, projection")
      ->check(CLI::IsMember({"monotonicity", "inverse", "complementarity", "projection"}));
  verify->add_option("--seed", va.seed, "random seed");
  verify->add_option("--samples", va.samples, "samples (pairs for monotonicity)")->check(CLI::PositiveNumber);
  verify->add_option("--grid", va.grid, "sampling rectangle; defaults to the file's dual domain");
  verify->add_option("--projection", va.projection, "r*r row-major projection for the projection check");

  auto* report = app.add_subcommand("report", "validation, vertex census and partition summaries");
  ReportArgs ra;
  add_common(report, common);
  add_tolerances(report, common);
  add_workers(report, common);
  report->add_option("--seed", ra.seed, "census seed");
  report->add_option("--samples", ra.samples, "census samples")->check(CLI::Range(10, 10000000));
  report->add_option("--res", ra.res, "grid points per axis")->check(CLI::Range(3, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve) return run_solve(common, u_text, v_text);
    if (*map) return run_map(common, side, at);
    if (*partition) return run_partition(common, pa);
    if (*verify) return run_verify(common, va);
    if (*report) return run_report(common, ra);
  } catch (const Error& e) {
    std::cerr << "mpclo: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
