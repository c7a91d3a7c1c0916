#pragma once

// Machine-readable output: versioned JSON reports, CSV tables, atomic writes.

#include "wsigma/core.hpp"
#include "wsigma/flow.hpp"
#include "wsigma/identity_suite.hpp"
#include "wsigma/minimality.hpp"
#include "wsigma/variation.hpp"

#include "json.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace wsigma {

inline constexpr const char* kReportSchema = "wsigma-report/1";

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal text; always '.' as separator.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
    rows_.push_back(std::move(row));
  }
  std::size_t size() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += quote(cells[i]);
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes via a temporary file in the same directory and renames it into
/// place, so readers never observe a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move report into place at " + path.string() + ": " + ec.message());
  }
}

inline Json report_header(const std::string& command) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  return j;
}

// ---------------------------------------------------------------------------
// Serializers
// ---------------------------------------------------------------------------

inline Json to_json(const FirstVariationTerms& t) {
  return Json{{"principal", t.principal},
              {"hessian", t.hessian},
              {"curvature", t.curvature},
              {"weight_gradient", t.weight_gradient},
              {"weight_rate", t.weight_rate}};
}

inline Json to_json(const FirstVariationReport& r) {
  Json j{{"route", r.route},         {"analytic", r.analytic},   {"fd", r.fd},
         {"abs_error", r.abs_error}, {"rel_error", r.rel_error}, {"terms", to_json(r.terms)}};
  if (!std::isnan(r.curvature_swapped_order)) j["curvature_swapped_order"] = r.curvature_swapped_order;
  return j;
}

inline Json summary_json(const ResidualField& f) { return Json{{"l2", f.l2}, {"max", f.max}}; }

inline Json to_json(const IdentityResult& r) {
  return Json{{"name", r.name},
              {"description", r.description},
              {"instances", r.instances},
              {"evaluations", r.evaluations},
              {"max_residual", r.max_residual},
              {"tolerance", r.tolerance},
              {"worst_instance", r.worst_instance},
              {"passed", r.passed()}};
}

inline Json to_json(const AdjudicationReport& a) {
  Json samples = Json::array();
  for (const auto& s : a.samples)
    samples.push_back(Json{{"rho", s.rho}, {"dF_drho", s.dF_drho}, {"first_variation", s.first_variation},
                           {"grouped_weight", s.grouped_weight}});
  return Json{{"r", a.r},
              {"mu0", a.mu0},
              {"fd_zeros", a.fd_zeros},
              {"first_variation_zeros", a.first_variation_zeros},
              {"grouped_weight_zeros", a.grouped_weight_zeros},
              {"resolution", a.resolution},
              {"first_variation_matches", a.first_variation_matches},
              {"grouped_weight_matches", a.grouped_weight_matches},
              {"sign_agreement_first_variation", a.sign_agreement_first_variation},
              {"sign_agreement_grouped_weight", a.sign_agreement_grouped_weight},
              {"verdict", a.verdict},
              {"samples", samples}};
}

inline Json to_json(const FlowTrace& t) {
  Json j{{"direction", t.direction},
         {"converged", t.converged},
         {"status", t.status},
         {"rejected_steps", t.rejected_steps},
         {"steps", t.size() ? t.size() - 1 : 0}};
  j["target"] = t.target ? Json(*t.target) : Json(nullptr);
  if (t.size()) {
    j["final"] = Json{{"time", t.time.back()}, {"radius", t.radius.back()}, {"functional", t.functional.back()}};
    j["initial"] = Json{{"time", t.time.front()}, {"radius", t.radius.front()}, {"functional", t.functional.front()}};
  }
  return j;
}

inline CsvTable to_csv(const FlowTrace& t) {
  CsvTable csv({"step", "time", "radius", "functional", "residual"});
  for (std::size_t k = 0; k < t.size(); ++k)
    csv.add_row({std::to_string(k), format_double(t.time[k]), format_double(t.radius[k]),
                 format_double(t.functional[k]), format_double(t.residual[k])});
  return csv;
}

/// Node coordinates (chart and ambient) with the residual value.
inline CsvTable residual_csv(const GeometryField& geom, const ResidualField& f) {
  std::vector<std::string> header;
  for (int a = 0; a < geom.dim(); ++a) header.push_back("u" + std::to_string(a + 1));
  const auto m = geom.ambient().embedding_dim();
  for (int a = 0; a < m; ++a) header.push_back("x" + std::to_string(a + 1));
  header.push_back("value");
  CsvTable csv(header);
  for (std::size_t i = 0; i < geom.size(); ++i) {
    std::vector<std::string> row;
    for (int a = 0; a < geom.dim(); ++a) row.push_back(format_double(geom[i].chart(a)));
    for (int a = 0; a < m; ++a) row.push_back(format_double(geom[i].position()(a)));
    row.push_back(format_double(f.values[i]));
    csv.add_row(std::move(row));
  }
  return csv;
}

}  // namespace wsigma
