#pragma once

#include <diamantine/auxetic.hpp>
#include <diamantine/cayley2d.hpp>
#include <diamantine/critical.hpp>
#include <diamantine/error.hpp>
#include <diamantine/framework.hpp>
#include <diamantine/gram.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace diamantine::io {

using json = nlohmann::json;

/// Shortest text that reads back as the same double (17 significant digits).
inline std::string persist(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Value rounded to 9 significant digits, for human-facing reports.
inline double readable(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

inline json readable_vector(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(readable(v(i)));
  return out;
}

inline json readable_matrix(const Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(readable_vector(m.row(i).transpose()));
  return out;
}

/// Parsed input document: the framework plus the optional sampling seed.
struct SpecDocument {
  FrameworkSpec spec;
  std::optional<std::uint64_t> seed;
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path, const std::string& what) {
  throw Error(Errc::parse, "cli_io", path + ": " + what);
}

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) parse_fail(path, "expected a finite number");
  return x;
}

inline Vector vector_at(const json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Index>(i)) = number_at(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail("$", std::string("malformed document: ") + e.what());
  }
}

inline int dimension_at(const json& doc) {
  if (!doc.contains("dimension")) parse_fail("$.dimension", "missing required field");
  const auto& dim = doc["dimension"];
  if (!dim.is_number_integer()) parse_fail("$.dimension", "expected an integer");
  const int d = dim.get<int>();
  if (d < 2) throw Error(Errc::invalid_dimension, "cli_io", "$.dimension: must be at least 2");
  return d;
}

}  // namespace detail

/// Read a spec document. Exactly one construction path must be present:
/// `edge_vectors`, `preset: "standard"`, or `squared_lengths` with
/// `mode: "critical-max"`.
inline SpecDocument parse_spec_document(const std::string& text) {
  const json doc = detail::parse_json(text);
  if (!doc.is_object()) detail::parse_fail("$", "expected an object");
  static const std::set<std::string> known{"dimension", "edge_vectors", "preset",
                                           "squared_lengths", "mode", "seed"};
  for (const auto& item : doc.items())
    if (!known.count(item.key())) detail::parse_fail("$." + item.key(), "unknown field");

  const int d = detail::dimension_at(doc);
  const int paths = static_cast<int>(doc.contains("edge_vectors")) +
                    static_cast<int>(doc.contains("preset")) +
                    static_cast<int>(doc.contains("squared_lengths") || doc.contains("mode"));
  if (paths != 1)
    detail::parse_fail("$", "exactly one of edge_vectors, preset, squared_lengths+mode is required");

  std::optional<std::uint64_t> seed;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) detail::parse_fail("$.seed", "expected a non-negative integer");
    seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("edge_vectors")) {
    const auto& ev = doc["edge_vectors"];
    if (!ev.is_array()) detail::parse_fail("$.edge_vectors", "expected an array of vectors");
    if (static_cast<int>(ev.size()) != d + 1)
      throw Error(Errc::shape, "cli_io",
                  "$.edge_vectors: expected " + std::to_string(d + 1) + " vectors, got " +
                      std::to_string(ev.size()));
    std::vector<Vector> vectors;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const std::string path = "$.edge_vectors[" + std::to_string(i) + "]";
      Vector v = detail::vector_at(ev[i], path);
      if (v.size() != d)
        throw Error(Errc::shape, "cli_io",
                    path + ": expected " + std::to_string(d) + " coordinates, got " +
                        std::to_string(v.size()));
      vectors.push_back(std::move(v));
    }
    return {make_from_vectors(std::span<const Vector>(vectors)), seed};
  }

  if (doc.contains("preset")) {
    if (!doc["preset"].is_string() || doc["preset"].get<std::string>() != "standard")
      detail::parse_fail("$.preset", "the only preset is \"standard\"");
    return {make_standard(d), seed};
  }

  if (!doc.contains("squared_lengths")) detail::parse_fail("$.squared_lengths", "missing field");
  if (!doc.contains("mode") || !doc["mode"].is_string() || doc["mode"].get<std::string>() != "critical-max")
    detail::parse_fail("$.mode", "expected \"critical-max\"");
  const Vector s = detail::vector_at(doc["squared_lengths"], "$.squared_lengths");
  if (s.size() != d + 1)
    throw Error(Errc::shape, "cli_io",
                "$.squared_lengths: expected " + std::to_string(d + 1) + " entries");
  Vector sorted = s;
  std::sort(sorted.begin(), sorted.end());
  const auto roots = find_critical_alphas(sorted);
  // The equal-angle Gram matrix is permutation-covariant, so the root found
  // on sorted lengths realizes the lengths in their given order.
  return {realize_critical(roots.front(), s), seed};
}

inline FrameworkSpec parse_spec(const std::string& text) { return parse_spec_document(text).spec; }

/// Canonical document for a configuration; numbers round-trip exactly.
inline std::string serialize_spec(const FrameworkSpec& spec) {
  std::ostringstream out;
  out << "{\"dimension\": " << spec.dimension() << ", \"edge_vectors\": [";
  for (Index i = 0; i < spec.edge_vectors().cols(); ++i) {
    out << (i ? ", [" : "[");
    for (Index k = 0; k < spec.dimension(); ++k) out << (k ? ", " : "") << persist(spec.edge(i)(k));
    out << "]";
  }
  out << "]}\n";
  return out.str();
}

/// ω together with the squared lengths, enough to rebuild the configuration.
inline std::string serialize_omega(const Matrix& omega, const Vector& s) {
  std::ostringstream out;
  out << "{\"dimension\": " << omega.rows() << ", \"squared_lengths\": [";
  for (Index i = 0; i < s.size(); ++i) out << (i ? ", " : "") << persist(s(i));
  out << "], \"omega\": [";
  for (Index i = 0; i < omega.rows(); ++i) {
    out << (i ? ", [" : "[");
    for (Index j = 0; j < omega.cols(); ++j) out << (j ? ", " : "") << persist(omega(i, j));
    out << "]";
  }
  out << "]}\n";
  return out.str();
}

struct OmegaDocument {
  Matrix omega;
  Vector squared_lengths;
};

inline OmegaDocument parse_omega_document(const std::string& text) {
  const json doc = detail::parse_json(text);
  if (!doc.is_object()) detail::parse_fail("$", "expected an object");
  for (const auto& item : doc.items())
    if (item.key() != "dimension" && item.key() != "squared_lengths" && item.key() != "omega")
      detail::parse_fail("$." + item.key(), "unknown field");
  const int d = detail::dimension_at(doc);
  if (!doc.contains("squared_lengths")) detail::parse_fail("$.squared_lengths", "missing field");
  if (!doc.contains("omega") || !doc["omega"].is_array())
    detail::parse_fail("$.omega", "expected an array of rows");
  OmegaDocument out;
  out.squared_lengths = detail::vector_at(doc["squared_lengths"], "$.squared_lengths");
  const auto& rows = doc["omega"];
  if (static_cast<int>(rows.size()) != d || out.squared_lengths.size() != d + 1)
    throw Error(Errc::shape, "cli_io", "$.omega: expected d rows and d+1 squared lengths");
  out.omega.resize(d, d);
  for (int i = 0; i < d; ++i) {
    const Vector row = detail::vector_at(rows[i], "$.omega[" + std::to_string(i) + "]");
    if (row.size() != d) throw Error(Errc::shape, "cli_io", "$.omega[" + std::to_string(i) + "]: wrong length");
    out.omega.row(i) = row.transpose();
  }
  return out;
}

/// Structured analysis of one configuration.
inline json analyze_report(const FrameworkSpec& spec, std::uint64_t seed = kDefaultSamplingSeed) {
  if (spec.degenerate())
    throw Error(Errc::degenerate_cell, "framework_core",
                "degenerate unit cell: the lattice generators are linearly dependent (V = 0)");

  json report;
  const Vector& s = spec.squared_lengths();
  const Matrix omega = omega_of(spec);
  report["dimension"] = spec.dimension();
  report["squared_lengths"] = readable_vector(s);
  report["volume"] = readable(volume(spec));
  report["omega"] = readable_matrix(omega);

  Vector sorted = s;
  std::sort(sorted.begin(), sorted.end());
  const auto crit = criticality_report(sorted);
  json roots = json::array();
  for (const auto& r : crit.roots)
    roots.push_back({{"alpha", readable(r.value)},
                     {"kind", to_string(r.kind)},
                     {"bracket", {readable(r.bracket.lo), readable(r.bracket.hi)}},
                     {"multiplicity", r.multiplicity}});
  report["critical_alphas"] = roots;
  report["max_volume"] = readable(crit.max_volume);
  report["saddle_present"] = crit.saddle_config.has_value();

  const auto multipliers = lagrange_multipliers(spec);
  report["lagrange_residual"] = readable(multipliers.residual);
  report["lagrange_multipliers"] = readable_vector(multipliers.lambda);
  report["is_critical"] = multipliers.critical;

  const auto verdict = capability_test(spec, seed);
  json capability;
  capability["verdict"] = to_string(verdict.verdict);
  capability["normal"] = readable_matrix(verdict.normal);
  capability["normal_eigenvalues"] = readable_vector(verdict.normal_eigenvalues);
  if (verdict.certificate) {
    capability["certificate_omega_dot"] = readable_matrix(verdict.certificate->omega_dot);
    capability["certificate_margin"] = readable(verdict.margin);
  }
  report["capability"] = capability;

  if (cayley2d::has_unit_lengths(spec)) {
    const auto w = cayley2d::OmegaPoint2::from_matrix(omega);
    report["planar_unit"] = {
        {"cubic_residual", readable(cayley2d::f_cayley(w))},
        {"halfspace_value", readable(w.w11 - w.w12 + w.w22)},
        {"halfspace", to_string(cayley2d::auxetic_halfspace_test(w))},
        {"pointedness", cayley2d::to_string(cayley2d::pointedness_test(spec))},
    };
  }
  return report;
}

inline std::vector<std::string> trajectory_header(int d) {
  std::vector<std::string> cols{"tau"};
  for (int i = 0; i <= d; ++i)
    for (int k = 0; k < d; ++k) cols.push_back("p" + std::to_string(i) + "_" + std::to_string(k));
  for (int i = 1; i <= d; ++i)
    for (int j = i; j <= d; ++j) cols.push_back("w" + std::to_string(i) + std::to_string(j));
  cols.push_back("V");
  cols.push_back("increment_min_eig");
  return cols;
}

/// Comma-separated trajectory table with a header row.
inline void write_trajectory_csv(const Trajectory& path, std::ostream& out) {
  if (path.samples.empty()) return;
  const int d = path.samples.front().spec.dimension();
  const auto header = trajectory_header(d);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& sample : path.samples) {
    out << persist(sample.tau);
    const Matrix& p = sample.spec.edge_vectors();
    for (Index i = 0; i < p.cols(); ++i)
      for (Index k = 0; k < p.rows(); ++k) out << "," << persist(p(k, i));
    for (Index i = 0; i < d; ++i)
      for (Index j = i; j < d; ++j) out << "," << persist(sample.omega(i, j));
    out << "," << persist(sample.volume);
    out << "," << (std::isnan(sample.increment_min_eigenvalue) ? std::string("nan")
                                                                : persist(sample.increment_min_eigenvalue));
    out << "\n";
  }
}

/// SVG drawing of a planar patch, y axis pointing up.
inline std::string render_svg(const Patch& patch) {
  if (patch.vertices.empty() || patch.vertices.front().position.size() != 2)
    throw Error(Errc::format, "cli_io", "svg output needs a planar (d = 2) framework");
  double xmin = patch.vertices.front().position(0), xmax = xmin;
  double ymin = patch.vertices.front().position(1), ymax = ymin;
  for (const auto& v : patch.vertices) {
    xmin = std::min(xmin, v.position(0));
    xmax = std::max(xmax, v.position(0));
    ymin = std::min(ymin, v.position(1));
    ymax = std::max(ymax, v.position(1));
  }
  const double mx = 0.05 * std::max(xmax - xmin, 1e-9);
  const double my = 0.05 * std::max(ymax - ymin, 1e-9);
  const double x0 = xmin - mx, width = xmax - xmin + 2 * mx;
  const double y0 = -(ymax + my), height = ymax - ymin + 2 * my;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << persist(x0) << " " << persist(y0)
      << " " << persist(width) << " " << persist(height) << "\">\n";
  out << "<g stroke=\"black\" stroke-width=\"1.5\" vector-effect=\"non-scaling-stroke\" "
         "stroke-linecap=\"round\">\n";
  for (const auto& e : patch.edges) {
    const Vector& a = patch.vertices[e.tail].position;
    const Vector& b = patch.vertices[e.head].position;
    out << "<line x1=\"" << persist(a(0)) << "\" y1=\"" << persist(-a(1)) << "\" x2=\"" << persist(b(0))
        << "\" y2=\"" << persist(-b(1)) << "\" vector-effect=\"non-scaling-stroke\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

/// One edge per line: tail coordinates, two spaces, head coordinates.
inline std::string render_segments(const Patch& patch) {
  std::ostringstream out;
  for (const auto& e : patch.edges) {
    const Vector& a = patch.vertices[e.tail].position;
    const Vector& b = patch.vertices[e.head].position;
    for (Index k = 0; k < a.size(); ++k) out << (k ? " " : "") << persist(a(k));
    out << "  ";
    for (Index k = 0; k < b.size(); ++k) out << (k ? " " : "") << persist(b(k));
    out << "\n";
  }
  return out.str();
}

inline json topology_report_json(const cayley2d::TopologyReport& report, const Vector& s) {
  json comps = json::array();
  for (const auto& c : report.components)
    comps.push_back({{"cells", c.cells}, {"euler_characteristic", c.euler_characteristic}, {"sign", c.sign}});
  return {{"squared_lengths", readable_vector(s)},
          {"grid", report.grid},
          {"component_count", report.components.size()},
          {"components", comps},
          {"saddle_present", report.saddle_present}};
}

/// Parse the strain steering target: d(d+1)/2 reals, upper triangle row by row.
inline Matrix parse_strain_target(const std::string& text, int d) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::parse, "cli_io", "--policy strain: '" + item + "' is not a number");
    }
  }
  if (static_cast<int>(values.size()) != d * (d + 1) / 2)
    throw Error(Errc::parse, "cli_io",
                "--policy strain: expected " + std::to_string(d * (d + 1) / 2) + " values for d = " +
                    std::to_string(d));
  Matrix target(d, d);
  std::size_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) target(i, j) = target(j, i) = values[k++];
  return target;
}

}  // namespace diamantine::io
