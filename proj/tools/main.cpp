// diamantine: command-line front end for the diamantine framework library.
//
//   diamantine analyze <spec>
//   diamantine trace <spec> --steps N --step-size H --policy max-margin|strain:<reals> -o <file>
//   diamantine render <spec> --reps K --format svg|segments -o <file>
//   diamantine probe-topology --s A,B,C --grid N
//   diamantine omega to|from <file>

#include <diamantine/diamantine.hpp>
#include <diamantine/io.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace diamantine;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::parse, "cli_io", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::invalid_argument, "cli_io", "cannot write '" + path + "'");
  out << content;
}

int run_analyze(const std::string& spec_path) {
  const auto doc = io::parse_spec_document(read_file(spec_path));
  std::cout << io::analyze_report(doc.spec, doc.seed.value_or(kDefaultSamplingSeed)).dump(2) << "\n";
  return 0;
}

int run_trace(const std::string& spec_path, int steps, double step_size, const std::string& policy_text,
              const std::string& output) {
  const auto doc = io::parse_spec_document(read_file(spec_path));
  SteeringPolicy policy;
  if (policy_text.rfind("strain:", 0) == 0)
    policy = SteeringPolicy::strain(io::parse_strain_target(policy_text.substr(7), doc.spec.dimension()));
  else if (policy_text != "max-margin")
    throw Error(Errc::parse, "cli_io", "--policy: expected max-margin or strain:<reals>");

  const auto path =
      trace_auxetic_path(doc.spec, steps, step_size, policy, doc.seed.value_or(kDefaultSamplingSeed));
  std::ostringstream csv;
  io::write_trajectory_csv(path, csv);
  write_file(output, csv.str());

  double min_increment = std::numeric_limits<double>::infinity();
  for (const auto& s : path.samples)
    if (!std::isnan(s.increment_min_eigenvalue)) min_increment = std::min(min_increment, s.increment_min_eigenvalue);
  std::ostream& summary = (output.empty() || output == "-") ? std::cerr : std::cout;
  summary << std::setprecision(9) << "samples: " << path.samples.size() << "\n"
          << "stop: " << to_string(path.reason) << "\n"
          << "initial |V|: " << io::readable(std::abs(path.samples.front().volume)) << "\n"
          << "final |V|: " << io::readable(std::abs(path.samples.back().volume)) << "\n"
          << "min increment eigenvalue: ";
  if (std::isinf(min_increment))
    summary << "n/a\n";
  else
    summary << min_increment << "\n";
  return 0;
}

int run_render(const std::string& spec_path, int reps, const std::string& format, const std::string& output) {
  const auto spec = io::parse_spec(read_file(spec_path));
  if (format == "svg" && spec.dimension() != 2)
    throw Error(Errc::format, "cli_io", "svg output needs d = 2; use --format segments");
  const auto patch = generate_patch(spec, reps);
  write_file(output, format == "svg" ? io::render_svg(patch) : io::render_segments(patch));
  return 0;
}

int run_probe(const std::string& lengths, int grid) {
  std::vector<double> values;
  std::stringstream in(lengths);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(Errc::parse, "cli_io", "--s: '" + item + "' is not a number");
    }
  }
  if (values.size() != 3) throw Error(Errc::parse, "cli_io", "--s: expected three squared lengths");
  const Vector s = Eigen::Map<Vector>(values.data(), 3);
  std::cout << io::topology_report_json(cayley2d::topology_probe(s, grid), s).dump(2) << "\n";
  return 0;
}

int run_omega(const std::string& direction, const std::string& path) {
  if (direction == "to") {
    const auto spec = io::parse_spec(read_file(path));
    std::cout << io::serialize_omega(omega_of(spec), spec.squared_lengths());
  } else {
    const auto doc = io::parse_omega_document(read_file(path));
    std::cout << io::serialize_spec(realize_from_omega(doc.omega, doc.squared_lengths));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diamantine periodic frameworks: volume critical points and auxetic paths"};
  app.require_subcommand(1);

  std::string spec_path, output, policy = "max-margin", format = "svg", lengths, direction;
  int steps = 100, reps = 2, grid = 512;
  double step_size = 1e-3;

  auto* analyze = app.add_subcommand("analyze", "Report volume, critical points and auxetic capability");
  analyze->add_option("spec", spec_path, "Spec document (JSON)")->required();

  auto* trace = app.add_subcommand("trace", "Trace an auxetic deformation path");
  trace->add_option("spec", spec_path, "Spec document (JSON)")->required();
  trace->add_option("--steps", steps, "Number of steps")->check(CLI::NonNegativeNumber);
  trace->add_option("--step-size", step_size, "Step length h");
  trace->add_option("--policy", policy, "max-margin or strain:<upper-triangle reals>");
  trace->add_option("-o,--output", output, "Trajectory CSV (default stdout)");

  auto* render = app.add_subcommand("render", "Export a finite patch of the framework");
  render->add_option("spec", spec_path, "Spec document (JSON)")->required();
  render->add_option("--reps", reps, "Repetitions per lattice direction");
  render->add_option("--format", format, "svg or segments")->check(CLI::IsMember({"svg", "segments"}));
  render->add_option("-o,--output", output, "Output file (default stdout)");

  auto* probe = app.add_subcommand("probe-topology", "Count deformation-space components for d = 2");
  probe->add_option("--s", lengths, "Squared lengths A,B,C")->required();
  probe->add_option("--grid", grid, "Torus grid resolution");

  auto* omega = app.add_subcommand("omega", "Convert between spec and lattice Gram documents");
  omega->add_option("direction", direction, "to or from")->required()->check(CLI::IsMember({"to", "from"}));
  omega->add_option("file", spec_path, "Input document")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return run_analyze(spec_path);
    if (*trace) return run_trace(spec_path, steps, step_size, policy, output);
    if (*render) return run_render(spec_path, reps, format, output);
    if (*probe) return run_probe(lengths, grid);
    if (*omega) return run_omega(direction, spec_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
