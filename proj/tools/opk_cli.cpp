//! Command-line front end: runs the check suites for a configured model and
//! emits a machine-readable report.
//!
//! Exit codes: 0 = all gating checks pass, 1 = at least one gating check
//! failed, 2 = configuration or usage error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <boost/program_options.hpp>

#include "opk/opk.hpp"

namespace po = boost::program_options;

namespace {

void print_report(const opk::Report& report) {
  std::vector<opk::CheckRecord> sorted = report.checks;
  std::sort(sorted.begin(), sorted.end(),
            [](const opk::CheckRecord& a, const opk::CheckRecord& b) { return a.name < b.name; });
  for (const opk::CheckRecord& r : sorted) {
    const char* status = r.pass ? "[PASS]" : (r.gating ? "[FAIL]" : "[FLAG]");
    std::cout << status << ' ' << r.name << "  value=" << r.value << "  tol=" << r.tol;
    if (!r.note.empty()) std::cout << "  (" << r.note << ')';
    std::cout << '\n';
  }
  for (const std::string& flag : report.flags) std::cout << "[NOTE] " << flag << '\n';
  std::cout << (report.overall_pass() ? "OVERALL PASS" : "OVERALL FAIL") << " ("
            << sorted.size() << " checks, " << report.gating_failures() << " gating failures)"
            << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  std::string command;
  std::string model;
  std::string config_path;
  std::string report_path;
  opk::RunOptions opts;

  po::options_description visible("Options");
  visible.add_options()                                                              //
      ("help,h", "show this help")                                                   //
      ("config", po::value<std::string>(&config_path), "JSON configuration file")    //
      ("model", po::value<std::string>(&model), "model name (overrides config)")     //
      ("seed", po::value<std::uint64_t>(&opts.seed)->default_value(12345), "seed")   //
      ("tol-scale", po::value<double>(&opts.tol_scale)->default_value(1.0),
       "scale factor applied to every tolerance")                                    //
      ("report", po::value<std::string>(&report_path), "report output path (.json or .csv)");

  po::options_description hidden;
  hidden.add_options()("command", po::value<std::string>(&command))(
      "model-positional", po::value<std::string>());
  po::positional_options_description positional;
  positional.add("command", 1);
  positional.add("model-positional", 1);

  po::options_description all;
  all.add(visible).add(hidden);

  po::variables_map vm;
  try {
    po::store(po::command_line_parser(argc, argv).options(all).positional(positional).run(), vm);
    po::notify(vm);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  const std::string usage =
      "usage: opk <check|geometry|quantize|example|all> [model] [options]\n"
      "models: bidisc, moment:gaussian, moment:discrete, tabulated (needs --config)";
  if (vm.count("help") || command.empty()) {
    std::cout << usage << '\n' << visible << std::endl;
    return vm.count("help") ? 0 : 2;
  }
  const std::vector<std::string> commands = {"check", "geometry", "quantize", "example", "all"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    std::cerr << "error: unknown command '" << command << "'\n" << usage << std::endl;
    return 2;
  }
  if (vm.count("model-positional")) {
    if (!model.empty() && model != vm["model-positional"].as<std::string>()) {
      std::cerr << "error: conflicting model arguments" << std::endl;
      return 2;
    }
    model = vm["model-positional"].as<std::string>();
  }

  nlohmann::json config = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file '" << config_path << "'" << std::endl;
      return 2;
    }
    try {
      in >> config;
    } catch (const std::exception& e) {
      std::cerr << "error: config parse failure: " << e.what() << std::endl;
      return 2;
    }
  }
  if (!model.empty()) config["model"] = model;
  opts.config = config;

  opk::Report report;
  try {
    if (command == "all") {
      report = opk::run_all(opts);
    } else {
      const opk::ModelData data = opk::make_model(config, opts.seed);
      if (command == "check") {
        report = opk::run_check(data, opts);
      } else if (command == "geometry") {
        report = opk::run_geometry(data, opts);
      } else if (command == "quantize") {
        report = opk::run_quantize(data, opts);
      } else {
        report = opk::run_example(data, opts);
      }
    }
  } catch (const opk::ConfigError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error while running checks: " << e.what() << std::endl;
    return 1;
  }

  print_report(report);
  if (!report_path.empty()) {
    try {
      opk::write_report(report, report_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << std::endl;
      return 2;
    }
  }
  return report.overall_pass() ? 0 : 1;
}
