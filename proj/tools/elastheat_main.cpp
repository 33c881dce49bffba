// Experiment runner: declares domains, tensors, partitions and estimate
// suites from a flat config file, emits machine-readable reports and
// plot-ready CSV data.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "elastheat/mesh.hpp"
#include "elastheat/runner.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return nlohmann::json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"elastheat: heat-kernel and Green-function laboratory for 2D elasticity"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int jobs = 1;
  CLI::App* run = app.add_subcommand("run", "run the suites declared in a config file");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  run->add_option("--jobs", jobs, "parallel jobs for independent columns")->default_val(1);
  run->add_option("--out", out_dir, "output directory (overrides config and ELASTHEAT_OUT)");

  std::string report_a, report_b;
  double rel_tol = 0.0;
  CLI::App* cmp = app.add_subcommand("compare", "field-wise diff of two run reports");
  cmp->add_option("a", report_a, "first report.json")->required();
  cmp->add_option("b", report_b, "second report.json")->required();
  cmp->add_option("--rel-tol", rel_tol, "relative threshold for numeric fields")
      ->default_val(0.0);

  std::string domain_path;
  double mesh_h = 0.1;
  CLI::App* info = app.add_subcommand("mesh-info", "triangulate a domain and print statistics");
  info->add_option("domain", domain_path, "domain description (JSON)")->required();
  info->add_option("--target-h", mesh_h, "mesh size target")->default_val(0.1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      elastheat::ExperimentConfig config = elastheat::load_config_file(config_path);
      elastheat::RunOptions opts;
      opts.jobs = jobs;
      if (!out_dir.empty()) {
        opts.out_dir_override = out_dir;
      } else if (const char* env = std::getenv("ELASTHEAT_OUT")) {
        opts.out_dir_override = env;
      }
      const elastheat::RunResult result = elastheat::run_experiment(config, opts);
      for (const auto& [name, suite] : result.report.at("suites").items()) {
        std::cout << (suite.value("pass", false) ? "PASS " : "FAIL ") << name << "\n";
      }
      std::cout << "report: " << result.report_path << "\n";
      return result.all_pass ? 0 : 1;
    }
    if (cmp->parsed()) {
      const elastheat::CompareResult diff =
          elastheat::compare_reports(load_json(report_a), load_json(report_b), rel_tol);
      if (diff.match) {
        std::cout << "reports match\n";
        return 0;
      }
      for (const std::string& d : diff.differences) std::cout << d << "\n";
      return 1;
    }
    if (info->parsed()) {
      const elastheat::PolygonalDomain domain =
          elastheat::parse_domain(load_json(domain_path));
      const elastheat::Mesh mesh = elastheat::triangulate(domain, mesh_h);
      const elastheat::GeometryFlags flags = elastheat::geometry_flags(domain, 0.25, 4.0, 64);
      nlohmann::json j = {
          {"nodes", mesh.node_count()},
          {"triangles", mesh.triangle_count()},
          {"h_max", mesh.h_max},
          {"area", mesh.total_area()},
          {"boundary_edges", mesh.boundary_edges.size()},
          {"corkscrew_pass", flags.corkscrew_d.pass},
          {"corkscrew_worst_ratio", flags.corkscrew_d.worst_ratio},
          {"interior_density_beta", flags.interior_density_beta},
          {"has_lipschitz_D_portion", flags.has_lipschitz_d_portion},
      };
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
