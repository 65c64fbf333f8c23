#include <iostream>

#include <CLI11.hpp>

#include "resdet/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Residue traces and residue determinants of classical symbols on tori"};
  std::string config;
  resdet::cli::Flags flags;
  std::string task, format = "json";
  int sphere_res = 0, contour_nodes = 0, x_grid = 0;
  double theta = 0.0;
  unsigned long long seed = 0;

  app.add_option("--config", config, "Task configuration (JSON)")->required();
  auto* task_opt = app.add_option("--task", task, "Run only the task with this name or kind");
  app.add_option("--out", flags.out, "Directory for report files")->capture_default_str();
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  auto* sphere_opt = app.add_option("--sphere-res", sphere_res, "Cosphere quadrature resolution")->check(CLI::Range(2, 256));
  auto* contour_opt = app.add_option("--contour-nodes", contour_nodes, "Nodes per contour circle")->check(CLI::Range(8, 4096));
  auto* xgrid_opt = app.add_option("--x-grid", x_grid, "Trapezoid points per torus axis")->check(CLI::Range(1, 512));
  auto* theta_opt = app.add_option("--theta", theta, "Principal angle in degrees");
  app.add_flag("--verify", flags.verify, "Spot-check the resolvent identity and cross-check contour logs");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random fixtures");
  app.add_flag_callback("--version", [] {
    std::cout << "resdet " << resdet::cli::kSoftwareVersion << '\n';
    std::exit(0);
  }, "Print the version");

  CLI11_PARSE(app, argc, argv);

  flags.format = format;
  if (*task_opt) flags.task = task;
  if (*sphere_opt) flags.sphere_res = sphere_res;
  if (*contour_opt) flags.contour_nodes = contour_nodes;
  if (*xgrid_opt) flags.x_grid = x_grid;
  if (*theta_opt) flags.theta_degrees = theta;
  if (*seed_opt) flags.seed = seed;
  return resdet::cli::run(config, flags, std::cout, std::cerr);
}
