#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "floorgen/annotate.hpp"
#include "floorgen/error.hpp"
#include "floorgen/evaluate.hpp"
#include "floorgen/floorplan.hpp"
#include "floorgen/pipeline.hpp"
#include "floorgen/point_cloud.hpp"
#include "floorgen/synth.hpp"

namespace {

using namespace floorgen;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

PipelineConfig config_from_option(const std::string& config_path) {
  return config_path.empty() ? PipelineConfig{} : load_config(config_path);
}

int cmd_run(const std::string& input, const std::string& labels, const std::string& drawing,
            const std::string& config_path, const std::string& out,
            const std::string& svg_out, std::uint64_t seed, bool has_seed, bool verbose) {
  PipelineConfig config = config_from_option(config_path);
  if (has_seed) config.seed = seed;
  PipelineResult result = run_pipeline_files(input, labels, drawing, config);
  save_floorplan(result.plan, out);
  if (!svg_out.empty()) write_text(svg_out, floorplan_to_svg(result.plan));
  if (verbose) std::cerr << result.report_text();
  std::cout << "walls " << result.plan.walls.size() << "  doors " << result.plan.doors.size()
            << "  stairs " << result.plan.stairs.size() << "  rooms "
            << result.plan.rooms.size() << "\n";
  return 0;
}

int cmd_annotate(const std::string& input, const std::string& drawing_path,
                 const std::string& config_path, const std::string& out) {
  PipelineConfig config = config_from_option(config_path);
  LabeledPointCloud cloud = load_point_cloud(input);
  DrawingSet drawing = load_drawing(drawing_path);

  auto [normalized, tf] = normalize_coordinates(cloud, config.normalize);
  ZHistogram hist = compute_z_histogram(normalized, config.level_bin_size);
  FloorCeilingLevels levels;
  try {
    levels = detect_floor_ceiling(hist, config.level_prominence, config.level_min_story);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoPeaksFound) throw;
    levels = fallback_levels(normalized, config.level_bin_size, config.level_min_story);
  }
  LabeledPointCloud labeled = annotate_from_drawing(normalized, drawing, levels,
                                                    config.annotation);
  save_labels(labeled, out);
  std::cout << "labeled " << labeled.size() << " points\n";
  return 0;
}

int cmd_synth(const std::string& fixture, const std::string& out_dir, std::uint64_t seed,
              const std::string& format) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  CloudFormat cf = format == "xyz" ? CloudFormat::Xyz : CloudFormat::PlyBinaryLE;
  const char* ext = format == "xyz" ? ".cloud.xyz" : ".cloud.ply";

  for (const auto& [name, spec] : standard_corpus(seed)) {
    if (fixture != "all" && fixture != name) continue;
    auto [cloud, gt] = generate_building(spec);
    std::string base = (fs::path(out_dir) / name).string();
    save_point_cloud(cloud, base + ext, cf);
    save_labels(cloud, base + ".labels.txt");
    save_floorplan(gt, base + ".gt.json");
    save_drawing(drawing_from_spec(spec), base + ".drawing.json");
    std::cout << name << ": " << cloud.size() << " points, " << gt.walls.size()
              << " walls, " << gt.rooms.size() << " rooms\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& gt_path,
                 const std::string& out, const std::string& config_path) {
  PipelineConfig config = config_from_option(config_path);
  EvalReport report = evaluate_pair(load_floorplan(pred_path), load_floorplan(gt_path),
                                    config.eval);
  if (!out.empty()) write_text(out, eval_report_to_json(report));
  std::cout << eval_report_row(report) << "\n";
  return 0;
}

int cmd_gridsearch(const std::string& corpus_dir, const std::string& grid_path,
                   const std::string& config_path, const std::string& out,
                   const std::string& best_out, bool no_labels) {
  PipelineConfig base = config_from_option(config_path);
  std::ifstream gin(grid_path);
  if (!gin) throw Error(ErrorKind::FileNotFound, "cannot open " + grid_path);
  std::stringstream grid;
  grid << gin.rdbuf();

  GridSearchOptions options;
  options.use_labels = !no_labels;
  GridSearchResult result = grid_search(discover_corpus(corpus_dir), grid.str(), base, options);
  write_text(out, result.table_csv());
  if (!best_out.empty()) write_text(best_out, config_to_json(result.best_config));
  std::cout << "grid points " << result.table.size() << "; best index " << result.best_index
            << " score " << result.table[result.best_index].score << "\n";
  return 0;
}

int cmd_render(const std::string& input, const std::string& out) {
  write_text(out, floorplan_to_svg(load_floorplan(input)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floorgen: vector floorplans from labeled building point clouds"};
  app.require_subcommand(0, 1);

  bool print_default_config = false;
  app.add_flag("--print-default-config", print_default_config,
               "print the default pipeline config JSON and exit");

  std::string input, labels, drawing, config_path, out, svg_out;
  std::uint64_t seed = 0;
  bool verbose = false;

  CLI::App* run = app.add_subcommand("run", "run the full pipeline on a point cloud");
  run->add_option("--input", input, "input cloud (.ply/.xyz)")->required();
  run->add_option("--labels", labels, "per-point label file (one class index per line)");
  run->add_option("--drawing", drawing, "2D drawing JSON for pseudo-annotation");
  run->add_option("--config", config_path, "pipeline config JSON");
  run->add_option("--out", out, "output floorplan JSON")->required();
  run->add_option("--svg", svg_out, "also render an SVG");
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override the config RANSAC seed");
  run->add_flag("--report", verbose, "print the per-stage report to stderr");

  std::string fixture = "all", out_dir = ".", format = "ply";
  std::uint64_t synth_seed = 7;
  CLI::App* synth = app.add_subcommand("synth", "write synthetic fixture clouds + ground truth");
  synth->add_option("--fixture", fixture, "fixture name or 'all'");
  synth->add_option("--out-dir", out_dir, "output directory")->required();
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--format", format, "cloud format: ply or xyz")
      ->check(CLI::IsMember({"ply", "xyz"}));

  std::string pred_path, gt_path;
  CLI::App* evaluate = app.add_subcommand("evaluate", "compare two floorplan JSON files");
  evaluate->add_option("--pred", pred_path, "predicted floorplan JSON")->required();
  evaluate->add_option("--gt", gt_path, "ground-truth floorplan JSON")->required();
  evaluate->add_option("--out", out, "write the metric report JSON here");
  evaluate->add_option("--config", config_path, "pipeline config JSON (evaluate section)");

  CLI::App* annotate = app.add_subcommand("annotate", "pseudo-annotate a cloud from a drawing");
  annotate->add_option("--input", input, "input cloud")->required();
  annotate->add_option("--drawing", drawing, "2D drawing JSON")->required();
  annotate->add_option("--config", config_path, "pipeline config JSON");
  annotate->add_option("--out", out, "output label file")->required();

  std::string corpus_dir, grid_path, best_out;
  bool no_labels = false;
  CLI::App* gridsearch = app.add_subcommand("gridsearch", "tune parameters over a corpus");
  gridsearch->add_option("--corpus", corpus_dir, "fixture directory (from synth)")->required();
  gridsearch->add_option("--grid", grid_path, "grid JSON: config path -> value list")->required();
  gridsearch->add_option("--config", config_path, "base pipeline config");
  gridsearch->add_option("--out", out, "output CSV table")->required();
  gridsearch->add_option("--best-config", best_out, "write the winning config JSON here");
  gridsearch->add_flag("--no-labels", no_labels, "ignore label files (geometric-only mode)");

  CLI::App* render = app.add_subcommand("render", "floorplan JSON to SVG");
  render->add_option("--input", input, "floorplan JSON")->required();
  render->add_option("--out", out, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (print_default_config) {
      std::cout << config_to_json(PipelineConfig{});
      return 0;
    }
    if (run->parsed())
      return cmd_run(input, labels, drawing, config_path, out, svg_out, seed,
                     !seed_opt->empty(), verbose);
    if (synth->parsed()) return cmd_synth(fixture, out_dir, synth_seed, format);
    if (evaluate->parsed()) return cmd_evaluate(pred_path, gt_path, out, config_path);
    if (annotate->parsed()) return cmd_annotate(input, drawing, config_path, out);
    if (gridsearch->parsed())
      return cmd_gridsearch(corpus_dir, grid_path, config_path, out, best_out, no_labels);
    if (render->parsed()) return cmd_render(input, out);
    std::cerr << app.help();
    return 2;
  } catch (const floorgen::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_input_error() ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
