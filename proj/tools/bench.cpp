// Serial-vs-OpenMP timings for the data-parallel kernels, on a synthetic
// building. Also cross-checks that both policies produce identical output.
#include <chrono>
#include <cstdio>
#include <string>

#include "floorgen/annotate.hpp"
#include "floorgen/evaluate.hpp"
#include "floorgen/normals.hpp"
#include "floorgen/pipeline.hpp"
#include "floorgen/preprocess.hpp"
#include "floorgen/spatial_index.hpp"
#include "floorgen/synth.hpp"

using namespace floorgen;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <typename Fn>
double timed(Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return ms_since(t0);
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-22s serial %9.1f ms   omp %9.1f ms   speedup %4.2fx   identical %s\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms, identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  double density = argc > 1 ? std::stod(argv[1]) : 4000.0;

  BuildingSpec spec = corpus_fixture("tworoom", 7);
  spec.density = density;
  spec.noise_sigma = 0.004;
  auto [cloud, gt] = generate_building(spec);
  std::printf("cloud: %zu points (density %.0f/m^2)\n", cloud.size(), density);

  SpatialIndex index(cloud);

  NormalField n_serial, n_parallel;
  double t_ser = timed([&] { n_serial = estimate_normals(cloud, index, 16, Exec::Serial); });
  double t_par = timed([&] { n_parallel = estimate_normals(cloud, index, 16, Exec::Parallel); });
  bool same = n_serial.normals == n_parallel.normals;
  report("estimate_normals", t_ser, t_par, same);

  LabeledPointCloud o_serial, o_parallel;
  t_ser = timed([&] {
    o_serial = remove_statistical_outliers(cloud, index, 8, 2.0, Exec::Serial);
  });
  t_par = timed([&] {
    o_parallel = remove_statistical_outliers(cloud, index, 8, 2.0, Exec::Parallel);
  });
  report("outlier_removal", t_ser, t_par, o_serial.positions == o_parallel.positions);

  FloorCeilingLevels levels{0.0, spec.story_height, 0.1};
  DrawingSet drawing = drawing_from_spec(spec);
  LabeledPointCloud a_serial, a_parallel;
  t_ser = timed([&] {
    a_serial = annotate_from_drawing(cloud, drawing, levels, {}, Exec::Serial);
  });
  t_par = timed([&] {
    a_parallel = annotate_from_drawing(cloud, drawing, levels, {}, Exec::Parallel);
  });
  report("pseudo_annotation", t_ser, t_par, *a_serial.labels == *a_parallel.labels);

  RasterFrame frame = shared_frame(gt, gt, 0.01, 0.1);
  BitRaster lines = rasterize_lines(gt, frame);
  std::vector<double> e_serial, e_parallel;
  t_ser = timed([&] { e_serial = squared_edt(lines, Exec::Serial); });
  t_par = timed([&] { e_parallel = squared_edt(lines, Exec::Parallel); });
  report("squared_edt", t_ser, t_par, e_serial == e_parallel);

  return 0;
}
