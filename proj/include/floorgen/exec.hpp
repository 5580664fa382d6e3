#pragma once

namespace floorgen {

// Execution policy for the data-parallel kernels. Parallel runs the same
// per-element code under OpenMP; Serial is the reference path the tests and
// the benchmark compare against. Outputs are required to be bit-identical
// under either policy and any thread count.
enum class Exec { Serial, Parallel };

}  // namespace floorgen
