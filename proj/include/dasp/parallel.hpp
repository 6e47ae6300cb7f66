#pragma once

namespace dasp {

/// Execution policy for the assembly and sampling kernels. Both paths run
/// identical per-element arithmetic, so results agree bit-for-bit.
enum class Exec { serial, parallel };

/// Sets the OpenMP team size used by Exec::parallel; n < 1 is ignored.
void set_num_threads(int n);
int num_threads();

}  // namespace dasp
