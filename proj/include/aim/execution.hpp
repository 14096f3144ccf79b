#pragma once

namespace aim {

// Selects the kernel family. `serial` is the reference implementation kept for
// testing; `parallel` is the OpenMP variant and must produce identical results.
enum class Execution { serial, parallel };

}  // namespace aim
