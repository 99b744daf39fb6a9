#pragma once

#include <iosfwd>

namespace mfact::cli {

// Process exit codes. Stable: scripts depend on them.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsageOrIo = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitVerifyFailed = 4;

/// Entry point shared by the `mfact` executable and the tests.
///
///   mfact factor     --kind qr|cholesky|ldu --input A --output OUT [--format csv|json]
///   mfact derivative --kind K --input A --perturbation E --output OUT [--format csv|json]
///   mfact track      --kind K [--family linear|custom-samples] --input A0 --input A1 ...
///                    --output traj.csv [--steps 64]
///   mfact verify     [--seed 0] --report report.json
///
/// With --format csv, OUT is a directory receiving one CSV per factor
/// (q.csv, r.csv / l.csv / l.csv, d.csv, u.csv); with json, OUT is a file.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfact::cli
