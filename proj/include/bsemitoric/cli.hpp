#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bsemitoric {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "BSEMITORIC_OUT_DIR";

/// Runs one subcommand (verify, classify, tsweep, image, loci, flow). JSON
/// reports go to `out`, diagnostics to `err`. Returns 0 on success, 1 when a
/// validation fails, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsemitoric
