#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qplane {

/// Runs one batch subcommand and writes exactly one run record (JSON, or CSV
/// for the census tables) to `out`.  Returns 0 on success, 1 when an audit
/// recorded violations, 2 on usage or input errors.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qplane
