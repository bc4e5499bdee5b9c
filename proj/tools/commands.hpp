#pragma once

namespace qlc::cli {

/// Parses argv and runs one subcommand. Returns 0 on success, 1 on a domain
/// error and 2 on a usage or configuration error.
int dispatch(int argc, char** argv);

}  // namespace qlc::cli
