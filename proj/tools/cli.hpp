#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace camikit::cli {

/// Runs one command line. Exit status: 0 success, 1 domain error, 2 usage
/// error (synopsis printed to `err`).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace camikit::cli
