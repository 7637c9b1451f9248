#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ltvprop::cli {

/// Entry point behind the ltvprop binary, callable in-process for tests.
/// args excludes the program name. Exit status: 0 success, 1 usage or
/// problem-file error, 2 solver error (truncation/domain), 3 verification
/// failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ltvprop::cli
