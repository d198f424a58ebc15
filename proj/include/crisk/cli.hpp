#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crisk {

/// Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int exit_code_for(const std::exception& e) noexcept;

}  // namespace crisk
