#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace algact::cli {

enum ExitCode : int { kPass = 0, kUsage = 1, kCheckFailed = 2, kInconclusive = 3 };

// args excludes the program name. Reports written to "-" go to `out`;
// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1,2,4,...,256" style lists. Before "..." two terms define the step: a
// geometric ratio when one is an integer multiple (>= 2) of the other (so
// "0.2,0.1,...,0.0125" halves), an arithmetic difference otherwise; three
// terms are checked for a common ratio first. The last term is always
// included. "inf" is accepted.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace algact::cli
