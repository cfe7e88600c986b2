#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cyclotower::cli {

// Exit codes.
inline constexpr int kApplies = 0;
inline constexpr int kError = 1;
inline constexpr int kFails = 3;
inline constexpr int kInconclusive = 4;

// args excludes the program name.
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}
