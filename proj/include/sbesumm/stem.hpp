#pragma once

#include <string>
#include <string_view>

namespace sbesumm::eval {

// Classic Porter suffix stripper (the 1980 five-step rule set) over
// lowercase ASCII.  Words shorter than three letters or containing
// non-alphabetic characters pass through unchanged.
std::string porter_stem(std::string_view word);

}  // namespace sbesumm::eval
