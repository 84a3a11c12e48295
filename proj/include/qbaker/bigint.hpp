#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace qbaker {

using BigInt = boost::multiprecision::cpp_int;

}  // namespace qbaker
