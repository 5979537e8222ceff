#include <doctest.h>
#include "trunckit/common.hpp"

TEST_CASE("placeholder") { CHECK(true); }
