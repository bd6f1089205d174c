#pragma once

// The library's enums have toString() overloads returning string_view, which
// doctest would otherwise pick up through ADL.
#define DOCTEST_STRINGIFY(...) ::doctest::toString(__VA_ARGS__)
#include "doctest.h"
