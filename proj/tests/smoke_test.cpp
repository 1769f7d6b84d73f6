#include <gtest/gtest.h>

#include "lingeval/lingeval.hpp"

TEST(Smoke, Compiles) { EXPECT_EQ(lingeval::chrf2("abc", "abc"), 100.0); }
