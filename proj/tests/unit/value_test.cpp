// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "warden/value.hpp"

using namespace warden;

TEST_CASE("value equality promotes int and real") {
  CHECK(value_equal(Value{std::int64_t{2}}, Value{2.0}));
  CHECK(value_equal(Value{2.0}, Value{std::int64_t{2}}));
  CHECK_FALSE(value_equal(Value{std::int64_t{2}}, Value{2.5}));
  CHECK(value_equal(Value{std::string{"on"}}, Value{std::string{"on"}}));
  CHECK_FALSE(value_equal(Value{std::string{"on"}}, Value{std::string{"off"}}));
  CHECK(value_equal(Value{true}, Value{true}));
  CHECK_FALSE(value_equal(Value{true}, Value{false}));
}

TEST_CASE("cross-type values are unequal, not errors") {
  CHECK_FALSE(value_equal(Value{std::string{"1"}}, Value{std::int64_t{1}}));
  CHECK_FALSE(value_equal(Value{true}, Value{std::int64_t{1}}));
  CHECK_FALSE(value_equal(Value{false}, Value{std::string{"false"}}));
}

TEST_CASE("literal rendering is canonical") {
  CHECK(to_literal(Value{std::int64_t{42}}) == "42");
  CHECK(to_literal(Value{std::int64_t{-7}}) == "-7");
  CHECK(to_literal(Value{true}) == "true");
  CHECK(to_literal(Value{false}) == "false");
  CHECK(to_literal(Value{std::string{"Home"}}) == "\"Home\"");
  CHECK(to_literal(Value{std::string{"a\"b\\c"}}) == "\"a\\\"b\\\\c\"");

  SECTION("reals always carry a decimal point or exponent") {
    CHECK(to_literal(Value{1.5}) == "1.5");
    CHECK(to_literal(Value{2.0}) == "2.0");
    CHECK(to_literal(Value{-0.5}) == "-0.5");
  }
}

TEST_CASE("payload rendering leaves strings bare") {
  CHECK(to_payload(Value{std::string{"Home"}}) == "Home");
  CHECK(to_payload(Value{std::int64_t{3}}) == "3");
  CHECK(to_payload(Value{true}) == "true");
}

TEST_CASE("numeric coercion") {
  CHECK(as_double(Value{std::int64_t{3}}) == 3.0);
  CHECK(as_double(Value{0.25}) == 0.25);
  CHECK_THROWS(as_double(Value{std::string{"3"}}));
  CHECK(is_numeric(Value{std::int64_t{1}}));
  CHECK(is_numeric(Value{1.0}));
  CHECK_FALSE(is_numeric(Value{true}));
  CHECK_FALSE(is_numeric(Value{std::string{"x"}}));
}
