#include <doctest.h>

#include "depstat/json_writer.hpp"
#include "depstat/numerics.hpp"

using namespace depstat;

TEST_CASE("json writer: fixed key order, nesting, escaping") {
    JsonWriter w;
    w.begin_object();
    w.kv("b_first", 1);
    w.kv("a_second", "text with \"quotes\" and \\slash");
    w.key("arr").begin_array().value(1).value(2.5).value(true).end_array();
    w.key("nested").begin_object().kv("x", std::uint64_t{18446744073709551615ULL}).end_object();
    w.end_object();
    CHECK(w.str() ==
          R"({"b_first":1,"a_second":"text with \"quotes\" and \\slash","arr":[1,2.5,true],)"
          R"("nested":{"x":18446744073709551615}})");
}

TEST_CASE("json writer: doubles use 17 significant digits") {
    CHECK(JsonWriter::format_double(1.0) == "1");
    CHECK(JsonWriter::format_double(0.05) == "0.050000000000000003");
    CHECK(JsonWriter::format_double(40.0 / 81.0) == "0.49382716049382713");
    CHECK(JsonWriter::format_double(-2.5e-10) == "-2.5000000000000002e-10");

    JsonWriter w;
    w.begin_array();
    w.value(0.1);
    w.end_array();
    CHECK(w.str() == "[0.10000000000000001]");
}

TEST_CASE("neumaier sum handles cancellation the naive sum cannot") {
    NeumaierSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.value() == 2.0);

    double xs[] = {0.1, 0.2, 0.3, -0.6};
    CHECK(compensated_sum(xs) == doctest::Approx(0.0).epsilon(1e-16));
}
