#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "legweb/report.hpp"

using namespace legweb::report;

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("duplicate check ids are rejected") {
    Report rep;
    rep.pass("a.b", "plumbing");
    CHECK_THROWS(rep.pass("a.b", "plumbing"));
}

TEST_CASE("waivers downgrade failures to published residuals") {
    Report rep;
    rep.check("x.fails", "plumbing", false);
    CHECK(rep.exit_code() == 1);
    rep.apply_waivers({"x.fails"});
    CHECK(rep.exit_code() == 0);
    CHECK(!rep.all_pass() == false);
    auto body = rep.body();
    CHECK(body["checks"][0]["verdict"] == "residual-published");
    CHECK(body["checks"][0]["detail"]["waived"] == true);
}

TEST_CASE("body bytes are stable and timing lives outside the body") {
    Report rep;
    rep.suite = "t";
    rep.seed = 5;
    auto& r = rep.pass("x.y", "plumbing");
    r.ms = 123.0;
    std::string b1 = rep.body_bytes();
    r.ms = 456.0;
    CHECK(rep.body_bytes() == b1);
    auto full = rep.full();
    CHECK(full["timing_ms"]["x.y"] == 456.0);
    CHECK(full["body_sha256"] == sha256_hex(b1));
}
