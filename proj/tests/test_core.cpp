#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "core/error.hpp"
#include "core/rng.hpp"

using namespace penh;

TEST_SUITE("core") {

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  bool same = true, differ = false;
  for (int i = 0; i < 100; ++i) {
    uint64_t va = a.next_u64();
    same = same && (va == b.next_u64());
    differ = differ || (va != c.next_u64());
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("uniform stays in range and fills it") {
  Rng rng(7);
  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 20000; ++i) {
    double v = rng.uniform(2.0, 5.0);
    CHECK(v >= 2.0);
    CHECK(v < 5.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo < 2.01);
  CHECK(hi > 4.99);
}

TEST_CASE("normal has the requested moments") {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal(3.0, 2.0);
    sum += v;
    sq += v * v;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(var == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("state round-trips through text") {
  Rng rng(123);
  for (int i = 0; i < 17; ++i) rng.normal(0.0, 1.0);  // odd count leaves a cached spare
  std::string s = rng.state();
  Rng other(0);
  other.set_state(s);
  for (int i = 0; i < 50; ++i) {
    CHECK(rng.normal(0.0, 1.0) == other.normal(0.0, 1.0));
    CHECK(rng.next_u64() == other.next_u64());
  }
  CHECK_THROWS_AS(other.set_state("not a state"), Error);
}

TEST_CASE("fnv1a64 reference values") {
  // Published FNV-1a 64-bit digests.
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("mix_seed separates streams") {
  std::set<uint64_t> seen;
  for (uint64_t a = 0; a < 20; ++a)
    for (uint64_t b = 0; b < 20; ++b) seen.insert(mix_seed(a, b));
  CHECK(seen.size() == 400);
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
}

TEST_CASE("error carries code and name") {
  Error e(ErrorCode::EmptyCorpus, "nothing to do");
  CHECK(e.code() == ErrorCode::EmptyCorpus);
  CHECK(std::string(e.what()) == "nothing to do");
  CHECK(std::string(error_code_name(ErrorCode::NotFound)) == "NotFound");
  CHECK(std::string(error_code_name(ErrorCode::CheckpointVersionError)) == "CheckpointVersionError");
}

}  // TEST_SUITE
