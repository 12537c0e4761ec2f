#include <doctest.h>

#include <cmath>

#include "polar/features.hpp"
#include "polar/errors.hpp"

using namespace polar;

namespace {

double norm(const SparseVec& v) { return std::sqrt(v.squared_norm()); }

}  // namespace

TEST_CASE("feature space validation") {
  FeatureSpace fs;
  CHECK_NOTHROW(fs.validate());
  fs.dim = 1000;  // not a power of two
  CHECK_THROWS_AS(fs.validate(), Error);
  fs.dim = 1u << 10;
  fs.ngram_min = 3;
  fs.ngram_max = 2;
  CHECK_THROWS_AS(fs.validate(), Error);
}

TEST_CASE("featurize determinism") {
  FeatureSpace fs;
  fs.dim = 1u << 12;
  const SparseVec a = featurize("multilingual posts with emojis \xf0\x9f\x98\x80", fs);
  const SparseVec b = featurize("multilingual posts with emojis \xf0\x9f\x98\x80", fs);
  CHECK(a.items == b.items);
  CHECK(!a.items.empty());
}

TEST_CASE("repeated single character collapses to one unit dimension") {
  FeatureSpace fs;
  fs.ngram_min = 1;
  fs.ngram_max = 1;
  fs.dim = 1u << 12;
  const SparseVec v = featurize("aaaa", fs);
  REQUIRE(v.items.size() == 1);
  CHECK(v.items[0].second == doctest::Approx(1.0));
}

TEST_CASE("'ab' with range 1..2 activates the n-grams a, b, ab") {
  FeatureSpace fs;
  fs.ngram_min = 1;
  fs.ngram_max = 2;
  fs.dim = 1u << 16;  // collisions vanishingly unlikely for three n-grams
  const SparseVec v = featurize("ab", fs);
  CHECK(v.items.size() == 3);
  CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncation to max_code_points happens before n-gram extraction") {
  FeatureSpace fs;
  fs.ngram_min = 1;
  fs.ngram_max = 1;
  fs.dim = 1u << 12;
  fs.max_code_points = 4;
  const SparseVec clipped = featurize("abcdefghij", fs);
  const SparseVec direct = featurize("abcd", fs);
  CHECK(clipped.items == direct.items);
}

TEST_CASE("multi-byte code points are single n-gram units") {
  FeatureSpace fs;
  fs.ngram_min = 1;
  fs.ngram_max = 1;
  fs.dim = 1u << 14;
  // two distinct CJK characters -> two unit grams
  const SparseVec v = featurize("\xe4\xb8\xad\xe6\x96\x87", fs);
  CHECK(v.items.size() == 2);
}

TEST_CASE("signed hashing yields unit norm too") {
  FeatureSpace fs;
  fs.signed_hash = true;
  fs.dim = 1u << 12;
  const SparseVec v = featurize("signed hashing example", fs);
  CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("L2 norm is 1 for any non-empty text") {
  FeatureSpace fs;
  fs.dim = 1u << 12;
  for (const char* text : {"a", "hello world", "xx yy zz", "\xf0\x9f\x94\xa5"}) {
    CHECK(norm(featurize(text, fs)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}
