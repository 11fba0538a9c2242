#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>
#include <vector>

#include "scout/rng.hpp"
#include "scout/util.hpp"
#include "scout/vec.hpp"

using namespace scout;

TEST_SUITE("rng") {
    TEST_CASE("identical seeds give identical sequences") {
        Rng a(42), b(42);
        for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    }

    TEST_CASE("copies fork the stream mid-way") {
        Rng a(7);
        a.next_u64();
        Rng b = a;
        for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    }

    TEST_CASE("derived streams do not collide with the parent") {
        Rng root(3);
        Rng d1 = root.derive(1);
        Rng d2 = root.derive(2);
        std::set<std::uint64_t> seen;
        Rng r1 = root, r2 = d1, r3 = d2;
        for (int i = 0; i < 1000; ++i) {
            seen.insert(r1.next_u64());
            seen.insert(r2.next_u64());
            seen.insert(r3.next_u64());
        }
        CHECK(seen.size() == 3000);
        // two-level derivation is order-sensitive
        CHECK(root.derive(1, 2).next_u64() != root.derive(2, 1).next_u64());
    }

    TEST_CASE("uniform stays in [0,1) and looks flat") {
        Rng r(11);
        double sum = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            double u = r.uniform();
            REQUIRE(u >= 0.0);
            REQUIRE(u < 1.0);
            sum += u;
        }
        CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    }

    TEST_CASE("uniform_pos stays in (0,1]") {
        Rng r(12);
        for (int i = 0; i < 100000; ++i) {
            double u = r.uniform_pos();
            REQUIRE(u > 0.0);
            REQUIRE(u <= 1.0);
        }
    }

    TEST_CASE("ranged uniform respects bounds") {
        Rng r(13);
        for (int i = 0; i < 10000; ++i) {
            double u = r.uniform(-2.5, 4.0);
            REQUIRE(u >= -2.5);
            REQUIRE(u < 4.0);
        }
    }

    TEST_CASE("below(n) is bounded and roughly uniform") {
        Rng r(14);
        const int n = 8, draws = 160000;
        std::vector<int> counts(n, 0);
        for (int i = 0; i < draws; ++i) {
            auto v = r.below(n);
            REQUIRE(v < static_cast<std::uint64_t>(n));
            ++counts[static_cast<int>(v)];
        }
        // each bucket expects 20000 +- 5 sigma (sigma ~ 132)
        for (int c : counts) CHECK(std::abs(c - draws / n) < 700);
    }

    TEST_CASE("normal has the right first two moments") {
        Rng r(15);
        const int n = 200000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = r.normal();
            sum += x;
            sq += x * x;
        }
        double mean = sum / n;
        double var = sq / n - mean * mean;
        CHECK(std::abs(mean) < 0.01);
        CHECK(var == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_SUITE("util") {
    TEST_CASE("ceil_fraction matches the pruning and retention counts") {
        CHECK(ceil_fraction(146347, 0.10) == 14635);
        CHECK(ceil_fraction(25600, 0.5) == 12800);
        CHECK(ceil_fraction(5, 0.5) == 3);
        CHECK(ceil_fraction(4, 0.5) == 2);
        CHECK(ceil_fraction(10, 1.0) == 10);
        CHECK(ceil_fraction(10, 0.01) == 1);
        CHECK(ceil_fraction(3, 1.0 / 3.0) == 1);
    }

    TEST_CASE("format_double round-trips") {
        for (double v : {0.1, 1.0 / 3.0, 1500.0, 1e-8, -2.75, 942399.5820449252, 0.0}) {
            std::string s = format_double(v);
            CHECK(std::strtod(s.c_str(), nullptr) == v);
        }
        CHECK(format_double(1500.0) == "1500");
    }

    TEST_CASE("trim and split") {
        CHECK(trim("  a b\t") == "a b");
        CHECK(trim("") == "");
        auto parts = split("a, b ,c", ',');
        REQUIRE(parts.size() == 3);
        CHECK(trim(parts[1]) == "b");
        CHECK(split("abc", ',').size() == 1);
    }

    TEST_CASE("parsers reject junk") {
        CHECK(parse_int("42", "x") == 42);
        CHECK(parse_double(" 2.5 ", "x") == 2.5);
        CHECK_THROWS_AS(parse_int("4x2", "x"), ConfigError);
        CHECK_THROWS_AS(parse_double("", "x"), ConfigError);
        CHECK_THROWS_AS(parse_double("1.0extra", "x"), ConfigError);
    }

    TEST_CASE("parallel_for covers every index exactly once") {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
        for (int h : hits) CHECK(h == 1);
    }

    TEST_CASE("vector helpers agree with hand math") {
        std::vector<double> a = {3.0, 4.0}, b = {3.0, 4.0}, c = {-3.0, -4.0};
        CHECK(norm2(a) == doctest::Approx(5.0));
        CHECK(cosine(a, b) == doctest::Approx(1.0));
        CHECK(cosine(a, c) == doctest::Approx(-1.0));
        CHECK(euclidean(a, c) == doctest::Approx(10.0));
        std::vector<double> z = {0.0, 0.0};
        CHECK_THROWS(cosine(a, z));
        normalize_in_place(a);
        CHECK(norm2(a) == doctest::Approx(1.0));
    }
}
