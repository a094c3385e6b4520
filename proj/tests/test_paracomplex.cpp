#include "tlsurf/io.hpp"
#include "tlsurf/paracomplex.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace tlsurf;

TEST_CASE("paracomplex multiplication follows j^2 = +1")
{
    CHECK(Paracomplexd(1, 1) * Paracomplexd(1, -1) == Paracomplexd(0, 0));
    CHECK(Paracomplexd(2, 1) * Paracomplexd(3, 1) == Paracomplexd(7, 5));
    CHECK(Paracomplexd::unit() * Paracomplexd::unit() == Paracomplexd(1, 0));
}

TEST_CASE("square norm")
{
    CHECK(sq_norm(Paracomplexd(3, 2)) == 5.0);
    CHECK(sq_norm(Paracomplexd(1, 1)) == 0.0);
    CHECK(sq_norm(Paracomplexd(0, 0)) == 0.0);
    CHECK(sq_norm(Paracomplexd(1, 3)) == -8.0);
}

TEST_CASE("conj(z) z is the square norm")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> d(-1000, 1000);
    for (int k = 0; k < 1000; ++k) {
        const Paracomplexd z(d(rng), d(rng));
        CHECK(conj(z) * z == Paracomplexd(sq_norm(z), 0.0));
    }
}

TEST_CASE("classification")
{
    CHECK(classify(Paracomplexd(1, 1)) == CausalClass::null_nonzero);
    CHECK(classify(Paracomplexd(2, 1)) == CausalClass::positive);
    CHECK(classify(Paracomplexd(1, 2)) == CausalClass::negative);
    CHECK(classify(Paracomplexd(0, 0)) == CausalClass::zero);
    CHECK(classify(Paracomplexd(1e-11, -1e-11)) == CausalClass::zero);
    CHECK(classify(Paracomplexd(1.0, 1.0 + 1e-10)) == CausalClass::null_nonzero);
    CHECK(classify(Paracomplexd(1.0, 1.0 + 1e-6)) == CausalClass::negative);

    CausalTolerance loose{1e-3, 1e-2};
    CHECK(classify(Paracomplexd(1.0, 1.001), loose) == CausalClass::null_nonzero);
    CHECK(to_string(CausalClass::null_nonzero) == "null_nonzero");
}

TEST_CASE("ring axioms hold exactly on integer-valued triples")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> d(-1000, 1000);
    for (int k = 0; k < 10000; ++k) {
        const Paracomplexd a(d(rng), d(rng)), b(d(rng), d(rng)), c(d(rng), d(rng));
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);
        REQUIRE(a * b == b * a);
        REQUIRE(a + b == b + a);
        REQUIRE((a + b) + c == a + (b + c));
    }
}

TEST_CASE("square norm is multiplicative to 4 ulp")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    const double ulp = std::numeric_limits<double>::epsilon();
    for (int k = 0; k < 10000; ++k) {
        const Paracomplexd z(d(rng), d(rng)), w(d(rng), d(rng));
        const double scale = euclidean_sq(z) * euclidean_sq(w);
        REQUIRE(std::abs(sq_norm(z * w) - sq_norm(z) * sq_norm(w)) <= 4 * ulp * scale);
    }
}

TEST_CASE("classification is invariant under positive scaling")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> d(-10, 10);
    std::uniform_real_distribution<double> c(1e-3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const Paracomplexd z(d(rng), d(rng));
        const double a = c(rng);
        REQUIRE(classify(a * z) == classify(z));
    }
    const Paracomplexd null(2.5, -2.5);
    for (double a : {1e-3, 1.0, 1e6}) CHECK(classify(a * null) == CausalClass::null_nonzero);
}

TEST_CASE("json form")
{
    const json j = Paracomplexd(1.5, -2);
    CHECK(j.dump() == R"({"im":-2.0,"re":1.5})");
    CHECK(j.get<Paracomplexd>() == Paracomplexd(1.5, -2));
}
