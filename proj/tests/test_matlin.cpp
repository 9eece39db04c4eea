#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "svev/errors.hpp"
#include "svev/matlin.hpp"
#include "svev/rng.hpp"

using namespace svev;

namespace {

struct Moments {
    double mean = 0, se = 0;
};

template <class F>
Moments sample_mean(long count, F draw) {
    double s = 0, s2 = 0;
    for (long i = 0; i < count; ++i) {
        const double x = draw();
        s += x;
        s2 += x * x;
    }
    const double m = s / count;
    return {m, std::sqrt((s2 / count - m * m) / count)};
}

ComplexMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
    ComplexMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("rng is a pure function of seed and stream") {
    Rng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs_c |= x != c.next_u64();
        differs_d |= x != d.next_u64();
    }
    CHECK(differs_c);
    CHECK(differs_d);
    Rng u(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const double x = u.uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
    }
}

TEST_CASE("Ginibre entries have zero mean and unit variance") {
    Rng rng(11, 0);
    const long N = 100000;
    std::vector<ComplexMatrix> draws;
    draws.reserve(N);
    for (long i = 0; i < N; ++i) draws.push_back(sample_ginibre(2, rng));
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            long k = 0;
            auto re = sample_mean(N, [&] { return draws[k++](r, c).real(); });
            k = 0;
            auto im = sample_mean(N, [&] { return draws[k++](r, c).imag(); });
            k = 0;
            auto sq = sample_mean(N, [&] { return std::norm(draws[k++](r, c)); });
            CHECK(std::abs(re.mean) < 4 * re.se);
            CHECK(std::abs(im.mean) < 4 * im.se);
            CHECK(std::abs(sq.mean - 1.0) < 4 * sq.se);
        }
}

TEST_CASE("n = 1 Ginibre draw is reproducible") {
    Rng a(5, 9), b(5, 9);
    CHECK(sample_ginibre(1, a)(0, 0) == sample_ginibre(1, b)(0, 0));
}

TEST_CASE("Haar unitaries") {
    Rng rng(3, 1);
    for (int i = 0; i < 20; ++i) {
        const ComplexMatrix u = sample_haar_unitary(3, rng);
        const double defect = (u.adjoint() * u - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff();
        CHECK(defect < 1e-12);
    }
    const long N = 100000;
    auto m11 = sample_mean(N, [&] { return std::norm(sample_haar_unitary(3, rng)(0, 0)); });
    CHECK(std::abs(m11.mean - 1.0 / 3.0) < 4 * m11.se);

    // phase of det U uniform: E cos and E sin vanish
    std::vector<double> phases(N);
    for (auto& p : phases) p = std::arg(sample_haar_unitary(2, rng).determinant());
    long k = 0;
    auto c = sample_mean(N, [&] { return std::cos(phases[k++]); });
    k = 0;
    auto s = sample_mean(N, [&] { return std::sin(phases[k++]); });
    CHECK(std::abs(c.mean) < 4 * c.se);
    CHECK(std::abs(s.mean) < 4 * s.se);
}

TEST_CASE("eigenvalue examples") {
    auto ev = eigenvalues(mat2(1, 1, 0, 2)).values;
    REQUIRE(ev.size() == 2);
    CHECK(std::abs(ev[0] - cplx(2)) < 1e-12);
    CHECK(std::abs(ev[1] - cplx(1)) < 1e-12);

    ev = eigenvalues(mat2(0, 1, -1, 0)).values;
    CHECK(std::abs(ev[0] - cplx(0, 1)) < 1e-12);
    CHECK(std::abs(ev[1] - cplx(0, -1)) < 1e-12);

    ev = eigenvalues(mat2(3, 0, 0, cplx(0, 4))).values;
    CHECK(std::abs(ev[0] - cplx(0, 4)) < 1e-12);
    CHECK(std::abs(ev[1] - cplx(3)) < 1e-12);
}

TEST_CASE("squared singular value examples") {
    auto sv = squared_singular_values(mat2(3, 0, 0, cplx(0, 4))).real_values();
    CHECK(sv[0] == doctest::Approx(16));
    CHECK(sv[1] == doctest::Approx(9));

    sv = squared_singular_values(mat2(1, 1, 0, 1)).real_values();
    CHECK(sv[0] == doctest::Approx((3 + std::sqrt(5.0)) / 2).epsilon(1e-14));
    CHECK(sv[1] == doctest::Approx((3 - std::sqrt(5.0)) / 2).epsilon(1e-13));

    Rng rng(8, 0);
    for (int n : {1, 3, 6}) {
        for (double a : squared_singular_values(sample_haar_unitary(n, rng)).real_values())
            CHECK(std::abs(a - 1.0) < 1e-10);
    }
}

TEST_CASE("Vandermonde examples") {
    const std::vector<double> one{5}, three{1, 2, 3};
    CHECK(vandermonde(std::span<const double>(one)) == 1.0);
    CHECK(vandermonde(std::span<const double>(three)) == doctest::Approx(2.0));
    const std::vector<cplx> z{0.0, cplx(0, 1)};
    CHECK(std::abs(vandermonde(std::span<const cplx>(z)) - cplx(0, 1)) < 1e-15);
}

TEST_CASE("permanent examples and symmetries") {
    CHECK(std::abs(permanent(mat2(1, 2, 3, 4)) - cplx(10)) < 1e-13);
    CHECK(std::abs(permanent(ComplexMatrix::Identity(3, 3)) - cplx(1)) < 1e-13);
    CHECK(std::abs(permanent(mat2(1, 1, 1, 1)) - cplx(2)) < 1e-13);

    Rng rng(21, 0);
    ComplexMatrix m = sample_ginibre(4, rng);
    // brute-force oracle over all 24 permutations
    std::vector<int> perm{0, 1, 2, 3};
    cplx brute = 0;
    do {
        cplx p = 1;
        for (int i = 0; i < 4; ++i) p *= m(i, perm[i]);
        brute += p;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(std::abs(permanent(m) - brute) < 1e-12 * std::abs(brute) + 1e-12);

    ComplexMatrix swapped = m;
    swapped.row(0).swap(swapped.row(2));
    swapped.col(1).swap(swapped.col(3));
    CHECK(std::abs(permanent(swapped) - permanent(m)) < 1e-12 * std::abs(brute) + 1e-12);

    m.row(1).setZero();
    CHECK(std::abs(permanent(m)) == 0.0);
}

TEST_CASE("Weyl, Horn and determinant identities on random matrices") {
    Rng rng(4, 2);
    for (int n : {1, 2, 3, 5, 8}) {
        for (int i = 0; i < 200; ++i) {
            const ComplexMatrix g = sample_ginibre(n, rng);
            const Spectrum ev = eigenvalues(g), sv = squared_singular_values(g);
            const IdentityReport rep = check_spectral_identities(g, ev, sv);
            REQUIRE(rep.ok(1e-10));
            CHECK(det_abs2(g) == doctest::Approx(std::abs(g.determinant()) * std::abs(g.determinant())));
        }
    }
}

TEST_CASE("identity check catches a mismatched spectrum") {
    Rng rng(4, 3);
    const ComplexMatrix g = sample_ginibre(3, rng);
    const ComplexMatrix h = 3.0 * sample_ginibre(3, rng);
    const IdentityReport rep = check_spectral_identities(g, eigenvalues(g), squared_singular_values(h));
    CHECK_FALSE(rep.ok(1e-10));
}

TEST_CASE("spectra are sorted by descending modulus") {
    Rng rng(7, 7);
    for (int i = 0; i < 50; ++i) {
        const auto ev = eigenvalues(sample_ginibre(5, rng)).values;
        for (std::size_t k = 1; k < ev.size(); ++k) CHECK(std::abs(ev[k - 1]) >= std::abs(ev[k]));
    }
}
