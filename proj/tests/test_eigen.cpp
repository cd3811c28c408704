#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sif/eigen.hpp"
#include "sif/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>

using namespace sif;
using cplx = std::complex<double>;

namespace {

DenseMatrix random_matrix(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> z;
    DenseMatrix a(n);
    for (double& v : a.data) v = z(rng);
    return a;
}

/// Q^T B Q for a random orthogonal Q (product of Householder reflections).
DenseMatrix orthogonal_similarity(const DenseMatrix& b, std::mt19937_64& rng)
{
    const std::size_t n = b.n;
    DenseMatrix q = DenseMatrix::identity(n);
    std::normal_distribution<double> z;
    for (int r = 0; r < 3; ++r) {
        std::vector<double> v(n);
        double nn = 0.0;
        for (double& x : v) {
            x = z(rng);
            nn += x * x;
        }
        DenseMatrix h = DenseMatrix::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) h(i, j) -= 2.0 * v[i] * v[j] / nn;
        q = q * h;
    }
    return transpose(q) * b * q;
}

/// Max distance from each expected value to its nearest unused computed value.
double spectrum_distance(std::vector<cplx> computed, const std::vector<cplx>& expected)
{
    double worst = 0.0;
    for (const auto& e : expected) {
        auto it = std::min_element(computed.begin(), computed.end(),
                                   [&](const cplx& a, const cplx& b) { return std::abs(a - e) < std::abs(b - e); });
        worst = std::max(worst, std::abs(*it - e));
        computed.erase(it);
    }
    return worst;
}

} // namespace

TEST_CASE("small spectra")
{
    const auto id = eigenvalues(DenseMatrix::identity(5));
    for (const auto& z : id.values) CHECK(std::abs(z - 1.0) < 1e-14);

    const auto swap = eigenvalues(DenseMatrix(2, {0, 1, 1, 0}));
    CHECK(spectrum_distance(swap.values, {1.0, -1.0}) < 1e-14);

    const auto rot = eigenvalues(DenseMatrix(2, {0, -1, 1, 0}));
    CHECK(spectrum_distance(rot.values, {cplx(0, 1), cplx(0, -1)}) < 1e-14);

    const auto one = eigenvalues(DenseMatrix(1, {0.3}));
    REQUIRE(one.values.size() == 1);
    CHECK(one.values[0] == cplx(0.3));

    const auto zero = eigenvalues(DenseMatrix(4));
    for (const auto& z : zero.values) CHECK(z == cplx(0.0));
}

TEST_CASE("balancing")
{
    const auto b = balance(DenseMatrix(2, {1.0, 1e6, 1e-6, 1.0}));
    CHECK(std::abs(b.matrix(0, 1)) < 10.0);
    CHECK(std::abs(b.matrix(1, 0)) < 10.0);
    for (double s : b.scale) CHECK(std::exp2(std::round(std::log2(s))) == s);
    CHECK(spectrum_distance(eigenvalues(DenseMatrix(2, {1.0, 1e6, 1e-6, 1.0})).values, {2.0, 0.0}) < 1e-12);

    const auto diag = balance(DenseMatrix(2, {1.0, 0.0, 0.0, 1e6}));
    CHECK(diag.matrix(0, 0) == 1.0);
    CHECK(diag.matrix(1, 1) == 1e6);

    std::mt19937_64 rng(2);
    auto a = random_matrix(10, rng);
    for (std::size_t i = 0; i < 10; ++i) a(i, 0) *= 1e5;
    const auto bal = balance(a);
    // D^{-1} A D entrywise
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j)
            CHECK(bal.matrix(i, j) == doctest::Approx(a(i, j) * bal.scale[j] / bal.scale[i]).epsilon(1e-15));
    auto before = eigenvalues(a).values;
    auto after = hessenberg_qr(hessenberg(bal.matrix)).values;
    CHECK(spectrum_distance(after, before) < 1e-8 * std::max(1.0, std::abs(before[0])));
}

TEST_CASE("hessenberg reduction is an orthogonal similarity")
{
    std::mt19937_64 rng(4);
    const auto a = random_matrix(12, rng);
    const auto h = hessenberg(a);
    for (std::size_t i = 2; i < 12; ++i)
        for (std::size_t j = 0; j + 1 < i; ++j) CHECK(h(i, j) == 0.0);
    CHECK(h.trace() == doctest::Approx(a.trace()).epsilon(1e-12));
    double fa = 0.0, fh = 0.0;
    for (std::size_t k = 0; k < a.data.size(); ++k) {
        fa += a.data[k] * a.data[k];
        fh += h.data[k] * h.data[k];
    }
    CHECK(fh == doctest::Approx(fa).epsilon(1e-12));
}

TEST_CASE("constructed spectrum survives a random similarity")
{
    std::mt19937_64 rng(8);
    const std::size_t n = 50;
    DenseMatrix b(n);
    std::vector<cplx> expected;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t i = 0;
    for (; i + 1 < n && i < 20; i += 2) {
        const double re = u(rng), im = 0.1 + std::abs(u(rng));
        b(i, i) = re;
        b(i + 1, i + 1) = re;
        b(i, i + 1) = im;
        b(i + 1, i) = -im;
        expected.emplace_back(re, im);
        expected.emplace_back(re, -im);
    }
    for (; i < n; ++i) {
        b(i, i) = 2.0 * (static_cast<double>(i) + 1.0) / static_cast<double>(n);
        expected.emplace_back(b(i, i));
    }
    const auto a = orthogonal_similarity(b, rng);
    CHECK(spectrum_distance(eigenvalues(a).values, expected) < 1e-8);
}

TEST_CASE("trace and determinant identities on random matrices")
{
    std::mt19937_64 rng(12);
    int failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto a = random_matrix(20, rng);
        const auto s = eigenvalues(a);
        REQUIRE(s.values.size() == 20);
        cplx sum = 0.0, prod = 1.0;
        for (const auto& z : s.values) {
            sum += z;
            prod *= z;
        }
        const double det = determinant(a);
        const double ttol = 1e-8 * (1.0 + std::abs(a.trace()));
        bool ok = std::abs(sum.real() - a.trace()) < ttol && std::abs(sum.imag()) < ttol;
        ok = ok && std::abs(prod - det) < 1e-6 * std::abs(det);
        // complex eigenvalues come in conjugate pairs
        for (const auto& z : s.values)
            if (z.imag() != 0.0)
                ok = ok && std::any_of(s.values.begin(), s.values.end(), [&](const cplx& w) { return w == std::conj(z); });
        failures += !ok;
    }
    CHECK(failures == 0);
}

TEST_CASE("determinant identity at n = 50")
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        auto a = random_matrix(50, rng);
        for (std::size_t i = 0; i < 50; ++i) a(i, i) += 10.0;
        cplx prod = 1.0;
        for (const auto& z : eigenvalues(a).values) prod *= z;
        const double det = determinant(a);
        CHECK(std::abs(prod - det) < 1e-6 * std::abs(det));
    }
}

TEST_CASE("spectrum is invariant under permutation similarity")
{
    std::mt19937_64 rng(21);
    const auto a = random_matrix(15, rng);
    std::vector<std::size_t> p(15);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    DenseMatrix b(15);
    for (std::size_t i = 0; i < 15; ++i)
        for (std::size_t j = 0; j < 15; ++j) b(i, j) = a(p[i], p[j]);
    CHECK(spectrum_distance(eigenvalues(b).values, eigenvalues(a).values) < 1e-10);
}

TEST_CASE("stochastic matrix with many empty columns")
{
    // rows concentrate on a few columns; the rest carry tiny or no mass
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = 120;
    DenseMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = (j % 3 == 0) ? u(rng) : (j % 3 == 1 ? 1e-300 * u(rng) : 0.0);
            a(i, j) = v;
            total += v;
        }
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= total;
    }
    const auto s = eigenvalues(a);
    CHECK(s.converged);
    auto v = s.values;
    sort_by_modulus(v);
    CHECK(std::abs(v[0] - 1.0) < 1e-10);
    for (const auto& z : v) CHECK(std::abs(z) <= 1.0 + 1e-10);
}

TEST_CASE("input validation")
{
    DenseMatrix a(3);
    a(1, 1) = std::nan("");
    CHECK_THROWS_AS(eigenvalues(a), ConfigError);
    CHECK_THROWS_AS(eigenvalues(DenseMatrix(1025)), ConfigError);
    CHECK_THROWS_AS(DenseMatrix(2, {1.0, 2.0, 3.0}), ConfigError);
}

TEST_CASE("sorting by modulus")
{
    std::vector<cplx> v = {cplx(0.5), cplx(0, 1), cplx(-1), cplx(1), cplx(0, -1)};
    sort_by_modulus(v);
    CHECK(v[0] == cplx(1));
    CHECK(v[1] == cplx(0, 1));
    CHECK(v[2] == cplx(0, -1));
    CHECK(v[3] == cplx(-1));
    CHECK(v[4] == cplx(0.5));
}
