#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "torobs/linalg.hpp"

using namespace torobs;

namespace {

CMatrix random_hermitian(Rng& rng, std::size_t n, double scale) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.at(i, i) = cplx(scale * rng.gaussian(), 0);
        for (std::size_t j = i + 1; j < n; ++j) {
            cplx v = scale * rng.complex_gaussian();
            m.at(i, j) = v;
            m.at(j, i) = std::conj(v);
        }
    }
    return m;
}

CMatrix random_psd(Rng& rng, std::size_t n) {
    // B*B is positive semidefinite for any B
    CMatrix b(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b.at(i, j) = rng.complex_gaussian();
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s(0, 0);
            for (std::size_t k = 0; k < n; ++k) s += std::conj(b.at(k, i)) * b.at(k, j);
            m.at(i, j) = s;
        }
    return m;
}

}  // namespace

TEST_CASE("jacobi eigensolver: residuals, orthonormality, trace") {
    Rng rng(404);
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{17},
                          std::size_t{40}}) {
        CMatrix a = random_hermitian(rng, n, 2.0);
        EigenResult eig = hermitian_eigen(a);
        REQUIRE(eig.values.size() == n);

        double norm_a = 0.0;
        for (auto& v : a.a) norm_a = std::max(norm_a, std::abs(v));
        norm_a = std::max(norm_a, 1.0);

        // eigenvalues ascend and preserve the trace
        double trace = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            trace += a.at(i, i).real();
            sum += eig.values[i];
            if (i > 0) CHECK(eig.values[i] >= eig.values[i - 1]);
        }
        CHECK(std::abs(trace - sum) <= 1e-11 * norm_a * n);

        // A v = λ v per column
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<cplx> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = eig.vectors.at(i, j);
            std::vector<cplx> av = matvec(a, v);
            double resid = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                resid = std::max(resid, std::abs(av[i] - eig.values[j] * v[i]));
            CHECK(resid <= 1e-11 * norm_a);
        }

        // eigenvector matrix is unitary
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j; k < n; ++k) {
                cplx dot(0, 0);
                for (std::size_t i = 0; i < n; ++i)
                    dot += std::conj(eig.vectors.at(i, j)) * eig.vectors.at(i, k);
                CHECK(std::abs(dot - (j == k ? cplx(1, 0) : cplx(0, 0))) <= 1e-12);
            }
    }
}

TEST_CASE("power iteration matches the dense top eigenvalue on PSD matrices") {
    Rng rng(808);
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t n = 2 + static_cast<std::size_t>(rng.uniform_int(0, 20));
        CMatrix m = random_psd(rng, n);
        double dense = hermitian_eigen(m).values.back();
        double power = power_iteration_max(m);
        CHECK(std::abs(dense - power) <= 1e-8 * std::max(1.0, dense));
    }

    // degenerate top eigenvalue: the identity
    CMatrix eye(6);
    for (std::size_t i = 0; i < 6; ++i) eye.at(i, i) = 1;
    CHECK(power_iteration_max(eye) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian defect and symmetrization") {
    CMatrix m(2);
    m.at(0, 0) = cplx(1, 0);
    m.at(0, 1) = cplx(0, 1);
    m.at(1, 0) = cplx(0, 1);  // conj would be (0,-1): defect 2
    m.at(1, 1) = cplx(2, 0);
    CHECK(hermitian_defect(m) == doctest::Approx(2.0));
    symmetrize(m);
    CHECK(hermitian_defect(m) <= 1e-16);
}
