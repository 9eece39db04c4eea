#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "svev/rng.hpp"
#include "svev/special.hpp"

namespace svev {

using ComplexMatrix = Eigen::MatrixXcd;

enum class SpectrumKind { Eigenvalues, SquaredSingularValues };

// n values ordered by descending modulus, ties by descending real then
// imaginary part. Squared singular values carry zero imaginary parts.
struct Spectrum {
    SpectrumKind kind = SpectrumKind::Eigenvalues;
    std::vector<cplx> values;

    std::size_t size() const noexcept { return values.size(); }
    std::vector<double> real_values() const;
};

void sort_descending(std::vector<cplx>& values);

// Entries i.i.d. with density exp(-|x|^2)/pi.
ComplexMatrix sample_ginibre(int rows, int cols, Rng& rng);
inline ComplexMatrix sample_ginibre(int n, Rng& rng) { return sample_ginibre(n, n, rng); }

// Haar unitary: QR of a Ginibre draw with the phases of diag(R) moved into Q.
ComplexMatrix sample_haar_unitary(int n, Rng& rng);

// Eigenvalues with residual ||g v - z v|| <= tol ||g|| checked for every pair.
Spectrum eigenvalues(const ComplexMatrix& g, double tol = 1e-10);

// Eigenvalues of g* g (squares of the singular values, hence never negative).
Spectrum squared_singular_values(const ComplexMatrix& g);

cplx vandermonde(std::span<const cplx> x);
double vandermonde(std::span<const double> x);

// Ryser's formula with Gray-code updates, O(2^n n); n <= 20.
cplx permanent(const ComplexMatrix& m);

// |det g|^2 by LU.
double det_abs2(const ComplexMatrix& g);

struct IdentityReport {
    double det_relative_defect = 0.0;  // max relative spread of |det g|^2, prod|z|^2, prod a
    bool weyl = true;                  // partial products, multiplicative slack
    bool horn = true;                  // partial sums, additive slack relative to sum a
    int first_violation_k = -1;
    bool ok(double det_tol) const { return det_relative_defect <= det_tol && weyl && horn; }
};

IdentityReport check_spectral_identities(const ComplexMatrix& g, const Spectrum& ev, const Spectrum& sv,
                                         double slack = 1e-10);

}  // namespace svev
