#include "svev/matlin.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "svev/errors.hpp"

namespace svev {

std::vector<double> Spectrum::real_values() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
    return out;
}

void sort_descending(std::vector<cplx>& values) {
    std::sort(values.begin(), values.end(), [](const cplx& x, const cplx& y) {
        const double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
}

ComplexMatrix sample_ginibre(int rows, int cols, Rng& rng) {
    if (rows < 1 || cols < 1) throw ConfigError("matrix dimensions must be positive");
    ComplexMatrix g(rows, cols);
    // fill row-major so the draw order is independent of storage order
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
    return g;
}

ComplexMatrix sample_haar_unitary(int n, Rng& rng) {
    const ComplexMatrix z = sample_ginibre(n, n, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (int j = 0; j < n; ++j) {
        const cplx d = r(j, j);
        const double m = std::abs(d);
        q.col(j) *= (m > 0.0) ? d / m : cplx(1.0);
    }
    return q;
}

Spectrum eigenvalues(const ComplexMatrix& g, double tol) {
    if (!g.allFinite()) throw DomainError("eigenvalues of a matrix with non-finite entries");
    Eigen::ComplexEigenSolver<ComplexMatrix> es(g, true);
    if (es.info() != Eigen::Success) throw NumericError("complex Schur iteration did not converge");
    const double gnorm = g.norm();
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    for (int j = 0; j < g.rows(); ++j) {
        const Eigen::VectorXcd v = vecs.col(j).normalized();
        const double res = (g * v - vals(j) * v).norm();
        if (res > tol * std::max(gnorm, 1e-300)) {
            throw NumericError("eigenpair residual " + std::to_string(res) + " exceeds tolerance", res);
        }
    }
    Spectrum s;
    s.kind = SpectrumKind::Eigenvalues;
    s.values.assign(vals.data(), vals.data() + vals.size());
    sort_descending(s.values);
    return s;
}

Spectrum squared_singular_values(const ComplexMatrix& g) {
    if (!g.allFinite()) throw DomainError("singular values of a matrix with non-finite entries");
    // One-sided Jacobi SVD keeps small singular values to high relative accuracy,
    // which matters for the product identities; squares equal the eigenvalues of g*g.
    Eigen::JacobiSVD<ComplexMatrix> svd(g);
    const auto& sig = svd.singularValues();
    Spectrum s;
    s.kind = SpectrumKind::SquaredSingularValues;
    for (int j = 0; j < sig.size(); ++j) s.values.emplace_back(sig(j) * sig(j), 0.0);
    sort_descending(s.values);
    return s;
}

cplx vandermonde(std::span<const cplx> x) {
    cplx p = 1.0;
    for (std::size_t c = 0; c < x.size(); ++c)
        for (std::size_t b = 0; b < c; ++b) p *= x[c] - x[b];
    return p;
}

double vandermonde(std::span<const double> x) {
    double p = 1.0;
    for (std::size_t c = 0; c < x.size(); ++c)
        for (std::size_t b = 0; b < c; ++b) p *= x[c] - x[b];
    return p;
}

cplx permanent(const ComplexMatrix& m) {
    const int n = int(m.rows());
    if (m.cols() != n) throw DomainError("permanent of a non-square matrix");
    if (n > 20) throw CapabilityError("permanent limited to n <= 20");
    if (n == 0) return 1.0;
    // Ryser: perm = (-1)^n sum_S (-1)^{|S|} prod_i sum_{j in S} m_ij, Gray-code order.
    std::vector<cplx> rowsum(n, 0.0);
    cplx total = 0.0;
    unsigned gray = 0;
    for (unsigned k = 1; k < (1u << n); ++k) {
        const unsigned next = k ^ (k >> 1);
        const unsigned flipped = next ^ gray;
        const int j = std::countr_zero(flipped);
        const double sgn = (next & flipped) ? 1.0 : -1.0;
        for (int i = 0; i < n; ++i) rowsum[i] += sgn * m(i, j);
        gray = next;
        cplx prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= rowsum[i];
        const int size = std::popcount(gray);
        total += ((size % 2) ? -1.0 : 1.0) * prod;
    }
    return (n % 2) ? -total : total;
}

double det_abs2(const ComplexMatrix& g) {
    const cplx d = Eigen::PartialPivLU<ComplexMatrix>(g).determinant();
    return std::norm(d);
}

IdentityReport check_spectral_identities(const ComplexMatrix& g, const Spectrum& ev, const Spectrum& sv,
                                         double slack) {
    IdentityReport rep;
    const std::size_t n = ev.size();
    double log_z = 0.0, log_a = 0.0, sum_z = 0.0, sum_a = 0.0, total_a = 0.0;
    for (const auto& a : sv.values) total_a += a.real();
    for (std::size_t k = 0; k < n; ++k) {
        const double z2 = std::norm(ev.values[k]);
        const double a = sv.values[k].real();
        log_z += std::log(z2);
        log_a += std::log(a);
        sum_z += z2;
        sum_a += a;
        const bool weyl_k = log_z <= log_a + std::log1p(slack);
        const bool horn_k = sum_z <= sum_a + slack * total_a;
        if (!weyl_k) rep.weyl = false;
        if (!horn_k) rep.horn = false;
        if ((!weyl_k || !horn_k) && rep.first_violation_k < 0) rep.first_violation_k = int(k) + 1;
    }
    const double log_det = std::log(det_abs2(g));
    const double lo = std::min({log_det, log_z, log_a});
    const double hi = std::max({log_det, log_z, log_a});
    rep.det_relative_defect = std::expm1(hi - lo);
    return rep;
}

}  // namespace svev
