#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blockrip/distributions.hpp"
#include "blockrip/rng.hpp"

namespace blockrip {

// Dense row-major matrix. Immutable by convention after construction.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> d);

    std::vector<double> apply(std::span<const double> x) const;            // A x
    std::vector<double> apply_transpose(std::span<const double> y) const;  // A^T y
    DenseMatrix transpose() const;
    DenseMatrix matmul(const DenseMatrix& other) const;
    DenseMatrix gram() const;  // A^T A
    DenseMatrix scaled(double c) const;
};

double frobenius_norm(const DenseMatrix& a);

// Largest singular value via power iteration on the smaller Gram matrix.
// Deterministic all-ones start; restarts once from a fixed-seed random
// vector if the iterate stagnates or lands in the null space. Throws
// ConvergenceError (carrying the best iterate) after the iteration cap.
double opnorm_2_2(const DenseMatrix& a, double tol = 1e-8);

// Exact l2 -> linf operator norm: the largest row Euclidean norm.
double opnorm_2_inf(const DenseMatrix& a);

struct EigenExtremes {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

// Extreme eigenvalues of a symmetric matrix: power iteration (shifted PSD)
// for lambda_max, then shifted power iteration on lambda_max*I - S for
// lambda_min.
EigenExtremes extreme_eigen_sym(const DenseMatrix& s, double tol = 1e-8);

// B = diag(Phi_1, ..., Phi_L) with equal m x d blocks.
struct BlockDiagonalMatrix {
    std::vector<DenseMatrix> blocks;

    std::size_t num_blocks() const { return blocks.size(); }
    std::size_t block_rows() const { return blocks.empty() ? 0 : blocks[0].rows; }
    std::size_t block_cols() const { return blocks.empty() ? 0 : blocks[0].cols; }
    std::size_t total_rows() const { return num_blocks() * block_rows(); }
    std::size_t total_cols() const { return num_blocks() * block_cols(); }

    void validate() const;

    // Per-block products, concatenated; the full matrix is never formed.
    std::vector<double> apply(std::span<const double> x) const;
    DenseMatrix to_dense() const;
};

struct OrthogonalBasis {
    DenseMatrix matrix;

    std::size_t dimension() const { return matrix.rows; }
    // Max-entry error of Psi^T Psi - I; validate() enforces <= tol.
    double orthogonality_error() const;
    void validate(double tol = 1e-10) const;
};

// L independent m x d blocks with i.i.d. entries from spec, divided by the
// spec's standard deviation so entries have unit variance.
BlockDiagonalMatrix random_block_diagonal(const DistributionSpec& spec, std::size_t L,
                                          std::size_t m, std::size_t d, RngStream rng);

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the R
// diagonal sign-corrected to be positive.
OrthogonalBasis haar_orthogonal(std::size_t D, RngStream rng);

// Text fixture format: "rows cols" header line, then row-major entries.
void save_matrix(const DenseMatrix& a, std::ostream& os);
void save_matrix(const DenseMatrix& a, const std::string& path);
DenseMatrix load_matrix(std::istream& is);
DenseMatrix load_matrix(const std::string& path);

}  // namespace blockrip
