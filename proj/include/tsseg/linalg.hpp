#ifndef TSSEG_LINALG_HPP
#define TSSEG_LINALG_HPP

#include <Eigen/Dense>
#include <vector>

namespace tsseg {

/// Eigenvalues sorted descending, column i of eigenvectors pairs with
/// eigenvalue i. Sign convention: the largest-magnitude entry of each
/// eigenvector is positive (ties broken by lowest index), so results are
/// deterministic.
struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

/// p x r matrix with orthonormal columns representing an r-dimensional
/// subspace of R^p.
struct SubspaceBasis {
    Eigen::MatrixXd matrix;

    Eigen::Index p() const { return matrix.rows(); }
    Eigen::Index r() const { return matrix.cols(); }

    /// Wrap a matrix that is already orthonormal (checked to 1e-8).
    static SubspaceBasis from_orthonormal(Eigen::MatrixXd m);
    /// Orthonormalize the columns of a full-column-rank matrix.
    static SubspaceBasis orthonormalize(const Eigen::MatrixXd& m);
};

/// Spectral decomposition of a symmetric matrix. Rejects inputs with
/// ||S - S'||_max >= 1e-8 * ||S||_max.
EigenDecomposition sym_eigen(const Eigen::MatrixXd& S);

/// Symmetric inverse square root of a symmetric positive definite matrix,
/// via its eigendecomposition. Rejects eigenvalues below
/// 1e-10 * lambda_max.
Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& S);

/// Distance between two equal-rank subspaces given by orthonormal bases:
///   D = sqrt(1 - tr(H1 H1' H2 H2') / r)  in [0, 1].
/// 0 iff the spans are equal, 1 iff they are orthogonal.
double distance_D(const SubspaceBasis& H1, const SubspaceBasis& H2);

/// Extension to full-column-rank matrices of possibly different ranks:
///   D~ = sqrt(1 - tr(P1 P2) / min(r1, r2)),  P_i the orthogonal projector.
/// 0 iff one span contains the other, 1 iff the spans are orthogonal.
double distance_D_general(const Eigen::MatrixXd& H1, const Eigen::MatrixXd& H2);

/// Average D~ over matched (estimate, truth) pairs. Both lists must have
/// the same group count, cover the same total dimension, and agree on the
/// multiset of ranks. Pairs are matched greedily by ascending D~ within
/// each equal-rank class.
double mean_error_Dbar(const std::vector<SubspaceBasis>& estimate,
                       const std::vector<SubspaceBasis>& truth);

}  // namespace tsseg

#endif  // TSSEG_LINALG_HPP
