#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace subdiff {

using Field = Eigen::VectorXd;

/// Uniform interior-node mesh on (0, extent) or (0, ex) x (0, ey).
struct Mesh {
    int dim = 1;
    std::array<double, 2> extent{1.0, 1.0};
    std::array<int, 2> n{1, 1};

    static Mesh interval(double extent, int n);
    static Mesh rectangle(double extent_x, double extent_y, int nx, int ny);

    double h(int axis) const noexcept { return extent[axis] / (n[axis] + 1); }
    /// Volume element h^dim of a node.
    double cell_volume() const noexcept { return dim == 1 ? h(0) : h(0) * h(1); }
    int size() const noexcept { return dim == 1 ? n[0] : n[0] * n[1]; }
    /// Interior node coordinate along an axis, i in [0, n).
    double coordinate(int axis, int i) const noexcept { return (i + 1) * h(axis); }
    int index(int i, int j) const noexcept { return i + n[0] * j; }

    /// Node values of a function on the mesh.
    Field sample(const std::function<double(double, double)>& fn) const;
};

bool operator==(const Mesh& a, const Mesh& b);

/**
 * Diagonal coefficient field sampled at cell midpoints.
 *
 * 1D: n+1 values a_{i+1/2}. 2D: x-faces (nx+1)*ny values, y-faces nx*(ny+1).
 */
class CoefficientField {
public:
    static CoefficientField constant(const Mesh& mesh, double a);
    static CoefficientField from_function(const Mesh& mesh, const std::function<double(double, double)>& a);
    /// Explicit midpoint values for 1D meshes.
    static CoefficientField from_midpoints(const Mesh& mesh, std::vector<double> values);

    const Mesh& mesh() const noexcept { return mesh_; }
    const std::vector<double>& x_faces() const noexcept { return x_faces_; }
    const std::vector<double>& y_faces() const noexcept { return y_faces_; }
    /// Ellipticity constant: the minimum coefficient value.
    double nu() const noexcept { return nu_; }

private:
    CoefficientField(const Mesh& mesh, std::vector<double> x, std::vector<double> y);

    Mesh mesh_;
    std::vector<double> x_faces_;
    std::vector<double> y_faces_;
    double nu_ = 0.0;
};

struct Eigenpair {
    double lambda;
    Field psi;  // positive, sum psi_i h^dim = 1
    int iterations;
};

/**
 * Conservative finite-difference approximation of -div(A grad .) with
 * homogeneous Dirichlet data. Symmetric M-matrix: tridiagonal in 1D,
 * 5-point in 2D. Immutable; the principal eigenpair is computed once on
 * first request and shared between copies.
 */
class EllipticOperator {
public:
    EllipticOperator(const Mesh& mesh, const CoefficientField& coeff);

    const Mesh& mesh() const noexcept { return mesh_; }
    double nu() const noexcept { return nu_; }
    const Eigen::SparseMatrix<double>& matrix() const noexcept { return matrix_; }

    Field apply(const Field& u) const;

    /// Solves (diag(shift) + L_h) x = rhs.
    Field solve_diagonal_shifted(const Field& shift, const Field& rhs) const;

    /// Discrete L2 inner product sum u_i v_i h^dim.
    double inner(const Field& u, const Field& v) const;

    const Eigenpair& principal_eigenpair() const;

private:
    struct Cache;

    Mesh mesh_;
    double nu_;
    Eigen::SparseMatrix<double> matrix_;
    // 1D tridiagonal bands
    std::vector<double> lower_, diag_, upper_;
    std::shared_ptr<Cache> cache_;
};

EllipticOperator assemble(const Mesh& mesh, const CoefficientField& coeff);

/// Solves (sigma I + L_h) x = rhs; Thomas elimination in 1D, CG to 1e-12 in 2D.
Field solve_shifted(const EllipticOperator& op, double sigma, const Field& rhs);

/// Inverse power iteration until the Rayleigh quotient settles to 1e-12.
Eigenpair principal_eigenpair(const EllipticOperator& op);

/// nu * lambda_1,h where lambda_1,h is the first eigenvalue of the unit-coefficient
/// operator on the same mesh.
double rayleigh_lower_bound(const EllipticOperator& op);

/// Closed-form first eigenvalue of the unit-coefficient discrete Dirichlet Laplacian.
double discrete_laplacian_first_eigenvalue(const Mesh& mesh);

} // namespace subdiff
