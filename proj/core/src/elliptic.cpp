#include "subdiff/elliptic.hpp"

#include "subdiff/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace subdiff {

Mesh Mesh::interval(double extent, int n) {
    if (!(extent > 0.0) || !std::isfinite(extent)) throw DomainError("mesh: extent must be positive");
    if (n < 3) throw DomainError("mesh: need at least 3 interior nodes, got " + std::to_string(n));
    Mesh mesh;
    mesh.dim = 1;
    mesh.extent = {extent, 1.0};
    mesh.n = {n, 1};
    return mesh;
}

Mesh Mesh::rectangle(double extent_x, double extent_y, int nx, int ny) {
    if (!(extent_x > 0.0) || !(extent_y > 0.0)) throw DomainError("mesh: extents must be positive");
    if (nx < 3 || ny < 3) throw DomainError("mesh: need at least 3 interior nodes per axis");
    Mesh mesh;
    mesh.dim = 2;
    mesh.extent = {extent_x, extent_y};
    mesh.n = {nx, ny};
    return mesh;
}

Field Mesh::sample(const std::function<double(double, double)>& fn) const {
    Field values(size());
    if (dim == 1) {
        for (int i = 0; i < n[0]; ++i) values[i] = fn(coordinate(0, i), 0.0);
    } else {
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) values[index(i, j)] = fn(coordinate(0, i), coordinate(1, j));
    }
    return values;
}

bool operator==(const Mesh& a, const Mesh& b) {
    return a.dim == b.dim && a.extent == b.extent && a.n == b.n;
}

CoefficientField::CoefficientField(const Mesh& mesh, std::vector<double> x, std::vector<double> y)
    : mesh_(mesh), x_faces_(std::move(x)), y_faces_(std::move(y)) {
    double nu = std::numeric_limits<double>::infinity();
    for (double a : x_faces_) nu = std::min(nu, a);
    for (double a : y_faces_) nu = std::min(nu, a);
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        throw DomainError("coefficient field: coefficients must be positive and finite");
    }
    nu_ = nu;
}

CoefficientField CoefficientField::constant(const Mesh& mesh, double a) {
    return from_function(mesh, [a](double, double) { return a; });
}

CoefficientField CoefficientField::from_function(const Mesh& mesh,
                                                 const std::function<double(double, double)>& a) {
    const double hx = mesh.h(0);
    if (mesh.dim == 1) {
        std::vector<double> x(mesh.n[0] + 1);
        for (int f = 0; f <= mesh.n[0]; ++f) x[f] = a((f + 0.5) * hx, 0.0);
        return CoefficientField(mesh, std::move(x), {});
    }
    const double hy = mesh.h(1);
    const int nx = mesh.n[0];
    const int ny = mesh.n[1];
    std::vector<double> x(static_cast<std::size_t>(nx + 1) * ny);
    std::vector<double> y(static_cast<std::size_t>(nx) * (ny + 1));
    for (int j = 0; j < ny; ++j)
        for (int f = 0; f <= nx; ++f) x[f + (nx + 1) * j] = a((f + 0.5) * hx, (j + 1) * hy);
    for (int g = 0; g <= ny; ++g)
        for (int i = 0; i < nx; ++i) y[i + nx * g] = a((i + 1) * hx, (g + 0.5) * hy);
    return CoefficientField(mesh, std::move(x), std::move(y));
}

CoefficientField CoefficientField::from_midpoints(const Mesh& mesh, std::vector<double> values) {
    if (mesh.dim != 1 || values.size() != static_cast<std::size_t>(mesh.n[0]) + 1) {
        throw DomainError("coefficient field: expected n+1 midpoint values on a 1D mesh");
    }
    return CoefficientField(mesh, std::move(values), {});
}

struct EllipticOperator::Cache {
    std::once_flag once;
    Eigenpair pair;
};

EllipticOperator::EllipticOperator(const Mesh& mesh, const CoefficientField& coeff)
    : mesh_(mesh), nu_(coeff.nu()), cache_(std::make_shared<Cache>()) {
    if (!(coeff.mesh() == mesh)) throw DomainError("assemble: coefficient field is on a different mesh");
    const int size = mesh.size();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(size) * (mesh.dim == 1 ? 3 : 5));
    const double inv_hx2 = 1.0 / (mesh.h(0) * mesh.h(0));
    const auto& ax = coeff.x_faces();

    if (mesh.dim == 1) {
        lower_.assign(size, 0.0);
        diag_.assign(size, 0.0);
        upper_.assign(size, 0.0);
        for (int i = 0; i < size; ++i) {
            diag_[i] = (ax[i] + ax[i + 1]) * inv_hx2;
            triplets.emplace_back(i, i, diag_[i]);
            if (i > 0) {
                lower_[i] = -ax[i] * inv_hx2;
                triplets.emplace_back(i, i - 1, lower_[i]);
            }
            if (i + 1 < size) {
                upper_[i] = -ax[i + 1] * inv_hx2;
                triplets.emplace_back(i, i + 1, upper_[i]);
            }
        }
    } else {
        const double inv_hy2 = 1.0 / (mesh.h(1) * mesh.h(1));
        const auto& ay = coeff.y_faces();
        const int nx = mesh.n[0];
        const int ny = mesh.n[1];
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const int row = mesh.index(i, j);
                const double west = ax[i + (nx + 1) * j] * inv_hx2;
                const double east = ax[i + 1 + (nx + 1) * j] * inv_hx2;
                const double south = ay[i + nx * j] * inv_hy2;
                const double north = ay[i + nx * (j + 1)] * inv_hy2;
                triplets.emplace_back(row, row, west + east + south + north);
                if (i > 0) triplets.emplace_back(row, mesh.index(i - 1, j), -west);
                if (i + 1 < nx) triplets.emplace_back(row, mesh.index(i + 1, j), -east);
                if (j > 0) triplets.emplace_back(row, mesh.index(i, j - 1), -south);
                if (j + 1 < ny) triplets.emplace_back(row, mesh.index(i, j + 1), -north);
            }
        }
    }
    matrix_.resize(size, size);
    matrix_.setFromTriplets(triplets.begin(), triplets.end());
    matrix_.makeCompressed();
}

Field EllipticOperator::apply(const Field& u) const {
    if (u.size() != mesh_.size()) throw DomainError("apply: field size does not match mesh");
    return matrix_ * u;
}

double EllipticOperator::inner(const Field& u, const Field& v) const {
    return u.dot(v) * mesh_.cell_volume();
}

Field EllipticOperator::solve_diagonal_shifted(const Field& shift, const Field& rhs) const {
    const int size = mesh_.size();
    if (rhs.size() != size || shift.size() != size) {
        throw DomainError("solve: vector size does not match mesh");
    }
    if (mesh_.dim == 1) {
        // Thomas elimination
        std::vector<double> c(size);
        Field x(size);
        double pivot = diag_[0] + shift[0];
        for (int i = 0; i < size; ++i) {
            if (i > 0) pivot = diag_[i] + shift[i] - lower_[i] * c[i - 1];
            if (!(std::abs(pivot) > 1e-300) || !std::isfinite(pivot)) {
                throw SolverError("tridiagonal solve: zero pivot at row " + std::to_string(i),
                                  std::numeric_limits<double>::infinity());
            }
            c[i] = upper_[i] / pivot;
            x[i] = (rhs[i] - (i > 0 ? lower_[i] * x[i - 1] : 0.0)) / pivot;
        }
        for (int i = size - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
        return x;
    }

    Eigen::SparseMatrix<double> shifted = matrix_;
    for (int i = 0; i < size; ++i) shifted.coeffRef(i, i) += shift[i];
    if (shift.minCoeff() >= 0.0) {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
        cg.setTolerance(1e-12);
        cg.setMaxIterations(10 * size);
        cg.compute(shifted);
        Field x = cg.solve(rhs);
        if (cg.info() != Eigen::Success) {
            throw SolverError("conjugate gradient did not converge", cg.error());
        }
        return x;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) {
        throw SolverError("sparse LU factorization failed", std::numeric_limits<double>::infinity());
    }
    Field x = lu.solve(rhs);
    const double residual = (shifted * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
    if (!std::isfinite(residual) || residual > 1e-8) throw SolverError("sparse LU solve inaccurate", residual);
    return x;
}

const Eigenpair& EllipticOperator::principal_eigenpair() const {
    std::call_once(cache_->once, [this] {
        const Field zero = Field::Zero(mesh_.size());
        Field x = Field::Ones(mesh_.size());
        x.normalize();
        double rayleigh = x.dot(apply(x));
        for (int iter = 1; iter <= 10000; ++iter) {
            Field y = solve_diagonal_shifted(zero, x);
            y.normalize();
            const double next = y.dot(apply(y));
            x = std::move(y);
            const bool settled = std::abs(next - rayleigh) <= 1e-12 * std::abs(next);
            rayleigh = next;
            if (settled) {
                if (x.sum() < 0.0) x = -x;
                x /= x.sum() * mesh_.cell_volume();
                cache_->pair = Eigenpair{rayleigh, std::move(x), iter};
                return;
            }
        }
        throw SolverError("inverse power iteration did not converge in 10000 iterations",
                          std::numeric_limits<double>::quiet_NaN());
    });
    return cache_->pair;
}

EllipticOperator assemble(const Mesh& mesh, const CoefficientField& coeff) {
    return EllipticOperator(mesh, coeff);
}

Field solve_shifted(const EllipticOperator& op, double sigma, const Field& rhs) {
    if (!(sigma >= 0.0)) throw DomainError("solve_shifted: sigma must be nonnegative");
    return op.solve_diagonal_shifted(Field::Constant(op.mesh().size(), sigma), rhs);
}

Eigenpair principal_eigenpair(const EllipticOperator& op) { return op.principal_eigenpair(); }

double discrete_laplacian_first_eigenvalue(const Mesh& mesh) {
    double lambda = 0.0;
    for (int axis = 0; axis < mesh.dim; ++axis) {
        const double h = mesh.h(axis);
        const double s = std::sin(std::numbers::pi * h / (2.0 * mesh.extent[axis]));
        lambda += 4.0 / (h * h) * s * s;
    }
    return lambda;
}

double rayleigh_lower_bound(const EllipticOperator& op) {
    return op.nu() * discrete_laplacian_first_eigenvalue(op.mesh());
}

} // namespace subdiff
