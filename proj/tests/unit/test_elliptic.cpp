#include "subdiff/elliptic.hpp"
#include "subdiff/errors.hpp"
#include "support.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace subdiff;

namespace {

EllipticOperator unit_op(const Mesh& mesh, double a = 1.0) {
    return assemble(mesh, CoefficientField::constant(mesh, a));
}

Field random_field(testing::Gen& gen, int size) {
    Field u(size);
    for (int i = 0; i < size; ++i) u[i] = gen.uniform(-1.0, 1.0);
    return u;
}

// Smallest eigenvalue by dense symmetric solve; independent of the inverse iteration.
double dense_lambda(const EllipticOperator& op) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(op.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

} // namespace

TEST_SUITE("elliptic") {

TEST_CASE("second difference of a quadratic is exact") {
    const auto mesh = Mesh::interval(1.0, 49);
    const auto u = mesh.sample([](double x, double) { return x * (1.0 - x); });
    const auto Lu = unit_op(mesh).apply(u);
    for (int i = 0; i < mesh.size(); ++i) CHECK(Lu[i] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(unit_op(mesh).apply(Field::Zero(mesh.size())).norm() == 0.0);
}

TEST_CASE("operator is linear in the coefficient") {
    for (const auto& mesh : {Mesh::interval(1.0, 30), Mesh::rectangle(1.0, 2.0, 7, 9)}) {
        const Eigen::MatrixXd one = Eigen::MatrixXd(unit_op(mesh).matrix());
        const Eigen::MatrixXd two = Eigen::MatrixXd(unit_op(mesh, 2.0).matrix());
        CHECK((two - 2.0 * one).cwiseAbs().maxCoeff() <= 1e-9 * one.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("M-matrix structure") {
    testing::Gen gen;
    for (int trial = 0; trial < 8; ++trial) {
        const bool plane = trial % 2 == 1;
        const auto mesh = plane ? Mesh::rectangle(gen.uniform(0.5, 2.0), gen.uniform(0.5, 2.0), gen.integer(3, 12),
                                                  gen.integer(3, 12))
                                : Mesh::interval(gen.uniform(0.5, 3.0), gen.integer(5, 80));
        const double a0 = gen.uniform(0.5, 2.0), a1 = gen.uniform(0.0, 3.0);
        const auto coeff =
            CoefficientField::from_function(mesh, [&](double x, double y) { return a0 + a1 * std::sin(3 * x + y) * std::sin(3 * x + y); });
        const Eigen::MatrixXd A = Eigen::MatrixXd(assemble(mesh, coeff).matrix());
        CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < A.rows(); ++i) {
            double off = 0.0;
            for (int j = 0; j < A.cols(); ++j) {
                if (i == j) continue;
                CHECK(A(i, j) <= 0.0);
                off += std::abs(A(i, j));
            }
            CHECK(A(i, i) > 0.0);
            CHECK(A(i, i) >= off * (1.0 - 1e-14));
        }
    }
}

TEST_CASE("shifted solve") {
    const auto mesh = Mesh::interval(1.0, 99);
    const auto op = unit_op(mesh);
    // sin(pi x_i) is an exact eigenvector of the discrete operator
    const Field phi = mesh.sample([](double x, double) { return std::sin(std::numbers::pi * x); });
    const Field rhs = (1.0 + discrete_laplacian_first_eigenvalue(mesh)) * phi;
    CHECK((solve_shifted(op, 1.0, rhs) - phi).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(solve_shifted(op, 1.0, Field::Zero(mesh.size())).norm() == 0.0);

    // |x sigma - r| <= |L_h| |r| / sigma; keep |L_h| ~ 4/h^2 small enough for 1e-8
    testing::Gen gen;
    const auto coarse = Mesh::interval(1.0, 9);
    const Field r = random_field(gen, coarse.size());
    const Field x = solve_shifted(unit_op(coarse), 1e12, r);
    CHECK((x * 1e12 - r).cwiseAbs().maxCoeff() <= 1e-8 * r.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(solve_shifted(op, -1.0, r), DomainError);
}

TEST_CASE("shifted solve in two dimensions against a dense factorization") {
    const auto mesh = Mesh::rectangle(1.0, 1.5, 8, 11);
    const auto op = unit_op(mesh, 1.5);
    testing::Gen gen;
    const Field rhs = random_field(gen, mesh.size());
    const Eigen::MatrixXd A = Eigen::MatrixXd(op.matrix()) + 0.3 * Eigen::MatrixXd::Identity(mesh.size(), mesh.size());
    const Field expected = A.llt().solve(rhs);
    CHECK((solve_shifted(op, 0.3, rhs) - expected).cwiseAbs().maxCoeff() <= 1e-9);

    Field shift(mesh.size());
    for (int i = 0; i < shift.size(); ++i) shift[i] = gen.uniform(0.0, 2.0);
    const Eigen::MatrixXd B = Eigen::MatrixXd(op.matrix()) + Eigen::MatrixXd(shift.asDiagonal());
    CHECK((op.solve_diagonal_shifted(shift, rhs) - B.llt().solve(rhs)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("principal eigenpair on the unit interval") {
    const auto mesh = Mesh::interval(1.0, 99);
    const auto op = unit_op(mesh);
    const auto& pair = op.principal_eigenpair();
    const double h = 0.01;
    const double closed = 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2.0), 2);
    CHECK(pair.lambda == doctest::Approx(closed).epsilon(1e-10));
    CHECK(pair.lambda == doctest::Approx(9.8688).epsilon(1e-5));
    CHECK(discrete_laplacian_first_eigenvalue(mesh) == doctest::Approx(closed).epsilon(1e-13));
    CHECK(std::abs(pair.psi[49] - std::numbers::pi / 2.0) <= 1e-3);
    CHECK(pair.psi.sum() * mesh.cell_volume() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(unit_op(mesh, 4.0).principal_eigenpair().lambda == doctest::Approx(4.0 * pair.lambda).epsilon(1e-10));
}

TEST_CASE("eigenvector is positive and unimodal") {
    testing::Gen gen;
    for (int trial = 0; trial < 5; ++trial) {
        const auto mesh = Mesh::interval(gen.uniform(0.5, 4.0), gen.integer(10, 150));
        const auto op = unit_op(mesh);
        const auto& pair = op.principal_eigenpair();
        int peak = 0;
        pair.psi.maxCoeff(&peak);
        for (int i = 0; i < mesh.size(); ++i) {
            CHECK(pair.psi[i] > 0.0);
            if (i > 0 && i <= peak) CHECK(pair.psi[i] >= pair.psi[i - 1]);
            if (i > peak) CHECK(pair.psi[i] <= pair.psi[i - 1]);
        }
    }
}

TEST_CASE("eigenvalue against a dense solver") {
    const auto mesh = Mesh::rectangle(1.0, 2.0, 9, 14);
    const auto op = assemble(mesh, CoefficientField::from_function(mesh, [](double x, double y) { return 1.0 + x * y; }));
    CHECK(op.principal_eigenpair().lambda == doctest::Approx(dense_lambda(op)).epsilon(1e-9));
    CHECK(op.principal_eigenpair().psi.minCoeff() > 0.0);
}

TEST_CASE("Rayleigh lower bound") {
    const auto mesh = Mesh::interval(1.0, 99);
    const auto op = unit_op(mesh);
    CHECK(rayleigh_lower_bound(op) == doctest::Approx(op.principal_eigenpair().lambda).epsilon(1e-10));

    const auto varying = assemble(mesh, CoefficientField::from_function(mesh, [](double x, double) { return 2.0 + x; }));
    CHECK(varying.nu() >= 2.0);
    CHECK(rayleigh_lower_bound(varying) <= varying.principal_eigenpair().lambda);

    double previous = 0.0;
    for (int n : {9, 19, 39, 79}) {
        const double bound = rayleigh_lower_bound(unit_op(Mesh::interval(2.0, n), 3.0));
        CHECK(bound > previous);
        CHECK(bound < 3.0 * std::numbers::pi * std::numbers::pi / 4.0);
        previous = bound;
    }
}

TEST_CASE("discrete Poincare inequality") {
    testing::Gen gen;
    const auto mesh = Mesh::interval(1.0, 60);
    const auto op = assemble(mesh, CoefficientField::from_function(mesh, [](double x, double) { return 1.0 + x * x; }));
    const double lambda1 = discrete_laplacian_first_eigenvalue(mesh);
    for (int trial = 0; trial < 20; ++trial) {
        const Field u = random_field(gen, mesh.size());
        CHECK(op.inner(op.apply(u), u) >= op.nu() * lambda1 * op.inner(u, u) - 1e-10);
    }
}

TEST_CASE("eigenvalue is monotone in the coefficient") {
    const auto mesh = Mesh::interval(1.0, 79);
    const std::vector<std::pair<std::function<double(double, double)>, std::function<double(double, double)>>> pairs{
        {[](double, double) { return 1.0; }, [](double x, double) { return 1.0 + x; }},
        {[](double x, double) { return 2.0 + std::sin(x); }, [](double x, double) { return 3.0 + std::sin(x); }},
        {[](double x, double) { return x < 0.5 ? 1.0 : 2.0; }, [](double, double) { return 2.0; }},
    };
    for (const auto& [lo, hi] : pairs) {
        const double a = assemble(mesh, CoefficientField::from_function(mesh, lo)).principal_eigenpair().lambda;
        const double b = assemble(mesh, CoefficientField::from_function(mesh, hi)).principal_eigenpair().lambda;
        CHECK(a <= b);
    }
}

TEST_CASE("mesh and coefficient validation") {
    CHECK_THROWS_AS(Mesh::interval(0.0, 10), DomainError);
    CHECK_THROWS_AS(Mesh::interval(1.0, 0), DomainError);
    const auto mesh = Mesh::interval(1.0, 5);
    CHECK_THROWS_AS(CoefficientField::constant(mesh, 0.0), DomainError);
    CHECK_THROWS_AS(CoefficientField::from_midpoints(mesh, {1.0, 1.0}), DomainError);
}

}
