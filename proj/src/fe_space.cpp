#include "cutfem/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cutfem {

namespace {

// Monomials x^a y^b ordered by total degree, up to cubic.
constexpr int kMonoExp[10][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1},
                                 {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};

int monomial_count(int degree) { return (degree + 1) * (degree + 2) / 2; }

int monomial_index(int a, int b) {
    for (int j = 0; j < 10; ++j)
        if (kMonoExp[j][0] == a && kMonoExp[j][1] == b)
            return j;
    return -1;
}

Eigen::VectorXd monomial_values(int count, const Vec2 &p) {
    Eigen::VectorXd m(count);
    for (int j = 0; j < count; ++j)
        m[j] = std::pow(p[0], kMonoExp[j][0]) * std::pow(p[1], kMonoExp[j][1]);
    return m;
}

// Gauss rule from a symmetric tridiagonal Jacobi matrix (Golub-Welsch).
void golub_welsch(const Eigen::VectorXd &diag, const Eigen::VectorXd &offdiag, double mu0,
                  std::vector<double> &nodes, std::vector<double> &weights) {
    const int m = static_cast<int>(diag.size());
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i)
        jac(i, i) = diag[i];
    for (int i = 0; i + 1 < m; ++i) {
        jac(i, i + 1) = offdiag[i];
        jac(i + 1, i) = offdiag[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    nodes.resize(m);
    weights.resize(m);
    for (int i = 0; i < m; ++i) {
        nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        weights[i] = mu0 * v0 * v0;
    }
}

// Gauss-Legendre on [0,1]; m points are exact through degree 2m-1.
void gauss_legendre_01(int m, std::vector<double> &nodes, std::vector<double> &weights) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd off(std::max(m - 1, 0));
    for (int k = 1; k < m; ++k)
        off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    golub_welsch(diag, off, 2.0, nodes, weights);
    for (int i = 0; i < m; ++i) {
        nodes[i] = 0.5 * (nodes[i] + 1.0);
        weights[i] *= 0.5;
    }
}

// Gauss-Jacobi with weight (1-x) on [0,1]; weights sum to 1/2.
void gauss_jacobi10_01(int m, std::vector<double> &nodes, std::vector<double> &weights) {
    Eigen::VectorXd diag(m);
    Eigen::VectorXd off(std::max(m - 1, 0));
    for (int k = 0; k < m; ++k)
        diag[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
    for (int k = 1; k < m; ++k)
        off[k - 1] = std::sqrt(k * (k + 1.0)) / (2.0 * k + 1.0);
    golub_welsch(diag, off, 2.0, nodes, weights);
    for (int i = 0; i < m; ++i) {
        nodes[i] = 0.5 * (nodes[i] + 1.0);
        weights[i] *= 0.25;
    }
}

} // namespace

QuadratureRule triangle_quadrature(int exactness) {
    if (exactness < 0 || exactness > 10)
        throw std::invalid_argument("triangle_quadrature: supported exactness degrees are 0..10");
    const int d = std::max(exactness, 1);
    const int m = (d + 2) / 2; // 2m-1 >= d

    // Conical product rule: Gauss-Jacobi in the collapsed direction times
    // Gauss-Legendre, then averaged over the 6 vertex permutations so the
    // point set carries the full triangle symmetry.
    std::vector<double> xi, wxi, eta, weta;
    gauss_jacobi10_01(m, xi, wxi);
    gauss_legendre_01(m, eta, weta);

    QuadratureRule rule;
    rule.exactness = exactness;
    rule.points.reserve(static_cast<size_t>(m) * m * 6);
    rule.weights.reserve(static_cast<size_t>(m) * m * 6);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double lam1 = xi[i];
            const double lam2 = (1.0 - xi[i]) * eta[j];
            const double lam0 = 1.0 - lam1 - lam2;
            const double w = wxi[i] * weta[j] / 6.0;
            const double lam[3] = {lam0, lam1, lam2};
            constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
            for (const auto &p : perms) {
                rule.points.emplace_back(lam[p[1]], lam[p[2]]);
                rule.weights.push_back(w);
            }
        }
    }
    return rule;
}

SegmentQuadrature segment_quadrature(int exactness) {
    if (exactness < 0 || exactness > 10)
        throw std::invalid_argument("segment_quadrature: supported exactness degrees are 0..10");
    const int d = std::max(exactness, 1);
    const int m = (d + 2) / 2;
    SegmentQuadrature rule;
    rule.exactness = exactness;
    gauss_legendre_01(m, rule.points, rule.weights);
    return rule;
}

ReferenceElement::ReferenceElement(int degree) : degree_(degree) {
    if (degree < 1 || degree > 3)
        throw std::invalid_argument("ReferenceElement: degree must be 1, 2 or 3");

    nodes_ = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    if (degree >= 2) {
        // Edge e runs from vertex e to vertex (e+1)%3; nodes listed from the
        // first vertex outward.
        const Vec2 v[3] = {nodes_[0], nodes_[1], nodes_[2]};
        for (int e = 0; e < 3; ++e) {
            const Vec2 a = v[e];
            const Vec2 b = v[(e + 1) % 3];
            for (int k = 1; k < degree; ++k)
                nodes_.push_back(a + (static_cast<double>(k) / degree) * (b - a));
        }
    }
    if (degree == 3)
        nodes_.emplace_back(1.0 / 3.0, 1.0 / 3.0);

    const int n = node_count();
    const int nm = monomial_count(degree);
    if (n != nm)
        throw std::logic_error("ReferenceElement: node/monomial count mismatch");

    Eigen::MatrixXd vander(n, nm);
    for (int i = 0; i < n; ++i)
        vander.row(i) = monomial_values(nm, nodes_[i]).transpose();
    coeffs_ = vander.fullPivLu().inverse().transpose();

    dx_ = Eigen::MatrixXd::Zero(nm, nm);
    dy_ = Eigen::MatrixXd::Zero(nm, nm);
    for (int j = 0; j < nm; ++j) {
        const int a = kMonoExp[j][0];
        const int b = kMonoExp[j][1];
        if (a > 0)
            dx_(j, monomial_index(a - 1, b)) = a;
        if (b > 0)
            dy_(j, monomial_index(a, b - 1)) = b;
    }
}

Eigen::VectorXd ReferenceElement::values(const Vec2 &xi) const {
    return coeffs_ * monomial_values(static_cast<int>(coeffs_.cols()), xi);
}

Eigen::MatrixXd ReferenceElement::gradients(const Vec2 &xi) const {
    const Eigen::VectorXd m = monomial_values(static_cast<int>(coeffs_.cols()), xi);
    Eigen::MatrixXd g(node_count(), 2);
    g.col(0) = coeffs_ * dx_ * m;
    g.col(1) = coeffs_ * dy_ * m;
    return g;
}

Eigen::VectorXd ReferenceElement::directional(const Vec2 &xi, const Vec2 &dir, int order) const {
    if (order < 0)
        throw std::invalid_argument("ReferenceElement::directional: order must be >= 0");
    if (order > degree_)
        return Eigen::VectorXd::Zero(node_count());
    const Eigen::MatrixXd d = dir[0] * dx_ + dir[1] * dy_;
    Eigen::MatrixXd c = coeffs_;
    for (int i = 0; i < order; ++i)
        c = c * d;
    return c * monomial_values(static_cast<int>(coeffs_.cols()), xi);
}

ElementMap::ElementMap(const BackgroundMesh &mesh, int t)
    : ElementMap(mesh.vertices[mesh.triangles[t][0]], mesh.vertices[mesh.triangles[t][1]],
                 mesh.vertices[mesh.triangles[t][2]]) {}

ElementMap::ElementMap(const Vec2 &a, const Vec2 &b, const Vec2 &c) : origin(a) {
    jac.col(0) = b - a;
    jac.col(1) = c - a;
    det = jac.determinant();
    if (det == 0.0)
        throw std::invalid_argument("ElementMap: degenerate triangle");
    jac_inv = jac.inverse();
}

DiscreteSpace build_dof_map(const BackgroundMesh &mesh, const std::vector<char> &element_active, int degree) {
    if (element_active.size() != static_cast<size_t>(mesh.triangle_count()))
        throw std::invalid_argument("build_dof_map: activity flags do not match the mesh");

    DiscreteSpace space(degree);
    space.mesh = &mesh;
    space.element_active = element_active;
    for (int t = 0; t < mesh.triangle_count(); ++t)
        if (element_active[t])
            space.active_elements.push_back(t);
    if (space.active_elements.empty())
        throw std::invalid_argument("build_dof_map: no active elements");

    std::vector<char> vertex_touched(mesh.vertex_count(), 0);
    std::vector<char> face_touched(mesh.face_count(), 0);
    for (int t : space.active_elements) {
        for (int v : mesh.triangles[t])
            vertex_touched[v] = 1;
        for (int f : mesh.triangle_faces[t])
            face_touched[f] = 1;
    }

    std::vector<int> vertex_dof(mesh.vertex_count(), -1);
    for (int v = 0; v < mesh.vertex_count(); ++v) {
        if (vertex_touched[v]) {
            vertex_dof[v] = space.dof_count++;
            space.dof_coords.push_back(mesh.vertices[v]);
        }
    }

    // (degree-1) dofs per touched face, placed from the lower vertex id.
    std::vector<int> face_dof(mesh.face_count(), -1);
    if (degree >= 2) {
        for (int f = 0; f < mesh.face_count(); ++f) {
            if (!face_touched[f])
                continue;
            face_dof[f] = space.dof_count;
            const Vec2 a = mesh.vertices[mesh.faces[f].v0];
            const Vec2 b = mesh.vertices[mesh.faces[f].v1];
            for (int k = 1; k < degree; ++k) {
                space.dof_coords.push_back(a + (static_cast<double>(k) / degree) * (b - a));
                ++space.dof_count;
            }
        }
    }

    std::vector<int> cell_dof(mesh.triangle_count(), -1);
    if (degree == 3) {
        for (int t : space.active_elements) {
            cell_dof[t] = space.dof_count++;
            space.dof_coords.push_back(mesh.triangle_centroid(t));
        }
    }

    space.element_dofs.resize(mesh.triangle_count());
    for (int t : space.active_elements) {
        auto &dofs = space.element_dofs[t];
        const auto &tri = mesh.triangles[t];
        for (int v : tri)
            dofs.push_back(vertex_dof[v]);
        if (degree >= 2) {
            for (int e = 0; e < 3; ++e) {
                const int a = tri[e];
                const int b = tri[(e + 1) % 3];
                const int f = mesh.triangle_faces[t][e];
                if (degree == 2) {
                    dofs.push_back(face_dof[f]);
                } else {
                    // Local edge nodes run from a toward b; global face nodes
                    // run from the lower vertex id.
                    if (a < b) {
                        dofs.push_back(face_dof[f]);
                        dofs.push_back(face_dof[f] + 1);
                    } else {
                        dofs.push_back(face_dof[f] + 1);
                        dofs.push_back(face_dof[f]);
                    }
                }
            }
        }
        if (degree == 3)
            dofs.push_back(cell_dof[t]);
    }
    return space;
}

Eigen::VectorXd lagrange_interpolate(const DiscreteSpace &space, const std::function<double(const Vec2 &)> &f) {
    Eigen::VectorXd coeffs(space.dof_count);
    for (int i = 0; i < space.dof_count; ++i)
        coeffs[i] = f(space.dof_coords[i]);
    return coeffs;
}

} // namespace cutfem
